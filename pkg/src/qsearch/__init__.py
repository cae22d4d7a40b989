"""Compiler, resource estimator, and exact simulator for bit-field table
search by amplitude amplification over a unary-indexed data loader."""

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    QubitId,
    Register,
    ResourceTally,
    gate,
    resource_tally,
    schedule_layers,
    t_depth,
)
from .database import (
    Database,
    FieldSpec,
    Record,
    SearchQuery,
    encode_key,
    load_database,
    load_database_file,
    pad_to_power_of_two,
)
from .decompose import (
    AncillaLease,
    StateContract,
    decompose_toffoli,
    lower_circuit,
    mcz_ladder,
    shared_control_layer,
    sync_touch,
)
from .grover import (
    SearchMode,
    SearchPlan,
    SearchResult,
    SearchStatus,
    SearchTrace,
    build_diffusion,
    build_kernel_circuits,
    build_target_reflection,
    optimal_iterations,
    run_search,
    success_probability_formula,
)
from .qdam import (
    NaiveLayout,
    QdamLayout,
    build_m1,
    build_m2,
    build_naive_qdam,
    build_qdam,
)
from .resources import (
    BenchRow,
    ReportMode,
    ResourceReport,
    bench_csv,
    bench_scaling,
    estimate_bounds,
    measure,
    measure_kernel,
    measure_naive,
)
from .sim import (
    SparseState,
    apply_circuit,
    basis_pattern,
    dense_statevector,
    index_distribution,
)

__version__ = "0.1.0"
