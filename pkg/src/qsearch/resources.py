"""Resource accounting: closed-form bounds, scheduler measurements, and
scaling benches against the naive loader.

Bound mode reports the constructive inequalities as equalities -- loader
4n (4(n-1) for the index coupling plus 4 for the load block), reflections
6(m-1) and 6(n-1) with degenerate clamps (0 at width <= 2, 3 at width 3),
kernel = 2*loader + reflections, cost = iterations * kernel.  Measured
mode schedules the actual lowered circuits and must come in at or under
the bounds, subroutine by subroutine.
"""
from __future__ import annotations

import enum
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import resource_tally, tally_flat
from .decompose import fragment_template, lower_circuit
from .errors import InputError
from .grover import (
    KernelCircuits,
    build_diffusion,
    build_kernel_circuits,
    build_target_reflection,
    optimal_iterations,
)
from .qdam import NaiveLayout, QdamLayout, build_naive_qdam

CSV_HEADER = "N,K,td_opt,td_naive,tcost_opt,tcost_naive"


class ReportMode(enum.Enum):
    BOUND_FORMULA = "bound"
    MEASURED = "measured"
    NAIVE_MEASURED = "naive"


@dataclass(frozen=True)
class ResourceReport:
    n: int
    m: int
    database_size: int
    t_depth_m1: int
    t_depth_m2: int
    t_depth_qdam: int
    t_depth_oracle_reflection: int
    t_depth_diffusion: int
    t_depth_kernel: int
    query_count: int
    t_cost: int
    mode: ReportMode
    qubit_total: int
    t_count_total: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "N": self.database_size,
            "t_depth_m1": self.t_depth_m1,
            "t_depth_m2": self.t_depth_m2,
            "t_depth_qdam": self.t_depth_qdam,
            "t_depth_oracle_reflection": self.t_depth_oracle_reflection,
            "t_depth_diffusion": self.t_depth_diffusion,
            "t_depth_kernel": self.t_depth_kernel,
            "query_count": self.query_count,
            "t_cost": self.t_cost,
            "mode": self.mode.value,
            "qubit_total": self.qubit_total,
            "t_count_total": self.t_count_total,
        }

    def to_csv(self) -> str:
        doc = self.to_json()
        header = ",".join(doc)
        row = ",".join(str(v) for v in doc.values())
        return f"{header}\n{row}\n"


def reflection_depth_bound(width: int) -> int:
    """Multi-control phase-flip T-depth bound with degenerate clamps."""
    if width <= 2:
        return 0
    if width == 3:
        return 3
    return 6 * (width - 1)


def _reflection_toffoli_equivalents(width: int) -> int:
    if width <= 2:
        return 0
    if width == 3:
        return 1
    return 2 * width - 5


def estimate_bounds(n: int, m: int) -> ResourceReport:
    """Closed-form report; the constructive inequalities taken as equalities."""
    if n < 1 or m < 1:
        raise InputError("widths must be positive")
    big_n = 1 << n
    td_m1 = 4 * (n - 1)
    td_m2 = 4
    td_qdam = 4 * n
    td_oracle = reflection_depth_bound(m)
    td_diff = reflection_depth_bound(n)
    td_kernel = 2 * td_qdam + td_oracle + td_diff
    k = optimal_iterations(big_n)
    loader_toffolis = (big_n - 2) + m * big_n
    kernel_t_count = 7 * (
        2 * loader_toffolis
        + _reflection_toffoli_equivalents(m)
        + _reflection_toffoli_equivalents(n)
    )
    return ResourceReport(
        n=n,
        m=m,
        database_size=big_n,
        t_depth_m1=td_m1,
        t_depth_m2=td_m2,
        t_depth_qdam=td_qdam,
        t_depth_oracle_reflection=td_oracle,
        t_depth_diffusion=td_diff,
        t_depth_kernel=td_kernel,
        query_count=k,
        t_cost=k * td_kernel,
        mode=ReportMode.BOUND_FORMULA,
        qubit_total=QdamLayout(n, m).total_qubits,
        t_count_total=kernel_t_count,
    )


def _zero_keys(n: int, m: int) -> list[str]:
    """Content-free key patterns for structure-only measurements; the gate
    structure does not depend on key bits."""
    return ["0" * m] * (1 << n)


def measure_kernel(circuits: KernelCircuits, iterations: int) -> ResourceReport:
    """Schedule the lowered subroutines of one kernel and tally them."""
    layout = circuits.layout
    ladder = layout.ladder_qubits()
    t_m1 = resource_tally(lower_circuit(circuits.stage1, ladder))
    t_m2 = resource_tally(lower_circuit(circuits.stage2, ladder))
    t_loader = resource_tally(lower_circuit(circuits.loader, ladder))
    t_oracle = resource_tally(lower_circuit(circuits.target_reflection, ladder))
    t_diff = resource_tally(lower_circuit(circuits.diffusion, ladder))
    t_kernel = resource_tally(lower_circuit(circuits.kernel(), ladder))
    return ResourceReport(
        n=layout.n,
        m=layout.m,
        database_size=1 << layout.n,
        t_depth_m1=t_m1.t_depth,
        t_depth_m2=t_m2.t_depth,
        t_depth_qdam=t_loader.t_depth,
        t_depth_oracle_reflection=t_oracle.t_depth,
        t_depth_diffusion=t_diff.t_depth,
        t_depth_kernel=t_kernel.t_depth,
        query_count=iterations,
        t_cost=iterations * t_kernel.t_depth,
        mode=ReportMode.MEASURED,
        qubit_total=layout.total_qubits,
        t_count_total=t_kernel.t_count,
    )


def measure(n: int, m: int, iterations: int | None = None) -> ResourceReport:
    """Measured report for the optimized kernel at the given widths."""
    if n < 1 or m < 1:
        raise InputError("widths must be positive")
    layout = QdamLayout(n, m)
    keys = _zero_keys(n, m)
    circuits = build_kernel_circuits(layout, keys, "0" * m)
    k = iterations if iterations is not None else optimal_iterations(1 << n)
    return measure_kernel(circuits, k)


def _expand_flat(macro_circuit, ladder_flat: tuple[int, ...]):
    """Expand macros at the flat-index level, streaming.  Uses the
    canonical fragment templates, so it lowers exactly like
    :func:`qsearch.decompose.lower_gates` but without building gate
    objects for multi-million-gate circuits."""
    from .circuit import GateKind as K

    tof_template = fragment_template(K.TOFFOLI)
    ccz_template = fragment_template(K.MCZ)
    base = macro_circuit._base
    for g in macro_circuit.gates:
        flats = tuple(base[q.register] + q.offset for q in g.qubits)
        if g.kind is K.TOFFOLI:
            for kind, pos in tof_template:
                yield kind, tuple(flats[p] for p in pos)
        elif g.kind is K.MCZ:
            if len(flats) == 3:
                for kind, pos in ccz_template:
                    yield kind, tuple(flats[p] for p in pos)
            else:
                free = tuple(a for a in ladder_flat if a not in flats)
                chain = len(flats) - 3
                acc = flats[0]
                ups = []
                for i in range(chain):
                    ups.append((acc, flats[i + 1], free[i]))
                    acc = free[i]
                for trip in ups:
                    for kind, pos in tof_template:
                        yield kind, tuple(trip[p] for p in pos)
                apex = (acc, flats[-2], flats[-1])
                for kind, pos in ccz_template:
                    yield kind, tuple(apex[p] for p in pos)
                for trip in reversed(ups):
                    for kind, pos in tof_template:
                        yield kind, tuple(trip[p] for p in pos)
        else:
            yield g.kind, flats


def _naive_loader_tally(n: int, m: int):
    """Streaming tally of the lowered naive loader (it can be millions of
    gates, so never materialize the lowered list)."""
    layout = NaiveLayout(n, m)
    macro = build_naive_qdam(layout, _zero_keys(n, m))
    total = sum(layout.register_sizes.values())
    base = macro._base
    ladder_flat = tuple(
        base[q.register] + q.offset for q in layout.ladder_qubits()
    )
    return tally_flat(_expand_flat(macro, ladder_flat), total), layout


def measure_naive(n: int, m: int, iterations: int | None = None) -> ResourceReport:
    """Measured report with the naive loader substituted for the optimized
    one.  The kernel depth is composed per subroutine (2*loader + both
    reflections); scheduling the multi-million-gate concatenation twice
    would add nothing but runtime."""
    if n < 1 or m < 1:
        raise InputError("widths must be positive")
    tally, layout = _naive_loader_tally(n, m)
    ref_layout = QdamLayout(n, m)
    ladder = ref_layout.ladder_qubits()
    t_oracle = resource_tally(
        lower_circuit(build_target_reflection(ref_layout, "0" * m), ladder)
    )
    t_diff = resource_tally(lower_circuit(build_diffusion(ref_layout), ladder))
    k = iterations if iterations is not None else optimal_iterations(1 << n)
    kernel_depth = 2 * tally.t_depth + t_oracle.t_depth + t_diff.t_depth
    return ResourceReport(
        n=n,
        m=m,
        database_size=1 << n,
        t_depth_m1=0,
        t_depth_m2=tally.t_depth,
        t_depth_qdam=tally.t_depth,
        t_depth_oracle_reflection=t_oracle.t_depth,
        t_depth_diffusion=t_diff.t_depth,
        t_depth_kernel=kernel_depth,
        query_count=k,
        t_cost=k * kernel_depth,
        mode=ReportMode.NAIVE_MEASURED,
        qubit_total=sum(layout.register_sizes.values()),
        t_count_total=2 * tally.t_count + t_oracle.t_count + t_diff.t_count,
    )


@dataclass(frozen=True)
class BenchRow:
    database_size: int
    iterations: int
    t_depth_optimized: int
    t_depth_naive: int
    t_cost_optimized: int
    t_cost_naive: int

    def to_csv_row(self) -> str:
        return (
            f"{self.database_size},{self.iterations},{self.t_depth_optimized},"
            f"{self.t_depth_naive},{self.t_cost_optimized},{self.t_cost_naive}"
        )


MAX_BENCH_N = 12


def bench_scaling(n_values: Iterable[int], m: int) -> list[BenchRow]:
    """Measured loader depths and kernel costs, optimized vs naive, one row
    per index width.  Resource mode only: nothing is simulated."""
    rows: list[BenchRow] = []
    for n in n_values:
        if not 1 <= n <= MAX_BENCH_N:
            raise InputError(f"bench supports 1 <= n <= {MAX_BENCH_N}, got {n}")
        opt = measure(n, m)
        naive = measure_naive(n, m)
        rows.append(
            BenchRow(
                database_size=1 << n,
                iterations=opt.query_count,
                t_depth_optimized=opt.t_depth_qdam,
                t_depth_naive=naive.t_depth_qdam,
                t_cost_optimized=opt.t_cost,
                t_cost_naive=naive.t_cost,
            )
        )
    return rows


def bench_csv(rows: Sequence[BenchRow]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for row in rows:
        out.write(row.to_csv_row() + "\n")
    return out.getvalue()
