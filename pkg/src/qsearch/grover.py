"""Amplitude-amplification search driver.

One kernel iteration applies loader, target reflection, inverse loader,
then the reflection about the uniform index state; both reflections carry
phase pi so the composed kernel equals the textbook amplification operator
on the index register up to a global sign.  After the loader's inverse,
everything but the binary index register is back to |0>, so iterating and
measuring the index marginal is exact.

The driver verifies its measured candidate the honest way: it re-runs the
loader on the candidate basis state, reads the data register, and compares
against the queried key.  Sentinel (padding) records are never accepted.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    Register,
    gate,
    q_data,
    q_index,
    resource_tally,
)
from .database import Database, SearchQuery, encode_key
from .decompose import lower_circuit, mcz_ladder, sync_touch
from .errors import CircuitError, InputError, QueryError
from .qdam import QdamLayout, build_qdam
from .sim import SparseState, index_distribution

_K = GateKind
REFLECTION_PHASE = math.pi  # both reflections; matching phases are required


def optimal_iterations(database_size: int) -> int:
    """Iteration count floor(pi / (4 asin(1/sqrt(N)))), at least 1."""
    if database_size < 2:
        raise InputError("search needs at least 2 records")
    theta = math.asin(1.0 / math.sqrt(database_size))
    return max(1, math.floor(math.pi / (4.0 * theta)))


def success_probability_formula(database_size: int, iterations: int) -> float:
    """Closed-form branch probability after ``iterations`` kernel rounds."""
    theta = math.asin(1.0 / math.sqrt(database_size))
    return math.sin((2 * iterations + 1) * theta) ** 2


@dataclass(frozen=True)
class SearchPlan:
    n: int
    m: int
    iterations: int
    phase: float = REFLECTION_PHASE

    @property
    def database_size(self) -> int:
        return 1 << self.n

    @classmethod
    def for_database(cls, db: Database, iterations: int | None = None) -> "SearchPlan":
        n = db.index_bits
        if not db.is_power_of_two or db.size < 2:
            raise CircuitError("plan requires a padded database with >= 2 records")
        k = iterations if iterations is not None else optimal_iterations(db.size)
        if k < 1:
            raise InputError("iteration count must be positive")
        return cls(n=n, m=db.key_width, iterations=k)


class SearchStatus(enum.Enum):
    SOLVED = "SOLVED"
    ALGORITHM_FAILURE = "ALGORITHM_FAILURE"
    KEY_NOT_PRESENT = "KEY_NOT_PRESENT"


class SearchMode(enum.Enum):
    EXACT_PROBABILITY = "exact"
    SAMPLED = "sampled"


@dataclass
class SearchTrace:
    """Per-round target amplitude magnitude, branch probability, and the
    probability left outside the decoupled (index-only) subspace."""

    target_amplitudes: list[float] = field(default_factory=list)
    success_probabilities: list[float] = field(default_factory=list)
    off_support_probabilities: list[float] = field(default_factory=list)

    def to_json(self) -> list[dict]:
        return [
            {
                "k": k,
                "target_amplitude": a,
                "success_probability": p,
                "off_support_probability": r,
            }
            for k, (a, p, r) in enumerate(
                zip(
                    self.target_amplitudes,
                    self.success_probabilities,
                    self.off_support_probabilities,
                )
            )
        ]


@dataclass
class SearchResult:
    status: SearchStatus
    candidate_index: int | None
    returned_value: str | None
    success_probability: float
    iterations: int
    oracle_calls: int
    trace: SearchTrace
    resources: "object"  # ResourceReport; typed loosely to avoid an import cycle
    peak_support: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "candidate_index": self.candidate_index,
            "returned_value": self.returned_value,
            "success_probability": self.success_probability,
            "iterations": self.iterations,
            "oracle_calls": self.oracle_calls,
            "trace": self.trace.to_json(),
            "resources": self.resources.to_json() if self.resources else None,
        }


def build_target_reflection(layout: QdamLayout, key_pattern: str) -> Circuit:
    """Phase flip of the data-register branch matching ``key_pattern``:
    X where the pattern bit is 0, a phase flip on all-ones, X again.

    Ends with a sync block over the data register (padded to a power of two
    with restored ladder ancillas): the control ladder leaves the data
    qubits' scheduler times staggered, which would otherwise smear the
    inverse loader's T layers.  The padding always fits: for m >= 3 it
    needs at most m-2 qubits and the ladder pool holds max(n, m) - 2.
    """
    if len(key_pattern) != layout.m or any(c not in "01" for c in key_pattern):
        raise QueryError(f"pattern {key_pattern!r} does not fit {layout.m} data qubits")
    flips = [gate(_K.X, q_data(j)) for j, c in enumerate(key_pattern) if c == "0"]
    ladder = mcz_ladder([q_data(j) for j in range(layout.m)], layout.ladder_qubits())
    sync_set = [q_data(j) for j in range(layout.m)]
    pad = (1 << (layout.m - 1).bit_length()) - layout.m
    sync_set.extend(layout.ladder_qubits()[:pad])
    return Circuit(
        layout.register_sizes,
        [*flips, *ladder, *flips, *sync_touch(sync_set)],
        validate=False,
    )


def build_diffusion(layout: QdamLayout) -> Circuit:
    """Reflection about the uniform index state: H then X conjugation of a
    phase flip on the all-ones index branch."""
    hs = [gate(_K.H, q_index(b)) for b in range(layout.n)]
    xs = [gate(_K.X, q_index(b)) for b in range(layout.n)]
    ladder = mcz_ladder([q_index(b) for b in range(layout.n)], layout.ladder_qubits())
    return Circuit(
        layout.register_sizes, [*hs, *xs, *ladder, *xs, *hs], validate=False
    )


@dataclass(frozen=True)
class KernelCircuits:
    """Macro-level subroutine circuits for one kernel iteration."""

    layout: QdamLayout
    stage1: Circuit
    stage2: Circuit
    target_reflection: Circuit
    diffusion: Circuit

    @property
    def loader(self) -> Circuit:
        return self.stage1 + self.stage2

    @property
    def loader_inverse(self) -> Circuit:
        return self.loader.inverted()

    def kernel(self) -> Circuit:
        return (
            self.loader
            + self.target_reflection
            + self.loader_inverse
            + self.diffusion
        )


def build_kernel_circuits(
    layout: QdamLayout, db: Database | Sequence[str], key_pattern: str
) -> KernelCircuits:
    from .qdam import build_m1, build_m2

    return KernelCircuits(
        layout=layout,
        stage1=build_m1(layout),
        stage2=build_m2(layout, db),
        target_reflection=build_target_reflection(layout, key_pattern),
        diffusion=build_diffusion(layout),
    )


def _off_index_probability(state: SparseState) -> float:
    """Probability of any branch whose non-index registers deviate from |0>."""
    shift = state.total_qubits - state.register_sizes[Register.BINARY_INDEX]
    mask = (1 << shift) - 1
    return sum(
        (a * a.conjugate()).real
        for k, a in state.amplitudes.items()
        if k & mask
    )


def run_search(
    db: Database,
    query: SearchQuery,
    plan: SearchPlan | None = None,
    mode: SearchMode = SearchMode.EXACT_PROBABILITY,
    seed: int | None = None,
    shots: int = 1,
) -> SearchResult:
    """Execute the full search: exact sparse simulation of K kernel rounds,
    index measurement, quantum re-load verification, and field return."""
    from . import resources  # local import to avoid a cycle

    query.validate(db)
    if not db.is_power_of_two:
        raise QueryError("database must be padded to a power of two")
    if db.size < 2:
        raise QueryError("search needs at least 2 records")
    if mode is SearchMode.SAMPLED and seed is None:
        raise QueryError("sampled mode needs a seed")

    plan = plan or SearchPlan.for_database(db)
    if plan.n != db.index_bits or plan.m != db.key_width:
        raise QueryError("plan does not match the database")

    layout = QdamLayout.for_database(db)
    key_pattern = encode_key(db, query.key_value)
    circuits = build_kernel_circuits(layout, db, key_pattern)
    ladder = layout.ladder_qubits()
    loader = lower_circuit(circuits.loader, ladder)
    loader_inv = lower_circuit(circuits.loader_inverse, ladder)
    oracle_reflection = lower_circuit(circuits.target_reflection, ladder)
    diffusion = lower_circuit(circuits.diffusion, ladder)

    target = db.index_of_key(query.key_value)
    n = layout.n
    big_n = 1 << n

    init = Circuit(
        layout.register_sizes,
        [gate(_K.H, q_index(b)) for b in range(n)],
        validate=False,
    )
    state = SparseState.zero(layout.register_sizes).apply(init)

    trace = SearchTrace()

    def record(st: SparseState) -> None:
        dist = index_distribution(st)
        p = float(dist[target]) if target is not None else 0.0
        trace.target_amplitudes.append(math.sqrt(p))
        trace.success_probabilities.append(p)
        trace.off_support_probabilities.append(_off_index_probability(st))

    record(state)
    oracle_calls = 0
    for _ in range(plan.iterations):
        state = state.apply(loader)
        state = state.apply(oracle_reflection)
        oracle_calls += 1
        state = state.apply(loader_inv)
        state = state.apply(diffusion)
        record(state)

    distribution = index_distribution(state)
    if mode is SearchMode.EXACT_PROBABILITY:
        candidate = int(np.argmax(distribution))
    else:
        rng = np.random.default_rng(seed)
        samples = rng.choice(big_n, size=max(1, shots), p=distribution / distribution.sum())
        counts = np.bincount(samples, minlength=big_n)
        candidate = int(np.argmax(counts))
    candidate_probability = float(distribution[candidate])

    # verification: re-load on the candidate branch and read the data register
    probe = SparseState.basis(
        layout.register_sizes, candidate << (layout.total_qubits - n)
    ).apply(loader)
    pattern = next(iter(probe.amplitudes))
    measured_bits = format(
        probe.register_bits(pattern, Register.DATA), f"0{layout.m}b"
    )

    record_obj = db.records[candidate]
    matches = measured_bits == key_pattern
    if matches and not record_obj.is_sentinel:
        status = SearchStatus.SOLVED
        returned = record_obj.values[query.return_field]
    elif target is None or db.records[target].is_sentinel:
        status = SearchStatus.KEY_NOT_PRESENT
        returned = None
    else:
        status = SearchStatus.ALGORITHM_FAILURE
        returned = None

    report = resources.measure_kernel(circuits, plan.iterations)

    return SearchResult(
        status=status,
        candidate_index=candidate,
        returned_value=returned,
        success_probability=candidate_probability,
        iterations=plan.iterations,
        oracle_calls=oracle_calls,
        trace=trace,
        resources=report,
        peak_support=state.peak_support,
    )
