"""Builders for the unary-indexed data loader and its naive baseline.

The optimized loader runs in two stages:

* stage 1 couples the n binary index qubits to 2^n one-hot qubits: an X on
  one-hot offset 0, then for l = 1..n a block of 2^(l-1) Toffolis sharing
  the binary qubit of weight 2^(l-1) (CNOTs at l = 1, where the lone
  control is deterministically set), each block followed by clearing CNOTs
  from the new hot candidates back to their sources.  Binary value v ends
  up with one-hot offset v hot.
* stage 2 loads the key bits: the database region is prepared with X gates
  matching the classical record bits, then for every record i and bit j a
  Toffoli (one-hot i AND database bit (i,j)) writes a load ancilla E(i,j),
  and CNOT fan-in copies E into the data register.  All m*2^n Toffolis act
  on disjoint triples after control fan-out, so the whole block costs one
  Toffoli of T-depth.  The E ancillas keep their (branch-deterministic)
  values until the inverse loader uncomputes them.

Emission order is chosen so the lowered blocks merge their T layers: the
clearing CNOTs leave all one-hot qubits last-touched in a common scheduler
layer, which in turn lets every stage-2 group share its three T layers.

The naive baseline writes each record bit with a multi-controlled X over
all n index qubits plus the database bit, sequentially; it exists to
witness the exponential T-depth separation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import (
    Circuit,
    Gate,
    GateKind,
    QubitId,
    Register,
    gate,
    q_ancilla,
    q_data,
    q_database,
    q_index,
    q_onehot,
)
from .database import Database
from .decompose import (
    AncillaLease,
    StateContract,
    mcz_ladder,
    shared_control_layer,
    sync_touch,
)
from .errors import CircuitError

_K = GateKind


@dataclass(frozen=True)
class QdamLayout:
    """Qubit allocation for the optimized loader.

    Ancilla region, in offset order: m*2^n load qubits (E), then the
    fan-out pool, then the ladder pool used by the reflections.
    """

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise CircuitError("layout needs n >= 1 and m >= 1")

    @property
    def onehot_size(self) -> int:
        return 1 << self.n

    @property
    def database_qubits(self) -> int:
        return self.m << self.n

    @property
    def load_ancillas(self) -> int:
        return self.m << self.n

    @property
    def fanout_ancillas(self) -> int:
        return max(1 << (self.n - 1), self.m << self.n) - 1

    @property
    def ladder_ancillas(self) -> int:
        return max(0, max(self.n, self.m) - 2)

    @property
    def register_sizes(self) -> dict[Register, int]:
        return {
            Register.BINARY_INDEX: self.n,
            Register.ONEHOT_INDEX: self.onehot_size,
            Register.DATA: self.m,
            Register.DATABASE: self.database_qubits,
            Register.ANCILLA: self.load_ancillas + self.fanout_ancillas
            + self.ladder_ancillas,
        }

    @property
    def total_qubits(self) -> int:
        return sum(self.register_sizes.values())

    # -- named qubits ------------------------------------------------------

    def database_qubit(self, record: int, bit: int) -> QubitId:
        return q_database(record * self.m + bit)

    def load_qubit(self, record: int, bit: int) -> QubitId:
        return q_ancilla(record * self.m + bit)

    def fanout_qubit(self, k: int) -> QubitId:
        return q_ancilla(self.load_ancillas + k)

    def ladder_qubit(self, k: int) -> QubitId:
        return q_ancilla(self.load_ancillas + self.fanout_ancillas + k)

    def fanout_lease(self, start: int, count: int) -> AncillaLease:
        if start + count > self.fanout_ancillas:
            raise CircuitError("fan-out pool exhausted")
        return AncillaLease(
            tuple(self.fanout_qubit(start + i) for i in range(count))
        )

    def ladder_qubits(self) -> tuple[QubitId, ...]:
        return tuple(self.ladder_qubit(i) for i in range(self.ladder_ancillas))

    def empty_circuit(self) -> Circuit:
        return Circuit(self.register_sizes)

    @classmethod
    def for_database(cls, db: Database) -> "QdamLayout":
        if not db.is_power_of_two:
            raise CircuitError("pad the database to a power of two first")
        return cls(n=max(db.index_bits, 1), m=db.key_width)


@dataclass(frozen=True)
class NaiveLayout:
    """Allocation for the baseline loader: no one-hot or load region, just
    enough ladder ancillas for (n+1)-control flips."""

    n: int
    m: int

    @property
    def database_qubits(self) -> int:
        return self.m << self.n

    @property
    def ladder_ancillas(self) -> int:
        return max(0, self.n - 1)

    @property
    def register_sizes(self) -> dict[Register, int]:
        return {
            Register.BINARY_INDEX: self.n,
            Register.ONEHOT_INDEX: 0,
            Register.DATA: self.m,
            Register.DATABASE: self.database_qubits,
            Register.ANCILLA: self.ladder_ancillas,
        }

    def database_qubit(self, record: int, bit: int) -> QubitId:
        return q_database(record * self.m + bit)

    def ladder_qubits(self) -> tuple[QubitId, ...]:
        return tuple(q_ancilla(i) for i in range(self.ladder_ancillas))


def _key_bits(layout_n: int, layout_m: int, source: Database | Sequence[str]) -> list[str]:
    if isinstance(source, Database):
        keys = source.keys()
        if len(keys) != 1 << layout_n or source.key_width != layout_m:
            raise CircuitError("database shape does not match the layout")
        return keys
    keys = list(source)
    if len(keys) != 1 << layout_n or any(len(k) != layout_m for k in keys):
        raise CircuitError("key patterns do not match the layout")
    return keys


def build_m1(layout: QdamLayout) -> Circuit:
    """Stage 1: |v>|0...0> -> |v>|one-hot at offset v>."""
    n = layout.n
    gates: list[Gate] = [gate(_K.X, q_onehot(0))]
    for level in range(1, n + 1):
        span = 1 << (level - 1)
        ctrl = q_index(n - level)  # weight 2^(level-1)
        if level == 1:
            gates.append(gate(_K.CNOT, ctrl, q_onehot(1)))
        else:
            pairs = [(q_onehot(j), q_onehot(j + span)) for j in range(span)]
            gates.extend(
                shared_control_layer(ctrl, pairs, layout.fanout_lease(0, span - 1))
            )
        for j in range(span):
            gates.append(gate(_K.CNOT, q_onehot(j + span), q_onehot(j)))
    return Circuit(layout.register_sizes, gates, validate=False)


def build_m2(layout: QdamLayout, db: Database | Sequence[str]) -> Circuit:
    """Stage 2: prepare the database region and load key bits into data
    qubits through the one-hot register."""
    keys = _key_bits(layout.n, layout.m, db)
    n, m = layout.n, layout.m
    records = 1 << n
    gates: list[Gate] = []
    for i, key in enumerate(keys):
        for j, bit in enumerate(key):
            if bit == "1":
                gates.append(gate(_K.X, layout.database_qubit(i, j)))
    for i in range(records):
        pairs = [
            (layout.database_qubit(i, j), layout.load_qubit(i, j))
            for j in range(m)
        ]
        lease = layout.fanout_lease(i * (m - 1), m - 1) if m > 1 else AncillaLease(())
        gates.extend(shared_control_layer(q_onehot(i), pairs, lease))
    for j in range(m):
        column = [layout.load_qubit(i, j) for i in range(records)]
        gates.extend(_fold_fan_in(column, q_data(j)))
    return Circuit(layout.register_sizes, gates, validate=False)


def _fold_fan_in(column: list[QubitId], target: QubitId) -> list[Gate]:
    """XOR the (power-of-two) column into ``target`` by folding the column
    onto its first qubit, copying out, and unfolding.

    A sequential fan-in chain would do the same job, but its reverse
    staggers the column's scheduler timing across 2^n layers, which in the
    inverse loader would smear the uncompute Toffolis' T gates over as many
    layers.  The fold tree's final unfold round touches every column qubit
    in a single layer, so the inverse loader re-enters time-aligned.
    """
    k = len(column)
    gates: list[Gate] = []
    span = 1
    while span < k:
        for i in range(0, k, 2 * span):
            gates.append(gate(_K.CNOT, column[i + span], column[i]))
        span <<= 1
    gates.append(gate(_K.CNOT, column[0], target))
    while span > 1:
        span >>= 1
        for i in range(0, k, 2 * span):
            gates.append(gate(_K.CNOT, column[i + span], column[i]))
    return gates


def build_qdam(layout: QdamLayout, db: Database | Sequence[str]) -> Circuit:
    """Full loader: stage 1 then stage 2."""
    return build_m1(layout) + build_m2(layout, db)


def build_naive_qdam(
    layout: NaiveLayout, db: Database | Sequence[str]
) -> Circuit:
    """Baseline loader: one (n+1)-control X per record bit, sequential."""
    keys = _key_bits(layout.n, layout.m, db)
    n, m = layout.n, layout.m
    gates: list[Gate] = []
    for i, key in enumerate(keys):
        for j, bit in enumerate(key):
            if bit == "1":
                gates.append(gate(_K.X, layout.database_qubit(i, j)))
    index_qubits = [q_index(b) for b in range(n)]
    ladder = layout.ladder_qubits()
    for i, key in enumerate(keys):
        pattern = format(i, f"0{n}b")
        conjugate = [
            gate(_K.X, index_qubits[b]) for b in range(n) if pattern[b] == "0"
        ]
        gates.extend(conjugate)
        for j in range(m):
            target = q_data(j)
            gates.append(gate(_K.H, target))
            gates.extend(
                mcz_ladder(
                    (*index_qubits, layout.database_qubit(i, j), target), ladder
                )
            )
            gates.append(gate(_K.H, target))
        gates.extend(conjugate)
    return Circuit(layout.register_sizes, gates, validate=False)
