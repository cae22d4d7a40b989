"""Lowering of macro gates to Clifford+T.

Three building blocks:

* :func:`decompose_toffoli` -- a 7-T fragment whose three T stages land in
  exactly three scheduler layers.  The stage boundaries are CNOT pairs that
  touch both T carriers, plus S/SDG padding on the third qubit, so the
  alignment survives arbitrary entry timing on the operands.  This matters:
  parallel fragments merge their T layers only if the stages line up.
* :func:`shared_control_layer` -- many Toffolis sharing one control, made
  disjoint by fanning the control out onto borrowed ancillas (CNOTs are
  free in T-depth).  Fan-out is by doubling rounds so every control copy is
  last touched in the same layer; a partial final round gets an S pad (with
  its SDG after the block) to stay aligned.
* :func:`mcz_ladder` -- phase flip on the all-ones subspace of k qubits:
  an AND chain of Toffolis into borrowed ancillas with a CCZ apex, then
  uncomputation.  Degenerate sizes emit Z / CZ / plain CCZ.

``lower_circuit`` expands TOFFOLI and MCZ macros using these blocks; all
emitted ancillas are returned to |0> on every input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .circuit import Circuit, Gate, GateKind, QubitId, Register, gate
from .errors import AncillaBudgetError, OperandOverlapError


class StateContract(enum.Enum):
    BORROWED_ZERO_RETURNED_ZERO = "borrowed"
    PERSISTENT = "persistent"


@dataclass(frozen=True)
class AncillaLease:
    """A slice of ancilla qubits handed to a decomposition."""

    qubits: tuple[QubitId, ...]
    state_contract: StateContract = StateContract.BORROWED_ZERO_RETURNED_ZERO

    def __len__(self) -> int:
        return len(self.qubits)


_K = GateKind


def _ccz_gates(x: QubitId, y: QubitId, z: QubitId) -> list[Gate]:
    """Doubly-controlled Z, 7 T gates in three aligned T layers, no ancilla.

    Phase polynomial (eighth turns): a + b + c + (a^b^c) - (a^b) - (b^c)
    - (a^c).  The -(a^b) term is realized as SDG+T so the first T layer
    needs only one CNOT-pair boundary; S/SDG pairs elsewhere are pure
    schedule padding and cancel exactly.
    """
    return [
        Gate(_K.CNOT, (x, y)),   # y = a^b
        Gate(_K.CNOT, (y, z)),   # z = a^b^c
        Gate(_K.CNOT, (z, x)),   # x = b^c
        Gate(_K.SDG, (y,)),
        Gate(_K.TDG, (x,)),      # -(b^c)
        Gate(_K.T, (y,)),        # SDG+T = -(a^b)
        Gate(_K.T, (z,)),        # +(a^b^c)
        Gate(_K.CNOT, (z, x)),   # x = a
        Gate(_K.CNOT, (x, y)),   # y = b
        Gate(_K.S, (z,)),
        Gate(_K.T, (x,)),        # +a
        Gate(_K.T, (y,)),        # +b
        Gate(_K.SDG, (z,)),      # cancels the S pad
        Gate(_K.CNOT, (y, z)),   # z = a^c
        Gate(_K.CNOT, (z, x)),   # x = c
        Gate(_K.S, (y,)),
        Gate(_K.T, (x,)),        # +c
        Gate(_K.TDG, (z,)),      # -(a^c)
        Gate(_K.SDG, (y,)),      # cancels the S pad
        Gate(_K.CNOT, (z, x)),   # x = a
        Gate(_K.CNOT, (x, z)),   # z = c
    ]


def _toffoli_gates(c1: QubitId, c2: QubitId, target: QubitId) -> list[Gate]:
    if len({c1, c2, target}) != 3:
        raise OperandOverlapError("Toffoli operands must be distinct")
    h = Gate(_K.H, (target,))
    return [h, *_ccz_gates(c1, c2, target), h]


def fragment_template(kind: GateKind) -> list[tuple[GateKind, tuple[int, ...]]]:
    """Lowered fragment of a macro gate as (kind, operand-position) pairs,
    for streaming flat expansion.  Positions index the macro's operand list."""
    placeholders = [QubitId(Register.ANCILLA, i) for i in range(3)]
    if kind is _K.TOFFOLI:
        frag = _toffoli_gates(*placeholders)
    elif kind is _K.MCZ:
        frag = _ccz_gates(*placeholders)
    else:
        raise OperandOverlapError(f"{kind.value} is not a macro gate")
    pos = {q: i for i, q in enumerate(placeholders)}
    return [(g.kind, tuple(pos[q] for q in g.qubits)) for g in frag]


def decompose_toffoli(c1: QubitId, c2: QubitId, target: QubitId) -> list[Gate]:
    """Lowered Toffoli fragment: 7 T gates, measured T-depth 3, no ancilla."""
    return _toffoli_gates(c1, c2, target)


def shared_control_layer(
    shared_control: QubitId,
    pairs: Sequence[tuple[QubitId, QubitId]],
    fanout_ancillas: AncillaLease | Sequence[QubitId] = (),
) -> list[Gate]:
    """Toffolis ``(second_control, shared_control) -> target`` for each pair,
    emitted so the lowered block keeps a constant T-depth.

    Returns macro-level gates (CNOT fan-out + TOFFOLI macros + fan-in).
    Needs ``len(pairs) - 1`` borrowed ancillas; they are restored to |0>.
    """
    if not pairs:
        return []
    seen = {shared_control}
    for second, target in pairs:
        for q in (second, target):
            if q in seen:
                raise OperandOverlapError(f"operand {q.label()} reused in layer")
            seen.add(q)

    ancillas = tuple(
        fanout_ancillas.qubits
        if isinstance(fanout_ancillas, AncillaLease)
        else fanout_ancillas
    )
    needed = len(pairs) - 1
    if len(ancillas) < needed:
        raise AncillaBudgetError(
            f"shared-control layer over {len(pairs)} pairs needs {needed} "
            f"fan-out ancillas, got {len(ancillas)}"
        )

    if len(pairs) == 1:
        second, target = pairs[0]
        return [gate(_K.TOFFOLI, second, shared_control, target)]

    gates: list[Gate] = []
    carriers = [shared_control]
    fresh = list(ancillas[:needed])
    pad_sdg: list[Gate] = []
    # Doubling rounds keep every carrier last-touched in the same layer; a
    # partial final round leaves some sources one layer behind, fixed by an
    # S pad whose SDG lands after the Toffoli block (controls are restored).
    while len(carriers) < len(pairs):
        room = len(pairs) - len(carriers)
        sources = carriers[: min(len(carriers), room)]
        idle = carriers[len(sources):]
        new = []
        for src in sources:
            dst = fresh.pop(0)
            gates.append(gate(_K.CNOT, src, dst))
            new.append(dst)
        if room < len(carriers):
            for q in idle:
                gates.append(gate(_K.S, q))
                pad_sdg.append(gate(_K.SDG, q))
        carriers.extend(new)

    fanout = list(gates)
    for (second, target), carrier in zip(pairs, carriers):
        gates.append(gate(_K.TOFFOLI, second, carrier, target))
    gates.extend(pad_sdg)
    for g in reversed(fanout):
        if g.kind is _K.CNOT:
            gates.append(g)
    return gates


def sync_touch(qubits: Sequence[QubitId]) -> list[Gate]:
    """CNOT-pair gossip that equalizes the scheduler's last-touch layer of
    every listed qubit.  Net identity on all of them; Clifford only, so T
    metrics are unaffected.  Requires a power-of-two qubit count (pad the
    set with spare |0> ancillas if needed; touching those is harmless).

    One round per hypercube dimension: pairing ``i`` with ``i xor r`` twice
    leaves both at the common layer max+2, so by induction all qubits end
    at the global maximum plus two layers per round.  This is what lets an
    inverse loader re-enter its uncompute Toffolis time-aligned after the
    data fan-in has staggered the load ancillas.
    """
    k = len(qubits)
    if k == 0:
        return []
    if k & (k - 1):
        raise OperandOverlapError("sync block needs a power-of-two qubit count")
    if len(set(qubits)) != k:
        raise OperandOverlapError("sync qubits must be distinct")
    gates: list[Gate] = []
    r = 1
    while r < k:
        for i in range(k):
            if not i & r:
                pair = gate(_K.CNOT, qubits[i], qubits[i | r])
                gates.append(pair)
                gates.append(pair)
        r <<= 1
    return gates


def mcz_ladder(
    qubits: Sequence[QubitId],
    ladder_ancillas: AncillaLease | Sequence[QubitId] = (),
) -> list[Gate]:
    """Phase flip of the |1...1> branch over ``qubits`` (k = c+1 qubits for a
    c-control Z).  Macro-level: chain TOFFOLIs + MCZ apex; uses k-3 borrowed
    ancillas for k >= 4, none below.
    """
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise OperandOverlapError("ladder qubits must be distinct")
    k = len(qubits)
    if k == 0:
        raise OperandOverlapError("ladder needs at least one qubit")
    if k == 1:
        return [gate(_K.Z, qubits[0])]
    if k == 2:
        return [gate(_K.CZ, qubits[0], qubits[1])]
    if k == 3:
        return [gate(_K.MCZ, *qubits)]

    ancillas = tuple(
        ladder_ancillas.qubits
        if isinstance(ladder_ancillas, AncillaLease)
        else ladder_ancillas
    )
    needed = k - 3
    if len(ancillas) < needed:
        raise AncillaBudgetError(
            f"{k - 1}-control Z needs {needed} ladder ancillas, got {len(ancillas)}"
        )
    for a in ancillas[:needed]:
        if a in qubits:
            raise OperandOverlapError("ladder ancilla overlaps an operand")

    up: list[Gate] = []
    acc = qubits[0]
    for i in range(needed):
        up.append(gate(_K.TOFFOLI, acc, qubits[i + 1], ancillas[i]))
        acc = ancillas[i]
    apex = gate(_K.MCZ, acc, qubits[k - 2], qubits[k - 1])
    return up + [apex] + [g for g in reversed(up)]


def lower_gates(
    gates: Iterable[Gate],
    ladder_ancillas: Sequence[QubitId] = (),
) -> Iterator[Gate]:
    """Expand macros to Clifford+T, streaming.

    MCZ of arity 3 becomes the direct CCZ fragment; larger MCZ gates expand
    through :func:`mcz_ladder` using ``ladder_ancillas``.
    """
    for g in gates:
        if g.kind is _K.TOFFOLI:
            yield from _toffoli_gates(*g.qubits)
        elif g.kind is _K.MCZ:
            if len(g.qubits) == 3:
                yield from _ccz_gates(*g.qubits)
            else:
                free = tuple(a for a in ladder_ancillas if a not in g.qubits)
                for sub in mcz_ladder(g.qubits, free):
                    if sub.kind is _K.TOFFOLI:
                        yield from _toffoli_gates(*sub.qubits)
                    elif sub.kind is _K.MCZ:
                        yield from _ccz_gates(*sub.qubits)
                    else:
                        yield sub
        else:
            yield g


def lower_circuit(
    circuit: Circuit, ladder_ancillas: Sequence[QubitId] = ()
) -> Circuit:
    """Lowered copy of ``circuit``; identity if already lowered."""
    if circuit.is_lowered:
        return circuit
    return Circuit(
        circuit.register_sizes,
        lower_gates(circuit.gates, ladder_ancillas),
        validate=False,
    )
