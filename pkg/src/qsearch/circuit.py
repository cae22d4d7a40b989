"""Gate-level circuit IR over named registers, with ASAP layer scheduling.

Conventions, fixed once so every exported pattern and unitary is
bit-reproducible:

* Qubits are addressed as ``(register, offset)``.  The global qubit order is
  register-major in the order BINARY_INDEX, ONEHOT_INDEX, DATA, DATABASE,
  ANCILLA, with offsets ascending inside each register.
* In basis labels the first qubit in that order is the most significant bit,
  so basis index ``b`` assigns qubit ``g`` the bit ``(b >> (total-1-g)) & 1``.
* TOFFOLI and MCZ are macro gates.  They are first-class in the IR so
  builders stay readable, but every metric and simulator rejects them;
  lower with :func:`qsearch.decompose.lower_circuit` first.

Scheduling is as-soon-as-possible list scheduling over the gate-dependency
DAG: a gate is placed in the earliest layer after every earlier gate that
shares one of its qubits.  Two gates may share a layer only if they act on
disjoint qubits.  The T-depth of a circuit is the number of layers that
contain at least one T or TDG gate.  All of this is a pure function of the
gate order, so results are deterministic and circuits are safe to share
across workers.
"""
from __future__ import annotations

import enum
import json
import os
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import CircuitError, DenseCapError, MacroGateError, OperandOverlapError

DEFAULT_DENSE_CAP = 14
_DENSE_CAP_ENV = "QSEARCH_MAX_DENSE_QUBITS"


class Register(enum.Enum):
    """Named qubit regions, in global ordering."""

    BINARY_INDEX = "BINARY_INDEX"
    ONEHOT_INDEX = "ONEHOT_INDEX"
    DATA = "DATA"
    DATABASE = "DATABASE"
    ANCILLA = "ANCILLA"


REGISTER_ORDER: tuple[Register, ...] = tuple(Register)


class GateKind(enum.Enum):
    H = "H"
    X = "X"
    Z = "Z"
    S = "S"
    SDG = "SDG"
    T = "T"
    TDG = "TDG"
    CNOT = "CNOT"
    CZ = "CZ"
    TOFFOLI = "TOFFOLI"  # macro
    MCZ = "MCZ"  # macro, arity >= 2


LOWERED_KINDS = frozenset(
    {GateKind.H, GateKind.X, GateKind.Z, GateKind.S, GateKind.SDG,
     GateKind.T, GateKind.TDG, GateKind.CNOT, GateKind.CZ}
)
MACRO_KINDS = frozenset({GateKind.TOFFOLI, GateKind.MCZ})
T_KINDS = frozenset({GateKind.T, GateKind.TDG})

_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.Z: 1, GateKind.S: 1,
    GateKind.SDG: 1, GateKind.T: 1, GateKind.TDG: 1,
    GateKind.CNOT: 2, GateKind.CZ: 2, GateKind.TOFFOLI: 3,
}

_ADJOINT = {
    GateKind.S: GateKind.SDG, GateKind.SDG: GateKind.S,
    GateKind.T: GateKind.TDG, GateKind.TDG: GateKind.T,
}

# Export names; macros use the conventional CCX / MCZ spellings.
_EXPORT_NAME = {kind: kind.value for kind in GateKind}
_EXPORT_NAME[GateKind.TOFFOLI] = "CCX"
_IMPORT_NAME = {name: kind for kind, name in _EXPORT_NAME.items()}


class QubitId(NamedTuple):
    register: Register
    offset: int

    def label(self) -> str:
        return f"{self.register.value}:{self.offset}"

    @staticmethod
    def parse(text: str) -> "QubitId":
        reg, _, off = text.partition(":")
        try:
            return QubitId(Register(reg), int(off))
        except (ValueError, KeyError) as exc:
            raise CircuitError(f"bad qubit label {text!r}") from exc


class Gate(NamedTuple):
    kind: GateKind
    qubits: tuple[QubitId, ...]


def gate(kind: GateKind, *qubits: QubitId) -> Gate:
    """Build a validated gate; controls precede the target."""
    arity = _ARITY.get(kind)
    if arity is not None and len(qubits) != arity:
        raise CircuitError(f"{kind.value} takes {arity} qubits, got {len(qubits)}")
    if kind is GateKind.MCZ and len(qubits) < 2:
        raise CircuitError("MCZ takes at least 2 qubits")
    if len(set(qubits)) != len(qubits):
        raise OperandOverlapError(f"duplicate operands in {kind.value}: {qubits}")
    return Gate(kind, tuple(qubits))


def adjoint_gate(g: Gate) -> Gate:
    return Gate(_ADJOINT.get(g.kind, g.kind), g.qubits)


class Circuit:
    """Ordered gate list over sized registers.  Immutable once built."""

    __slots__ = ("register_sizes", "gates", "_base", "_total", "_compiled")

    def __init__(
        self,
        register_sizes: Mapping[Register, int],
        gates: Iterable[Gate] = (),
        validate: bool = True,
    ):
        sizes = {reg: int(register_sizes.get(reg, 0)) for reg in REGISTER_ORDER}
        if any(v < 0 for v in sizes.values()):
            raise CircuitError("register sizes must be nonnegative")
        self.register_sizes: dict[Register, int] = sizes
        self.gates: tuple[Gate, ...] = tuple(gates)
        base = {}
        acc = 0
        for reg in REGISTER_ORDER:
            base[reg] = acc
            acc += sizes[reg]
        self._base = base
        self._total = acc
        self._compiled = None
        if validate:
            self._validate()

    def _validate(self) -> None:
        sizes = self.register_sizes
        for g in self.gates:
            if len(set(g.qubits)) != len(g.qubits):
                raise OperandOverlapError(f"duplicate operands: {g}")
            for q in g.qubits:
                if not 0 <= q.offset < sizes[q.register]:
                    raise CircuitError(
                        f"{q.label()} outside register of size {sizes[q.register]}"
                    )

    # -- shape ----------------------------------------------------------

    @property
    def total_qubits(self) -> int:
        return self._total

    @property
    def is_lowered(self) -> bool:
        return all(g.kind in LOWERED_KINDS for g in self.gates)

    def qubit_index(self, q: QubitId) -> int:
        """Global position of a qubit under the fixed register-major order."""
        return self._base[q.register] + q.offset

    def flat_gates(self) -> list[tuple[GateKind, tuple[int, ...]]]:
        base = self._base
        return [
            (g.kind, tuple(base[q.register] + q.offset for q in g.qubits))
            for g in self.gates
        ]

    def macro_counts(self) -> dict[GateKind, int]:
        counts: dict[GateKind, int] = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
        return counts

    # -- composition ----------------------------------------------------

    def __add__(self, other: "Circuit") -> "Circuit":
        if self.register_sizes != other.register_sizes:
            raise CircuitError("cannot concatenate circuits over different registers")
        return Circuit(self.register_sizes, self.gates + other.gates, validate=False)

    def inverted(self) -> "Circuit":
        """Adjoint circuit: reversed order, T<->TDG and S<->SDG swapped.

        Macro gates are self-adjoint, so inverting a macro-level circuit and
        lowering afterwards reuses the forward (depth-aligned) fragments.
        """
        return Circuit(
            self.register_sizes,
            tuple(adjoint_gate(g) for g in reversed(self.gates)),
            validate=False,
        )

    # -- export ---------------------------------------------------------

    def export_json(self) -> str:
        doc = {
            "registers": {
                reg.value: size
                for reg, size in self.register_sizes.items()
                if size > 0
            },
            "gates": [
                {"gate": _EXPORT_NAME[g.kind], "qubits": [q.label() for q in g.qubits]}
                for g in self.gates
            ],
        }
        return json.dumps(doc, indent=2) + "\n"

    @staticmethod
    def from_json(text: str) -> "Circuit":
        doc = json.loads(text)
        sizes = {Register(name): size for name, size in doc["registers"].items()}
        gates = [
            gate(_IMPORT_NAME[entry["gate"]],
                 *(QubitId.parse(q) for q in entry["qubits"]))
            for entry in doc["gates"]
        ]
        return Circuit(sizes, gates)

    # -- dense extraction -------------------------------------------------

    def to_unitary(self, max_qubits: int | None = None):
        """Dense unitary of a lowered circuit, column ordering as documented.

        Only for small circuits; above the cap (default 14 qubits, env var
        QSEARCH_MAX_DENSE_QUBITS) raises :class:`DenseCapError`.
        """
        from . import sim  # local import; sim depends on this module

        if not self.is_lowered:
            raise MacroGateError("to_unitary requires a lowered circuit")
        cap = max_qubits if max_qubits is not None else dense_cap()
        if self._total > cap:
            raise DenseCapError(
                f"{self._total} qubits exceeds dense cap {cap}; "
                "use the sparse simulator instead"
            )
        return sim.circuit_unitary(self)

    def __len__(self) -> int:
        return len(self.gates)

    def __repr__(self) -> str:
        regs = {r.value: s for r, s in self.register_sizes.items() if s > 0}
        return f"Circuit(registers={regs}, gates={len(self.gates)})"


def dense_cap() -> int:
    value = os.environ.get(_DENSE_CAP_ENV)
    if value is None:
        return DEFAULT_DENSE_CAP
    return int(value)


class ResourceTally(NamedTuple):
    """Exact gate-count and layering metrics of a lowered circuit."""

    t_count: int
    t_depth: int
    toffoli_count: int
    cnot_count: int
    total_qubits: int
    total_layers: int


def _require_lowered_kind(kind: GateKind) -> None:
    if kind in MACRO_KINDS:
        raise MacroGateError(f"{kind.value} is a macro gate; lower the circuit first")


def tally_flat(
    flat: Iterable[tuple[GateKind, tuple[int, ...]]], total_qubits: int
) -> ResourceTally:
    """ASAP-schedule a flattened gate stream and tally it in one pass."""
    avail = [0] * total_qubits
    t_layers: set[int] = set()
    t_count = cnot_count = 0
    max_layer = 0
    add_t_layer = t_layers.add
    k_t, k_tdg, k_cnot = GateKind.T, GateKind.TDG, GateKind.CNOT
    k_toffoli, k_mcz = GateKind.TOFFOLI, GateKind.MCZ
    for kind, ops in flat:
        if kind is k_toffoli or kind is k_mcz:
            raise MacroGateError(
                f"{kind.value} is a macro gate; lower the circuit first"
            )
        layer = avail[ops[0]]
        for i in ops:
            if avail[i] > layer:
                layer = avail[i]
        layer += 1
        for i in ops:
            avail[i] = layer
        if layer > max_layer:
            max_layer = layer
        if kind is k_t or kind is k_tdg:
            t_count += 1
            add_t_layer(layer)
        elif kind is k_cnot:
            cnot_count += 1
    return ResourceTally(
        t_count=t_count,
        t_depth=len(t_layers),
        toffoli_count=0,
        cnot_count=cnot_count,
        total_qubits=total_qubits,
        total_layers=max_layer,
    )


def schedule_layers(circuit: Circuit) -> list[list[Gate]]:
    """ASAP layering; gates in one layer act on pairwise disjoint qubits."""
    avail = [0] * max(circuit.total_qubits, 1)
    layers: list[list[Gate]] = []
    base = circuit._base
    for g in circuit.gates:
        _require_lowered_kind(g.kind)
        ops = [base[q.register] + q.offset for q in g.qubits]
        layer = max((avail[i] for i in ops), default=0) + 1
        for i in ops:
            avail[i] = layer
        while len(layers) < layer:
            layers.append([])
        layers[layer - 1].append(g)
    return layers


def t_depth(circuit: Circuit) -> int:
    """Number of ASAP layers containing at least one T/TDG gate."""
    return resource_tally(circuit).t_depth


def resource_tally(circuit: Circuit) -> ResourceTally:
    return tally_flat(circuit.flat_gates(), max(circuit.total_qubits, 1))


# -- register helpers used across builders --------------------------------


def q_index(offset: int) -> QubitId:
    return QubitId(Register.BINARY_INDEX, offset)


def q_onehot(offset: int) -> QubitId:
    return QubitId(Register.ONEHOT_INDEX, offset)


def q_data(offset: int) -> QubitId:
    return QubitId(Register.DATA, offset)


def q_database(offset: int) -> QubitId:
    return QubitId(Register.DATABASE, offset)


def q_ancilla(offset: int) -> QubitId:
    return QubitId(Register.ANCILLA, offset)
