"""Dense state-vector register.

Qubit ordering is big-endian: physical index 0 is the leftmost symbol of a
ket, so for ``n`` qubits the basis string ``b_0 b_1 ... b_{n-1}`` sits at
amplitude index ``sum(b_k << (n - 1 - k))``.  Reshaping the amplitude array to
``(2,) * n`` therefore gives a tensor whose axis ``k`` is qubit ``k``.

States are immutable: every operation returns a new :class:`StateVector`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    DimensionMismatchError,
    QubitIndexError,
)

MAX_QUBITS = 24
NORM_TOL = 1e-12

_SQRT1_2 = 1 / np.sqrt(2)

GATE_MATRICES = {
    "H": np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
GATE_KINDS = ("H", "X", "Y", "Z", "CNOT")


class LabelMap:
    """Bijection between qubit names and physical indices.

    The map is ordered: ``names[i]`` is the label of physical qubit ``i``.
    """

    __slots__ = ("_names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        index = {name: i for i, name in enumerate(names)}
        if len(index) != len(names):
            raise ValueError(f"duplicate qubit labels in {names}")
        self._names = names
        self._index = index

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self):
        return iter(self._names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelMap) and self._names == other._names

    def __hash__(self) -> int:
        return hash(self._names)

    def __repr__(self) -> str:
        return f"LabelMap({list(self._names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no qubit labelled {name!r}; have {list(self._names)}") from None

    def indices(self, names: Iterable[str]) -> tuple[int, ...]:
        return tuple(self.index(n) for n in names)

    def remove(self, indices: Iterable[int]) -> "LabelMap":
        """Drop the given physical indices; survivors keep their relative order."""
        drop = set(indices)
        return LabelMap(n for i, n in enumerate(self._names) if i not in drop)

    def concat(self, other: "LabelMap") -> "LabelMap":
        return LabelMap(self._names + other._names)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over ``n_qubits`` qubits, optionally bound to labels.

    ``valid`` is False only for placeholder residuals of zero-probability
    measurement branches, whose amplitudes are all zero.
    """

    amps: np.ndarray
    labels: LabelMap | None = None
    valid: bool = field(default=True)

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        size = amps.size
        if size < 1 or size & (size - 1):
            raise DimensionMismatchError(f"amplitude count {size} is not a power of two")
        n = size.bit_length() - 1
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds capacity {MAX_QUBITS}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        labels = self.labels
        if labels is not None:
            if not isinstance(labels, LabelMap):
                labels = LabelMap(labels)
            if len(labels) != n:
                raise DimensionMismatchError(f"{len(labels)} labels for {n} qubits")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def n_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    def tensor(self) -> np.ndarray:
        """Read-only view shaped ``(2,) * n_qubits``."""
        return self.amps.reshape((2,) * self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amps / nrm, self.labels)

    def index_of(self, name: str) -> int:
        if self.labels is None:
            raise KeyError(f"state carries no labels; cannot resolve {name!r}")
        return self.labels.index(name)

    def with_labels(self, labels: Iterable[str] | LabelMap | None) -> "StateVector":
        return StateVector(self.amps, labels, self.valid)

    def amplitude(self, bits: str) -> complex:
        """Amplitude of a basis string such as ``"0110"`` (qubit 0 first)."""
        if len(bits) != self.n_qubits:
            raise DimensionMismatchError(f"basis string {bits!r} has wrong length")
        return complex(self.amps[int(bits, 2)])

    def __repr__(self) -> str:
        lab = "" if self.labels is None else f", labels={list(self.labels)}"
        return f"StateVector(n_qubits={self.n_qubits}{lab})"


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if self.kind == "CNOT":
            if len(targets) != 2:
                raise ValueError("CNOT takes (control, target)")
            if targets[0] == targets[1]:
                raise QubitIndexError("CNOT control and target must differ")
        elif len(targets) != 1:
            raise ValueError(f"{self.kind} takes exactly one target")


def H(q: int) -> GateOp:
    return GateOp("H", (q,))


def CNOT(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (control, target))


def _check_index(n: int, *qubits: int) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit index {q} out of range for {n} qubits")


def init_zero(n: int, labels: Iterable[str] | None = None) -> StateVector:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"register size must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps, labels)


def basis_state(bits: str, labels: Iterable[str] | None = None) -> StateVector:
    n = len(bits)
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"register size must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps, labels)


def apply_matrix(s: StateVector, matrix: np.ndarray, qubit: int) -> StateVector:
    """Apply an arbitrary 2x2 operator to one qubit."""
    n = s.n_qubits
    _check_index(n, qubit)
    out = np.tensordot(np.asarray(matrix, dtype=complex), s.tensor(), axes=([1], [qubit]))
    out = np.moveaxis(out, 0, qubit)
    return StateVector(out.reshape(-1), s.labels, s.valid)


def apply_gate(s: StateVector, g: GateOp) -> StateVector:
    n = s.n_qubits
    _check_index(n, *g.targets)
    if g.kind != "CNOT":
        return apply_matrix(s, GATE_MATRICES[g.kind], g.targets[0])
    control, target = g.targets
    t = np.array(s.tensor())
    sel = [slice(None)] * n
    sel[control] = 1
    # with the control axis fixed, the target axis shifts left if it came after it
    sub = t[tuple(sel)]
    axis = target if target < control else target - 1
    t[tuple(sel)] = np.flip(sub, axis=axis).copy()
    return StateVector(t.reshape(-1), s.labels, s.valid)


def apply_circuit(s: StateVector, gates: Iterable[GateOp]) -> StateVector:
    for g in gates:
        s = apply_gate(s, g)
    return s


def tensor(a: StateVector, b: StateVector) -> StateVector:
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds capacity {MAX_QUBITS}")
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = a.labels.concat(b.labels)
    return StateVector(np.kron(a.amps, b.amps), labels)


def tensor_all(states: Sequence[StateVector]) -> StateVector:
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def permute(s: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder qubits so that new qubit ``k`` is old qubit ``order[k]``."""
    n = s.n_qubits
    if sorted(order) != list(range(n)):
        raise QubitIndexError(f"{order} is not a permutation of range({n})")
    t = np.transpose(s.tensor(), order)
    labels = None if s.labels is None else LabelMap(s.labels.names[i] for i in order)
    return StateVector(t.reshape(-1), labels, s.valid)


def reorder_to(s: StateVector, names: Sequence[str]) -> StateVector:
    """Permute a labelled state into the given label order."""
    if s.labels is None:
        raise KeyError("state carries no labels")
    return permute(s, [s.labels.index(n) for n in names])


def inner(a: StateVector, b: StateVector) -> complex:
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(f"{a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for pure states, clipped to [0, 1]."""
    f = abs(inner(a, b)) ** 2
    return float(min(max(f, 0.0), 1.0))


def reduced_density(s: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Density matrix of the listed qubits (in the listed order), tracing out the rest."""
    n = s.n_qubits
    _check_index(n, *qubits)
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"repeated qubits in {qubits}")
    rest = [q for q in range(n) if q not in qubits]
    m = np.transpose(s.tensor(), list(qubits) + rest).reshape(2 ** len(qubits), -1)
    return m @ m.conj().T


def state_fidelity_with_density(rho: np.ndarray, target: StateVector) -> float:
    """<t|rho|t> for a pure target."""
    t = target.amps
    if rho.shape != (t.size, t.size):
        raise DimensionMismatchError(f"density {rho.shape} vs target of size {t.size}")
    f = float(np.real(np.vdot(t, rho @ t)))
    return min(max(f, 0.0), 1.0)


def schmidt_rank(s: StateVector, qubits: Sequence[int], tol: float = 1e-10) -> int:
    """Number of Schmidt coefficients above ``tol`` across the cut (qubits | rest)."""
    n = s.n_qubits
    _check_index(n, *qubits)
    rest = [q for q in range(n) if q not in qubits]
    m = np.transpose(s.tensor(), list(qubits) + rest).reshape(2 ** len(qubits), -1)
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol))
