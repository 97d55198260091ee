"""Bell-basis measurement of a qubit pair inside a larger register."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import QubitIndexError
from .statevec import NORM_TOL, StateVector

_S = 1 / np.sqrt(2)


class BellOutcome(enum.Enum):
    """The four Bell vectors, declared in canonical order Phi+ < Phi- < Psi+ < Psi-."""

    PhiPlus = "Phi+"
    PhiMinus = "Phi-"
    PsiPlus = "Psi+"
    PsiMinus = "Psi-"

    @property
    def symbol(self) -> str:
        return self.value

    @property
    def rank(self) -> int:
        return _ORDER.index(self)

    @property
    def vector(self) -> np.ndarray:
        """Amplitudes over |00>, |01>, |10>, |11> (first qubit of the pair leftmost)."""
        return BELL_VECTORS[self.rank]

    @classmethod
    def parse(cls, text: str) -> "BellOutcome":
        t = text.strip()
        for o in cls:
            if t in (o.value, o.name):
                return o
        raise ValueError(f"unknown Bell outcome {text!r}; expected one of Phi+, Phi-, Psi+, Psi-")

    def __lt__(self, other):
        if not isinstance(other, BellOutcome):
            return NotImplemented
        return self.rank < other.rank


_ORDER = tuple(BellOutcome)

BELL_VECTORS = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, _S, 0],
        [0, _S, -_S, 0],
    ],
    dtype=complex,
)
BELL_VECTORS.flags.writeable = False


@dataclass(frozen=True)
class MeasurementResult:
    outcome: BellOutcome
    probability: float
    residual: StateVector


def _check_pair(s: StateVector, q1: int, q2: int) -> None:
    n = s.n_qubits
    if n < 2:
        raise QubitIndexError(f"Bell measurement needs at least 2 qubits, got {n}")
    for q in (q1, q2):
        if not 0 <= q < n:
            raise QubitIndexError(f"qubit index {q} out of range for {n} qubits")
    if q1 == q2:
        raise QubitIndexError(f"Bell measurement needs two distinct qubits, got {q1} twice")


def pair_matrix(s: StateVector, q1: int, q2: int) -> np.ndarray:
    """Amplitudes reshaped to (4, 2**(n-2)): rows index the (q1, q2) basis state."""
    n = s.n_qubits
    rest = [q for q in range(n) if q not in (q1, q2)]
    return np.transpose(s.tensor(), [q1, q2] + rest).reshape(4, -1)


def project(s: StateVector, q1: int, q2: int, outcome: BellOutcome) -> np.ndarray:
    """Unnormalized amplitudes of <bell|_{q1 q2} |s> over the remaining qubits."""
    _check_pair(s, q1, q2)
    return outcome.vector.conj() @ pair_matrix(s, q1, q2)


def _residual(s: StateVector, q1: int, q2: int, amps: np.ndarray, prob: float) -> StateVector:
    labels = None if s.labels is None else s.labels.remove((q1, q2))
    if prob <= 0.0:
        return StateVector(np.zeros_like(amps), labels, valid=False)
    return StateVector(amps / np.sqrt(prob), labels)


def bsm_branches(s: StateVector, q1: int, q2: int) -> list[MeasurementResult]:
    _check_pair(s, q1, q2)
    projected = BELL_VECTORS.conj() @ pair_matrix(s, q1, q2)
    probs = np.sum(np.abs(projected) ** 2, axis=1)
    results = []
    for outcome, amps, p in zip(_ORDER, projected, probs):
        p = float(p)
        if p < NORM_TOL**2:
            p = 0.0
        results.append(MeasurementResult(outcome, p, _residual(s, q1, q2, amps, p)))
    return results


def measure_forced(s: StateVector, q1: int, q2: int, outcome: BellOutcome) -> MeasurementResult:
    """Collapse onto one chosen outcome without computing the other three."""
    amps = project(s, q1, q2, outcome)
    p = float(np.vdot(amps, amps).real)
    if p < NORM_TOL**2:
        p = 0.0
    return MeasurementResult(outcome, p, _residual(s, q1, q2, amps, p))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def bsm_sample(s: StateVector, q1: int, q2: int, rng_seed) -> MeasurementResult:
    """Draw one outcome with Born-rule probabilities.

    ``rng_seed`` is an integer seed or an existing ``numpy.random.Generator``
    (the latter lets a caller chain several measurements on one stream).
    Only the drawn branch's residual is built.
    """
    _check_pair(s, q1, q2)
    m = pair_matrix(s, q1, q2)
    projected = BELL_VECTORS.conj() @ m
    p = np.sum(np.abs(projected) ** 2, axis=1)
    k = int(_as_rng(rng_seed).choice(4, p=p / p.sum()))
    return MeasurementResult(_ORDER[k], float(p[k]), _residual(s, q1, q2, projected[k], float(p[k])))


def sample_outcomes(s: StateVector, q1: int, q2: int, rng_seed, size: int) -> list[BellOutcome]:
    """``size`` independent draws on fresh copies of ``s``.

    Consumes the random stream exactly like ``size`` successive
    :func:`bsm_sample` calls on the same generator.
    """
    _check_pair(s, q1, q2)
    p = np.sum(np.abs(BELL_VECTORS.conj() @ pair_matrix(s, q1, q2)) ** 2, axis=1)
    ks = _as_rng(rng_seed).choice(4, p=p / p.sum(), size=size)
    return [_ORDER[k] for k in ks]


def embed(outcome: BellOutcome, residual: StateVector, q1: int, q2: int) -> np.ndarray:
    """Inverse of the projection layout: amplitudes of |bell>_{q1 q2} (x) residual.

    The pair is re-inserted at physical positions ``q1`` and ``q2`` of the
    ``residual.n_qubits + 2`` qubit register.
    """
    n = residual.n_qubits + 2
    full = np.multiply.outer(outcome.vector.reshape(2, 2), residual.tensor())
    rest = [q for q in range(n) if q not in (q1, q2)]
    # axis k of ``full`` is physical qubit ([q1, q2] + rest)[k]
    inverse = np.argsort([q1, q2] + rest)
    return np.transpose(full, inverse).reshape(-1)
