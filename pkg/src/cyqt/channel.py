"""The twelve-qubit channel, party labels and two-qubit message states.

Circuit qubits are numbered 1..12 as in the preparation circuit; physical
index = circuit number - 1 (see :func:`circuit_index`).  In that order the
labels are::

    1:B4  2:C1  3:C3  4:C4  5:A1  6:A3  7:A4  8:B1  9:B3  10:A2  11:B2  12:C2

so Alice holds circuit qubits {5, 6, 7, 10}, Bob {1, 8, 9, 11} and Charlie
{2, 3, 4, 12}.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NormalizationError
from .statevec import (
    CNOT,
    H,
    NORM_TOL,
    GateOp,
    LabelMap,
    StateVector,
    apply_circuit,
    init_zero,
    reorder_to,
)


class Party(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"
    CHARLIE = "Charlie"
    MESSAGE = "Message"


@dataclass(frozen=True)
class QubitLabel:
    party: Party
    name: str


CHANNEL_LABELS = ("B4", "C1", "C3", "C4", "A1", "A3", "A4", "B1", "B3", "A2", "B2", "C2")
MESSAGE_LABELS = ("alpha0", "alpha1", "beta0", "beta1", "gamma0", "gamma1")

_PREFIX_PARTY = {"A": Party.ALICE, "B": Party.BOB, "C": Party.CHARLIE}

QUBIT_LABELS = {
    **{name: QubitLabel(_PREFIX_PARTY[name[0]], name) for name in CHANNEL_LABELS},
    **{name: QubitLabel(Party.MESSAGE, name) for name in MESSAGE_LABELS},
}

# Alice's message sits with Alice, and so on; Party.MESSAGE marks the register kind.
MESSAGE_OWNER = {
    "alpha0": Party.ALICE, "alpha1": Party.ALICE,
    "beta0": Party.BOB, "beta1": Party.BOB,
    "gamma0": Party.CHARLIE, "gamma1": Party.CHARLIE,
}

CHANNEL_LABEL_MAP = LabelMap(CHANNEL_LABELS)


def circuit_index(k: int) -> int:
    """Physical index of circuit qubit ``k`` (1-based)."""
    if not 1 <= k <= 12:
        raise ValueError(f"circuit qubit number must be in 1..12, got {k}")
    return k - 1


def holder(name: str) -> Party:
    """Party physically holding a qubit."""
    label = QUBIT_LABELS[name]
    return MESSAGE_OWNER[name] if label.party is Party.MESSAGE else label.party


def party_qubits(party: Party) -> tuple[str, ...]:
    return tuple(n for n in CHANNEL_LABELS if QUBIT_LABELS[n].party is party)


HADAMARD_LAYER = tuple(H(circuit_index(k)) for k in (1, 4, 7, 10, 11, 12))
CNOT_LAYER = tuple(
    CNOT(circuit_index(c), circuit_index(t))
    for c, t in ((1, 2), (1, 3), (4, 5), (4, 6), (7, 8), (7, 9))
)
CHANNEL_CIRCUIT: tuple[GateOp, ...] = HADAMARD_LAYER + CNOT_LAYER


def hadamard_layer_state() -> StateVector:
    """The register after the Hadamard layer and before any CNOT."""
    return apply_circuit(init_zero(12, CHANNEL_LABELS), HADAMARD_LAYER)


def build_channel() -> StateVector:
    """Run the preparation circuit on |0...0>."""
    s = apply_circuit(init_zero(12, CHANNEL_LABELS), CHANNEL_CIRCUIT)
    # exact unitary circuit; renormalize only to absorb rounding
    return s.normalized()


def _support_strings():
    """Basis strings of the labelled channel: (B4C1C3C4A1A3)(A4B1B3)(A2B2C2)."""
    for six in ("000000", "000111", "111000", "111111"):
        for three in ("000", "111"):
            for last in itertools.product("01", repeat=3):
                yield six + three + "".join(last)


def reference_channel() -> StateVector:
    """Channel written down directly from its labelled sum: 64 terms of +1/8."""
    amps = np.zeros(2**12, dtype=complex)
    for bits in _support_strings():
        amps[int(bits, 2)] = 1.0
    amps /= np.linalg.norm(amps)
    return StateVector(amps, CHANNEL_LABELS)


def six_qubit_cluster() -> StateVector:
    amps = np.zeros(64, dtype=complex)
    for bits in ("000000", "000111", "111000", "111111"):
        amps[int(bits, 2)] = 0.5
    return StateVector(amps)


def six_qubit_entangled() -> StateVector:
    """(|000> + |111>) on the first three qubits times the uniform sum on the last three."""
    amps = np.zeros(64, dtype=complex)
    for head in ("000", "111"):
        for tail in itertools.product("01", repeat=3):
            amps[int(head + "".join(tail), 2)] = 0.25
    return StateVector(amps)


def product_form_channel() -> StateVector:
    """Cluster (circuit qubits 1-6) tensor entangled state (7-12), labelled and
    re-ordered into the label order of :data:`CHANNEL_LABELS`."""
    amps = np.kron(six_qubit_cluster().amps, six_qubit_entangled().amps)
    labels = [CHANNEL_LABELS[circuit_index(k)] for k in range(1, 13)]
    return reorder_to(StateVector(amps, labels), CHANNEL_LABELS)


@dataclass(frozen=True)
class ChannelCheck:
    ok: bool
    diagnostic: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_channel(s: StateVector, tol: float = NORM_TOL) -> ChannelCheck:
    """Compare a 12-qubit state against the channel amplitude by amplitude, up to global phase."""
    if s.n_qubits != 12:
        raise DimensionMismatchError(f"channel has 12 qubits, got {s.n_qubits}")
    if s.labels is not None and s.labels.names != CHANNEL_LABELS:
        s = reorder_to(s, CHANNEL_LABELS)
    ref = reference_channel().amps
    overlap = np.vdot(ref, s.amps)
    phase = overlap / abs(overlap) if abs(overlap) > tol else 1.0
    diff = np.abs(s.amps * np.conj(phase) - ref)
    bad = np.flatnonzero(diff > tol)
    if bad.size == 0:
        return ChannelCheck(True)
    k = int(bad[0])
    bits = format(k, "012b")
    named = " ".join(f"{n}={b}" for n, b in zip(CHANNEL_LABELS, bits))
    return ChannelCheck(
        False,
        f"{bad.size} mismatching amplitudes; first at |{bits}> ({named}): "
        f"got {complex(s.amps[k] * np.conj(phase)):.6g}, expected {ref[k].real:.6g}",
    )


@dataclass(frozen=True)
class MessageState:
    """amp0 |00> + amp1 |11>."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        a0, a1 = complex(self.amp0), complex(self.amp1)
        object.__setattr__(self, "amp0", a0)
        object.__setattr__(self, "amp1", a1)
        total = abs(a0) ** 2 + abs(a1) ** 2
        if abs(total - 1.0) > NORM_TOL:
            raise NormalizationError(f"|amp0|^2 + |amp1|^2 = {total!r}, expected 1")

    def state(self, labels=None) -> StateVector:
        return build_message(self.amp0, self.amp1, labels)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "MessageState":
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        # renormalize the pair once more so the 1e-12 check never trips on rounding
        a0, a1 = complex(v[0]), complex(v[1])
        n = np.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
        return cls(a0 / n, a1 / n)


def build_message(a0: complex, a1: complex, labels=None) -> StateVector:
    total = abs(a0) ** 2 + abs(a1) ** 2
    if abs(total - 1.0) > NORM_TOL:
        raise NormalizationError(f"|a0|^2 + |a1|^2 = {total!r}, expected 1")
    return StateVector(np.array([a0, 0, 0, a1], dtype=complex), labels)
