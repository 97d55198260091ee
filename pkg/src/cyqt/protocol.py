"""Cyclic teleportation of three two-qubit states over the twelve-qubit channel.

Alice teleports ``alpha`` to Bob, Bob teleports ``beta`` to Charlie and
Charlie teleports ``gamma`` to Alice.  Six Bell measurements run in a fixed
order; every outcome is sent to the party whose correction depends on it, and
corrections are applied only once all six outcomes are in.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bell import BELL_VECTORS, BellOutcome, bsm_sample, measure_forced
from .channel import CHANNEL_LABELS, MESSAGE_LABELS, MessageState, Party, build_channel
from .errors import BranchImpossibleError, DimensionMismatchError, NormalizationError
from .statevec import (
    LabelMap,
    StateVector,
    apply_matrix,
    reduced_density,
    state_fidelity_with_density,
    tensor,
    tensor_all,
)


@dataclass(frozen=True)
class Step:
    number: int
    message_qubit: str
    channel_qubit: str
    sender: Party
    receiver: Party

    @property
    def slot(self) -> str:
        """Column name used in tables, e.g. ``alpha0A2``."""
        return self.message_qubit + self.channel_qubit


STEPS = (
    Step(1, "alpha0", "A2", Party.ALICE, Party.BOB),
    Step(2, "beta0", "B2", Party.BOB, Party.CHARLIE),
    Step(3, "gamma0", "C2", Party.CHARLIE, Party.ALICE),
    Step(4, "alpha1", "A4", Party.ALICE, Party.BOB),
    Step(5, "gamma1", "C4", Party.CHARLIE, Party.ALICE),
    Step(6, "beta1", "B4", Party.BOB, Party.CHARLIE),
)
SLOT_NAMES = tuple(s.slot for s in STEPS)


@dataclass(frozen=True)
class Delivery:
    register: str
    sender: Party
    receiver: Party
    qubits: tuple[str, str]


# Order matches the order of the three inputs everywhere.
DELIVERIES = (
    Delivery("alpha", Party.ALICE, Party.BOB, ("B1", "B3")),
    Delivery("beta", Party.BOB, Party.CHARLIE, ("C1", "C3")),
    Delivery("gamma", Party.CHARLIE, Party.ALICE, ("A1", "A3")),
)

COMBINED_LABELS = MESSAGE_LABELS + CHANNEL_LABELS
FINAL_LABELS = ("C1", "C3", "A1", "A3", "B1", "B3")

OutcomeTuple = tuple  # six BellOutcome values, one per entry of STEPS
N_TUPLES = 4 ** len(STEPS)


def all_outcome_tuples() -> list[tuple[BellOutcome, ...]]:
    """Every outcome tuple, first slot most significant, Phi+ < Phi- < Psi+ < Psi-."""
    return list(itertools.product(BellOutcome, repeat=len(STEPS)))


def tuple_index(outcomes: Sequence[BellOutcome]) -> int:
    outcomes = check_outcomes(outcomes)
    idx = 0
    for o in outcomes:
        idx = 4 * idx + o.rank
    return idx


def tuple_from_index(i: int) -> tuple[BellOutcome, ...]:
    if not 0 <= i < N_TUPLES:
        raise IndexError(f"tuple index {i} out of range")
    order = tuple(BellOutcome)
    digits = []
    for _ in STEPS:
        i, r = divmod(i, 4)
        digits.append(order[r])
    return tuple(reversed(digits))


def check_outcomes(outcomes: Iterable) -> tuple[BellOutcome, ...]:
    out = tuple(o if isinstance(o, BellOutcome) else BellOutcome.parse(o) for o in outcomes)
    if len(out) != len(STEPS):
        raise ValueError(f"expected {len(STEPS)} outcomes, got {len(out)}")
    return out


def parse_outcomes(text: str) -> tuple[BellOutcome, ...]:
    """Parse ``"Phi+,Phi+,Psi-,..."``."""
    return check_outcomes(p for p in text.split(",") if p.strip())


def format_outcomes(outcomes: Sequence[BellOutcome]) -> str:
    return ",".join(o.symbol for o in outcomes)


@dataclass(frozen=True)
class ClassicalMessage:
    sender: Party
    receiver: Party
    payload: BellOutcome
    step: int


def messages_for(outcomes: Sequence[BellOutcome]) -> tuple[ClassicalMessage, ...]:
    return tuple(
        ClassicalMessage(step.sender, step.receiver, o, step.number)
        for step, o in zip(STEPS, outcomes)
    )


def _input_state(x) -> StateVector:
    if isinstance(x, MessageState):
        return x.state()
    s = x if isinstance(x, StateVector) else StateVector(np.asarray(x, dtype=complex))
    if s.n_qubits != 2:
        raise DimensionMismatchError(f"inputs are two-qubit states, got {s.n_qubits} qubits")
    if not s.is_normalized():
        raise NormalizationError(f"input state has norm {s.norm()!r}")
    return StateVector(s.amps)


def _check_triple(inputs) -> tuple:
    inputs = tuple(inputs)
    if len(inputs) != 3:
        raise ValueError(f"expected three inputs (alpha, beta, gamma), got {len(inputs)}")
    return inputs


_CHANNEL_CACHE: list[StateVector] = []


def channel_state() -> StateVector:
    if not _CHANNEL_CACHE:
        _CHANNEL_CACHE.append(build_channel())
    return _CHANNEL_CACHE[0]


def combined_state(inputs) -> StateVector:
    """Three message registers followed by the channel, labelled."""
    msgs = [_input_state(x) for x in _check_triple(inputs)]
    s = tensor(tensor_all(msgs).with_labels(MESSAGE_LABELS), channel_state())
    return s


@dataclass(frozen=True, eq=False)
class MeasuredRun:
    """Uncorrected outcome of the six measurements."""

    outcomes: tuple[BellOutcome, ...]
    step_probabilities: tuple[float, ...]
    residuals: tuple[StateVector, ...]

    @property
    def final_state(self) -> StateVector:
        return self.residuals[-1]

    @property
    def probability(self) -> float:
        return float(np.prod(self.step_probabilities))


def _measure(state: StateVector, outcomes=None, rng=None) -> MeasuredRun:
    residuals, probs, seen = [], [], []
    for k, step in enumerate(STEPS):
        q1, q2 = state.index_of(step.message_qubit), state.index_of(step.channel_qubit)
        if outcomes is not None:
            res = measure_forced(state, q1, q2, outcomes[k])
            if res.probability == 0.0:
                raise BranchImpossibleError(
                    f"outcome {res.outcome.symbol} at step {step.number} ({step.slot}) "
                    f"has zero probability"
                )
        else:
            res = bsm_sample(state, q1, q2, rng)
        state = res.residual
        residuals.append(state)
        probs.append(res.probability)
        seen.append(res.outcome)
    return MeasuredRun(tuple(seen), tuple(probs), tuple(residuals))


def collapse_sequence(inputs, outcomes) -> MeasuredRun:
    """Run the six forced measurements and keep every intermediate residual."""
    return _measure(combined_state(inputs), check_outcomes(outcomes))


def apply_correction(final: StateVector, record) -> StateVector:
    from .corrections import PAULI_MATRICES

    s = final
    for label, symbol in record.pauli_string.items():
        s = apply_matrix(s, PAULI_MATRICES[symbol], s.index_of(label))
    return s


def receiver_fidelities(final: StateVector, targets: Sequence[StateVector]) -> tuple[float, ...]:
    out = []
    for d, target in zip(DELIVERIES, targets):
        rho = reduced_density(final, [final.index_of(q) for q in d.qubits])
        out.append(state_fidelity_with_density(rho, target))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ProtocolTranscript:
    inputs: tuple[StateVector, StateVector, StateVector]
    outcomes: tuple[BellOutcome, ...]
    step_probabilities: tuple[float, ...]
    messages: tuple[ClassicalMessage, ...]
    corrections: object  # corrections.CorrectionRecord
    fidelities: tuple[float, float, float]
    final_state: StateVector
    uncorrected_state: StateVector = field(repr=False)

    @property
    def probability(self) -> float:
        return float(np.prod(self.step_probabilities))

    def succeeded(self, tol: float = 1e-10) -> bool:
        return all(abs(f - 1.0) <= tol for f in self.fidelities)

    def to_dict(self) -> dict:
        return transcript_to_dict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _run(inputs, outcomes=None, rng=None) -> ProtocolTranscript:
    from .corrections import correction_for

    targets = tuple(_input_state(x) for x in _check_triple(inputs))
    measured = _measure(combined_state(targets), outcomes, rng)
    record = correction_for(measured.outcomes)
    final = apply_correction(measured.final_state, record)
    return ProtocolTranscript(
        inputs=targets,
        outcomes=measured.outcomes,
        step_probabilities=measured.step_probabilities,
        messages=messages_for(measured.outcomes),
        corrections=record,
        fidelities=receiver_fidelities(final, targets),
        final_state=final,
        uncorrected_state=measured.final_state,
    )


def run_forced(inputs: Sequence[MessageState], outcomes) -> ProtocolTranscript:
    for x in _check_triple(inputs):
        if not isinstance(x, MessageState):
            raise TypeError("run_forced takes MessageState inputs; use run_general_input otherwise")
    return _run(inputs, outcomes=check_outcomes(outcomes))


def run_sampled(inputs: Sequence[MessageState], rng_seed) -> ProtocolTranscript:
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return _run(inputs, rng=rng)


def run_general_input(inputs, outcomes) -> ProtocolTranscript:
    """Same pipeline for arbitrary normalized two-qubit inputs; no success guarantee."""
    return _run(inputs, outcomes=check_outcomes(outcomes))


# -- exhaustive branch enumeration -------------------------------------------


@dataclass(frozen=True, eq=False)
class BranchSet:
    """All 4096 leaves of the measurement tree for one input triple.

    Row ``i`` belongs to ``tuple_from_index(i)``.
    """

    step_probabilities: np.ndarray  # (4096, 6) conditional probability of each step
    finals: np.ndarray  # (4096, 64) normalized uncorrected residuals, FINAL_LABELS order
    labels: tuple[str, ...]

    @property
    def probabilities(self) -> np.ndarray:
        return np.prod(self.step_probabilities, axis=1)

    def final_state(self, i: int) -> StateVector:
        return StateVector(self.finals[i], self.labels)


def enumerate_branches(inputs) -> BranchSet:
    """Walk the measurement tree breadth-first, one Bell measurement per level.

    Every level costs the same as one projection of the full register, so the
    whole tree is about six times the work of a single run.
    """
    state = combined_state(inputs)
    labels = LabelMap(state.labels)
    t = state.amps.reshape(1, -1)
    bell_bras = BELL_VECTORS.conj()
    levels = []
    for step in STEPS:
        n = len(labels)
        q1, q2 = labels.index(step.message_qubit), labels.index(step.channel_qubit)
        rest = [q for q in range(n) if q not in (q1, q2)]
        b = t.shape[0]
        pairs = np.transpose(
            t.reshape((b,) + (2,) * n), [0, q1 + 1, q2 + 1] + [q + 1 for q in rest]
        ).reshape(b, 4, -1)
        children = np.matmul(bell_bras, pairs)  # (b, 4, rest)
        parent = np.sum(np.abs(t) ** 2, axis=1)
        child = np.sum(np.abs(children) ** 2, axis=2)
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(parent[:, None] > 0, child / parent[:, None], 0.0)
        levels.append(cond.reshape(-1))
        t = children.reshape(b * 4, -1)
        labels = labels.remove((q1, q2))

    step_probs = np.empty((N_TUPLES, len(STEPS)))
    idx = np.arange(N_TUPLES)
    for k, cond in enumerate(levels):
        step_probs[:, k] = cond[idx // 4 ** (len(STEPS) - 1 - k)]
    norms = np.linalg.norm(t, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        finals = np.where(norms[:, None] > 0, t / norms[:, None], 0.0)
    assert labels.names == FINAL_LABELS
    return BranchSet(step_probs, finals, labels.names)


@dataclass(frozen=True)
class SweepResult:
    fidelities: np.ndarray  # (4096, 3)
    probabilities: np.ndarray  # (4096,)
    tol: float

    @property
    def passed(self) -> np.ndarray:
        return np.all(np.abs(self.fidelities - 1.0) <= self.tol, axis=1)

    @property
    def n_passed(self) -> int:
        return int(np.sum(self.passed))

    @property
    def failures(self) -> list[tuple[BellOutcome, ...]]:
        return [tuple_from_index(int(i)) for i in np.flatnonzero(~self.passed)]

    def summary(self) -> str:
        ok = self.n_passed == N_TUPLES
        return f"{self.n_passed}/{N_TUPLES} tuples fidelity={'1' if ok else '<1'}"


def corrected_fidelities(branches: BranchSet, targets, records) -> np.ndarray:
    """Apply each tuple's correction to its leaf and return (4096, 3) receiver fidelities.

    A receiver's reduced state is untouched by the other receivers' local
    corrections, so each receiver only needs its own two-qubit operator.
    """
    from .corrections import correction_operator_stack

    ops = correction_operator_stack(records)  # (4096, 3, 4, 4), DELIVERIES order
    t = branches.finals.reshape((N_TUPLES,) + (2,) * 6)
    out = np.empty((N_TUPLES, 3))
    for r, (d, target) in enumerate(zip(DELIVERIES, targets)):
        q = [branches.labels.index(x) for x in d.qubits]
        rest = [k for k in range(6) if k not in q]
        m = np.transpose(t, [0] + [k + 1 for k in q] + [k + 1 for k in rest]).reshape(N_TUPLES, 4, 16)
        corrected = np.matmul(ops[:, r], m)
        overlap = np.einsum("i,zir->zr", _input_state(target).amps.conj(), corrected)
        out[:, r] = np.sum(np.abs(overlap) ** 2, axis=1)
    return np.clip(out, 0.0, 1.0)


def sweep(inputs, tol: float = 1e-10, method: str = "tree") -> SweepResult:
    """Post-correction fidelities for every outcome tuple.

    ``method="tree"`` enumerates all leaves at once; ``method="sequential"``
    calls :func:`run_forced` (or :func:`run_general_input`) once per tuple.
    """
    from .corrections import derive_all

    inputs = _check_triple(inputs)
    if method == "tree":
        targets = tuple(_input_state(x) for x in inputs)
        branches = enumerate_branches(targets)
        fids = corrected_fidelities(branches, targets, derive_all())
        return SweepResult(fids, branches.probabilities, tol)
    if method == "sequential":
        run = run_forced if all(isinstance(x, MessageState) for x in inputs) else run_general_input
        fids, probs = np.empty((N_TUPLES, 3)), np.empty(N_TUPLES)
        for i, outcomes in enumerate(all_outcome_tuples()):
            tr = run(inputs, outcomes)
            fids[i] = tr.fidelities
            probs[i] = tr.probability
        return SweepResult(fids, probs, tol)
    raise ValueError(f"unknown sweep method {method!r}")


# -- serialization -----------------------------------------------------------


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _uc(pair) -> complex:
    return complex(pair[0], pair[1])


def transcript_to_dict(tr: ProtocolTranscript) -> dict:
    inputs = []
    for d, s in zip(DELIVERIES, tr.inputs):
        entry = {
            "register": d.register,
            "sender": d.sender.value,
            "receiver": d.receiver.value,
            "amplitudes": [_c(z) for z in s.amps],
        }
        if abs(s.amps[1]) == 0 and abs(s.amps[2]) == 0:
            entry["amp0"], entry["amp1"] = _c(s.amps[0]), _c(s.amps[3])
        inputs.append(entry)
    return {
        "inputs": inputs,
        "outcomes": {slot: o.symbol for slot, o in zip(SLOT_NAMES, tr.outcomes)},
        "step_probabilities": list(tr.step_probabilities),
        "messages": [
            {"step": m.step, "sender": m.sender.value, "receiver": m.receiver.value,
             "payload": m.payload.symbol}
            for m in tr.messages
        ],
        "corrections": dict(tr.corrections.pauli_string.items()),
        "fidelities": {d.register: f for d, f in zip(DELIVERIES, tr.fidelities)},
        "final_state": {
            "labels": list(tr.final_state.labels),
            "amplitudes": [_c(z) for z in tr.final_state.amps],
        },
    }


def transcript_from_dict(doc: dict) -> ProtocolTranscript:
    """Rebuild a transcript from :func:`transcript_to_dict` output."""
    from .corrections import CorrectionRecord

    inputs = tuple(StateVector(np.array([_uc(p) for p in e["amplitudes"]])) for e in doc["inputs"])
    outcomes = tuple(BellOutcome.parse(doc["outcomes"][slot]) for slot in SLOT_NAMES)
    corr = doc["corrections"]
    record = CorrectionRecord(
        outcomes,
        alice=(corr["A1"], corr["A3"]),
        bob=(corr["B1"], corr["B3"]),
        charlie=(corr["C1"], corr["C3"]),
    )
    final = StateVector(
        np.array([_uc(p) for p in doc["final_state"]["amplitudes"]]),
        doc["final_state"]["labels"],
    )
    # Paulis are self-inverse up to sign, so this recovers the uncorrected state up to global phase
    return ProtocolTranscript(
        inputs=inputs,
        outcomes=outcomes,
        step_probabilities=tuple(doc["step_probabilities"]),
        messages=tuple(
            ClassicalMessage(Party(m["sender"]), Party(m["receiver"]),
                             BellOutcome.parse(m["payload"]), m["step"])
            for m in doc["messages"]
        ),
        corrections=record,
        fidelities=tuple(doc["fidelities"][d.register] for d in DELIVERIES),
        final_state=final,
        uncorrected_state=apply_correction(final, record),
    )
