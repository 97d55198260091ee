"""Branch probabilities, outcome entropy, efficiency and a fidelity scan over general inputs."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .channel import MessageState
from .corrections import derive_all
from .errors import InvalidDistributionError
from .protocol import (
    COMBINED_LABELS,
    N_TUPLES,
    SLOT_NAMES,
    STEPS,
    all_outcome_tuples,
    check_outcomes,
    combined_state,
    corrected_fidelities,
    enumerate_branches,
)
from .statevec import StateVector

TELEPORTED_QUBITS = 6
CHANNEL_QUBITS = 12
CLASSICAL_BITS = 2 * len(STEPS)


@dataclass(frozen=True, eq=False)
class ProbabilityReport:
    probabilities: np.ndarray  # (4096,), tuple order
    total: float
    max_deviation_from_uniform: float

    def summary(self) -> dict:
        return {
            "n_tuples": int(self.probabilities.size),
            "uniform_value": 1.0 / self.probabilities.size,
            "min": float(self.probabilities.min()),
            "max": float(self.probabilities.max()),
            "total": self.total,
            "max_deviation_from_uniform": self.max_deviation_from_uniform,
        }


def enumerate_probabilities(inputs) -> ProbabilityReport:
    """Probability of each outcome tuple as the product of its six conditional step probabilities."""
    branches = enumerate_branches(inputs)
    p = branches.probabilities
    return ProbabilityReport(p, float(p.sum()), float(np.max(np.abs(p - 1.0 / N_TUPLES))))


def joint_projection_probability(inputs, outcomes) -> float:
    """Squared norm after projecting all six pairs onto their Bell vectors in one contraction."""
    outcomes = check_outcomes(outcomes)
    state = combined_state(inputs)
    n = state.n_qubits
    operands: list = [state.tensor(), list(range(n))]
    measured = set()
    for step, o in zip(STEPS, outcomes):
        q1 = COMBINED_LABELS.index(step.message_qubit)
        q2 = COMBINED_LABELS.index(step.channel_qubit)
        operands += [o.vector.conj().reshape(2, 2), [q1, q2]]
        measured |= {q1, q2}
    out = np.einsum(*operands, [q for q in range(n) if q not in measured], optimize=True)
    return float(np.sum(np.abs(out) ** 2))


def entropy(p, tol: float = 1e-10) -> float:
    """Shannon entropy in bits, with 0 log 0 taken as 0."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
        raise InvalidDistributionError("probabilities must be finite and nonnegative")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidDistributionError(f"probabilities sum to {p.sum()!r}, expected 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


@dataclass(frozen=True)
class EfficiencyReport:
    q_t: int
    q_s: int
    e: float
    classical_bits: int = CLASSICAL_BITS


def efficiency(q_t: int, q_s: int) -> float:
    """Teleported qubits per channel qubit."""
    if q_s <= 0:
        raise ValueError(f"channel qubit count must be positive, got {q_s}")
    if q_t < 0:
        raise ValueError(f"teleported qubit count must be nonnegative, got {q_t}")
    return q_t / q_s


def efficiency_report(q_t: int = TELEPORTED_QUBITS, q_s: int = CHANNEL_QUBITS) -> EfficiencyReport:
    return EfficiencyReport(q_t, q_s, efficiency(q_t, q_s))


# -- validity scan -----------------------------------------------------------

# Bob's and Charlie's registers stay fixed while Alice's input is scanned.
SCAN_PARTNERS = (MessageState(0.6, 0.8), MessageState(0.8, -0.6j))


def scan_state(theta: float, phi: float) -> StateVector:
    """cos(theta) (cos phi |00> + sin phi |11>) + sin(theta) (cos phi |01> + sin phi |10>).

    ``theta = 0`` is the teleportable family; ``theta = pi/2, phi = 0`` is |01>.
    """
    c, s = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    v = np.array([c * cp, s * cp, s * sp, c * sp], dtype=complex)
    return StateVector(v / np.linalg.norm(v))


@dataclass(frozen=True)
class ScanPoint:
    theta: float
    phi: float
    in_family: bool
    worst_fidelity: float  # alpha receiver, worst over tuples with nonzero probability
    worst_fidelity_all: float  # worst over all three receivers
    total_probability: float


def validity_scan(grid_resolution: int, partners=SCAN_PARTNERS) -> list[ScanPoint]:
    """Worst-case post-correction fidelity over a (theta, phi) grid of Alice inputs."""
    if grid_resolution < 2:
        raise ValueError("grid_resolution must be >= 2")
    records = derive_all()
    thetas = np.linspace(0.0, np.pi / 2, grid_resolution)
    phis = np.linspace(0.0, np.pi / 2, grid_resolution)
    rows = []
    for theta in thetas:
        for phi in phis:
            alpha = scan_state(theta, phi)
            targets = (alpha, partners[0].state(), partners[1].state())
            branches = enumerate_branches(targets)
            fids = corrected_fidelities(branches, targets, records)
            live = branches.probabilities > 1e-15
            rows.append(
                ScanPoint(
                    theta=float(theta),
                    phi=float(phi),
                    in_family=bool(abs(alpha.amps[1]) < 1e-12 and abs(alpha.amps[2]) < 1e-12),
                    worst_fidelity=float(fids[live, 0].min()),
                    worst_fidelity_all=float(fids[live].min()),
                    total_probability=float(branches.probabilities.sum()),
                )
            )
    return rows


# -- reports -----------------------------------------------------------------


def probability_csv(report: ProbabilityReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(SLOT_NAMES) + ["probability"])
    for outcomes, p in zip(all_outcome_tuples(), report.probabilities):
        w.writerow([o.symbol for o in outcomes] + [repr(float(p))])
    return buf.getvalue()


def report_bundle(inputs: Sequence[MessageState], grid_resolution: int = 3) -> dict:
    prob = enumerate_probabilities(inputs)
    return {
        "inputs": [
            {"amp0": [x.amp0.real, x.amp0.imag], "amp1": [x.amp1.real, x.amp1.imag]}
            for x in inputs
        ],
        "probability": prob.summary(),
        "entropy": entropy(prob.probabilities),
        "efficiency": asdict(efficiency_report()),
        "validity_scan": [asdict(r) for r in validity_scan(grid_resolution)],
    }


def _rounded(x):
    # 15 significant digits hides last-bit noise such as 11.999999999999991
    if isinstance(x, float):
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {k: _rounded(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_rounded(v) for v in x]
    return x


def report_json(bundle: dict) -> str:
    return json.dumps(_rounded(bundle), indent=2, sort_keys=True) + "\n"

