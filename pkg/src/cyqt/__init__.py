"""State-vector simulation of cyclic teleportation of three two-qubit states."""

from .bell import BellOutcome, MeasurementResult, bsm_branches, bsm_sample
from .channel import (
    LabelMap,
    MessageState,
    build_channel,
    build_message,
    verify_channel,
)
from .protocol import (
    ProtocolTranscript,
    all_outcome_tuples,
    run_forced,
    run_general_input,
    run_sampled,
    sweep,
)
from .statevec import GateOp, StateVector, apply_gate, fidelity, init_zero, tensor

__version__ = "0.1.0"
