"""Exception types raised across the package."""


class CyqtError(Exception):
    """Base class for all package errors."""


class CapacityError(CyqtError, ValueError):
    """Register would exceed the supported qubit count."""


class QubitIndexError(CyqtError, IndexError):
    """Physical qubit index out of range, or repeated where distinct indices are needed."""


class DimensionMismatchError(CyqtError, ValueError):
    """Two states or operators have incompatible sizes."""


class NormalizationError(CyqtError, ValueError):
    """Input amplitudes are not normalized."""


class BranchImpossibleError(CyqtError):
    """A forced measurement outcome has zero probability."""


class DerivationError(CyqtError):
    """No Pauli correction recovers the target state for an outcome tuple."""

    def __init__(self, message, outcomes=None):
        super().__init__(message)
        self.outcomes = outcomes


class InvalidDistributionError(CyqtError, ValueError):
    """Probability array is negative somewhere or does not sum to one."""
