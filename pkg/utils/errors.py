"""
Exception hierarchy shared by every package.

Each class carries the exit code the command-line entry point reports
(1 usage, 2 data, 3 numerical).
"""
from typing import List, Optional


class WheelError(Exception):
    """Base class for all library errors."""
    exit_code = 1


class UsageError(WheelError):
    """Bad command-line usage."""
    exit_code = 1


class DomainError(WheelError, ValueError):
    """Argument outside the supported domain (even N, alpha out of range, ...)."""
    exit_code = 1


class CapacityError(WheelError):
    """Request exceeds a dense or exhaustive size cap."""
    exit_code = 1


class StructuralError(WheelError, ValueError):
    """Mismatched lengths or malformed composite objects."""
    exit_code = 2


class DataError(WheelError):
    """Missing, malformed or tampered input data."""
    exit_code = 2


class NumericalError(WheelError):
    """Base for numerical failures."""
    exit_code = 3


class SingularOverlapError(NumericalError):
    """Pre- and postselection are (numerically) orthogonal."""


class CompletenessError(NumericalError):
    """Projector weak values of a basis do not sum to one."""


class ExtractionError(NumericalError):
    """Weak-value inversion is singular."""


class FitFailureError(NumericalError):
    """Gauss-Newton iteration did not converge."""

    def __init__(self, message: str, residual_trace: Optional[List[float]] = None):
        super().__init__(message)
        self.residual_trace = list(residual_trace or [])
