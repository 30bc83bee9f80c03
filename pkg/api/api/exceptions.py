# api/api/exceptions.py
"""
    Error taxonomy shared by every component.

    Each class carries the process exit code the CLI reports for it, so a
    failure raised deep inside a service surfaces with the right status
    without any translation table in between.
"""
from typing import Any, Optional


class PrivampError(Exception):
    """Root of all library errors."""
    exit_code = 1


class ValidationError(PrivampError, ValueError):
    """Raised when an input violates a type invariant or a parameter is malformed."""
    exit_code = 2


class CapacityError(PrivampError):
    """Raised when an explicit construction would exceed a configured size limit."""
    exit_code = 3


class ConvergenceError(PrivampError):
    """
    Raised when an iterative minimization exhausts its iteration budget.

    Attributes:
        best_value: Lowest objective value reached.
        residual:   Stationarity residual at the best point.
        minimizer:  The best point itself (a density matrix), if available.
    """
    exit_code = 4

    def __init__(self, message: str, best_value: float = float("nan"),
                 residual: float = float("nan"), minimizer: Optional[Any] = None):
        super().__init__(message)
        self.best_value = best_value
        self.residual = residual
        self.minimizer = minimizer


class DomainError(PrivampError, ValueError):
    """Raised when a quantity is undefined for the given input (support, windows, variance)."""
    exit_code = 5
