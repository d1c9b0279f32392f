"""Exception types raised across the package."""


class TwistcurveError(Exception):
    """Base class for all package errors."""


class ValidationError(TwistcurveError, ValueError):
    """An input violates a documented precondition."""


class ConvergenceError(TwistcurveError, RuntimeError):
    """An iterative solver did not reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateError(TwistcurveError, ValueError):
    """The analysis is undefined for this input (e.g. v'(c) = 0, flat oscillation)."""


class BudgetError(TwistcurveError, ValueError):
    """Requested work exceeds a fixed budget (pressure depth, sample count)."""


class NoOrbitHitError(TwistcurveError, RuntimeError):
    """No orbit visited the target ball within the scan budget."""

    def __init__(self, message, deepest_n=None):
        super().__init__(message)
        self.deepest_n = deepest_n


class PrecisionFloorError(TwistcurveError, RuntimeError):
    """The admissible increment is too small to resolve in double precision."""
