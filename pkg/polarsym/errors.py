from __future__ import annotations

from typing import Any, Optional


class PolarSymError(Exception):
    """Base class for every error raised by polarsym."""


class DomainViolationError(PolarSymError, ValueError):
    """A dual-number evaluation produced a non-finite value or partial."""


class ChartDomainError(PolarSymError, ValueError):
    def __init__(self, point: Any, model: str):
        super().__init__(f"point {point!r} is outside the chart of {model}")
        self.point = point
        self.model = model


class ChartExitError(PolarSymError):
    def __init__(self, exit_time: float, point: Any):
        super().__init__(f"trajectory left the chart at t={exit_time:.6g}")
        self.exit_time = exit_time
        self.point = point


class SingularMetricError(PolarSymError, ValueError):
    pass


class VariableMismatchError(PolarSymError, ValueError):
    def __init__(self, left: tuple[str, ...], right: tuple[str, ...]):
        super().__init__(f"variable sets differ: {left} vs {right}")
        self.left = left
        self.right = right


class EmptySystemError(PolarSymError, ValueError):
    pass


class NotTangentError(PolarSymError, ValueError):
    def __init__(self, residual: float):
        super().__init__(f"vector is not tangent (projection residual {residual:.3e})")
        self.residual = residual


class PreconditionError(PolarSymError, ValueError):
    pass


class ConvergenceError(PolarSymError):
    def __init__(self, message: str, best_residual: float, iterations: int):
        super().__init__(f"{message} (best residual {best_residual:.3e} after {iterations} iterations)")
        self.best_residual = best_residual
        self.iterations = iterations


class DimensionMismatchError(PolarSymError):
    def __init__(self, what: str, expected: int, actual: int):
        super().__init__(f"{what}: expected {expected}, got {actual}")
        self.what = what
        self.expected = expected
        self.actual = actual


class WeylClosureError(PolarSymError):
    pass


class NonLinearActionError(PolarSymError, ValueError):
    pass


class ExtensionError(PolarSymError):
    def __init__(self, message: str, residual: Optional[Any] = None):
        super().__init__(message)
        self.residual = residual


class SingularFormError(PolarSymError):
    pass


class ConfigError(PolarSymError, ValueError):
    pass


class ZeroLevelSamplingError(PolarSymError):
    def __init__(self, action: str, found: int, wanted: int, attempts: int):
        super().__init__(f"only {found} of {wanted} zero-level points for {action} after {attempts} attempts")
        self.found = found
        self.wanted = wanted
        self.attempts = attempts
