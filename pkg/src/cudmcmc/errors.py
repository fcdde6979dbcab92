"""Exception types shared across the package."""


class CudMcmcError(Exception):
    """Base class for all package errors."""


class StreamExhausted(CudMcmcError):
    """A CUD stream has emitted its full period."""


class DomainError(CudMcmcError, ValueError):
    """An argument lies outside the domain of a function (e.g. u not in (0,1))."""


class DimensionMismatch(CudMcmcError, ValueError):
    pass


class TooShort(CudMcmcError, ValueError):
    pass


class BudgetExceeded(CudMcmcError):
    """Exact discrepancy enumeration would exceed the configured budget."""


class InvalidState(CudMcmcError, ValueError):
    """A chain state is outside the support of the target, or inconsistent."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step


class InvalidBound(CudMcmcError, ValueError):
    """Bounds for a coupling region are inconsistent (eta > kappa, kappa infinite, ...)."""


class ConfigError(CudMcmcError, ValueError):
    pass
