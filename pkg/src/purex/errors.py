"""Exception types raised across the package."""


class PurexError(Exception):
    """Base class for all package errors."""


class ConfigError(PurexError, ValueError):
    """Invalid configuration: bad field, unknown preset, incompatible reward/case."""

    def __init__(self, message, path=None):
        self.path = path
        self.detail = message
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class DataError(PurexError, ValueError):
    """Observation outside the declared support."""


class VariantMismatchError(PurexError, TypeError):
    """Operation not defined for this distribution variant."""


class AlignmentError(PurexError, ValueError):
    """Probability vectors defined over different supports."""


class SupportTooLargeError(PurexError, ValueError):
    pass


class InsufficientDataError(PurexError, ValueError):
    pass


class InvalidProblemError(PurexError, ValueError):
    """Problem violates its preconditions (e.g. the optimal arm is not unique)."""


class QuadratureError(PurexError, ArithmeticError):
    """Adaptive quadrature hit its iteration cap; carries the best estimate."""

    def __init__(self, message, estimate, error):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class ConvergenceError(PurexError, ArithmeticError):
    pass
