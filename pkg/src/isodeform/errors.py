"""Exception hierarchy shared by every module of the package."""


class IsodeformError(Exception):
    """Base class for all package errors."""


class ArgumentError(IsodeformError, ValueError):
    pass


class EvaluationError(IsodeformError):
    """A function returned a non-finite value; ``where`` names the offending input."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class DivergenceError(EvaluationError):
    pass


class DomainError(IsodeformError, ValueError):
    pass


class ValidationError(IsodeformError):
    """Raised when a profile or spec fails its checks; carries the report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CapabilityError(IsodeformError):
    pass


class DegenerateInputError(IsodeformError, ValueError):
    pass


class ClassificationError(IsodeformError):
    pass


class ConfigurationError(IsodeformError, ValueError):
    pass


class FormatError(IsodeformError, ValueError):
    """Malformed input file."""
