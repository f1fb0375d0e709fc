"""Exception hierarchy shared by every module."""


class BlowupError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(BlowupError, ValueError):
    pass


class InvalidExponentError(BlowupError, ValueError):
    pass


class NegativeDensityError(BlowupError, ValueError):
    pass


class SupportViolationError(BlowupError, ValueError):
    """Initial data does not vanish at the outer radius."""


class HypothesisViolatedError(BlowupError, ValueError):
    pass


class DomainError(BlowupError, ValueError):
    pass


class ConfigurationError(BlowupError, ValueError):
    """Invalid configuration; ``field`` names the offending key when known."""

    def __init__(self, message, field=None):
        self.field = field
        self.detail = message
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class NumericalOverflowError(BlowupError, ArithmeticError):
    """A non-finite value appeared during a step."""

    def __init__(self, cell, term):
        self.cell = int(cell)
        self.term = term
        super().__init__(f"non-finite {term} in cell {self.cell}")


class InsufficientDataError(BlowupError, ValueError):
    pass


class OracleNotApplicableError(BlowupError, ValueError):
    pass


class ConsistencyError(BlowupError, ValueError):
    pass
