"""Exception hierarchy shared by every module of the package."""


class SykError(Exception):
    """Base class for all package errors."""


class InvalidParity(SykError, ValueError):
    pass


class IndexOutOfRange(SykError, IndexError):
    pass


class InvalidLocality(SykError, ValueError):
    pass


class ResultTooLarge(SykError, MemoryError):
    pass


class NumericalContamination(SykError, ArithmeticError):
    pass


class BetaOutOfRange(SykError, ValueError):
    pass


class EpsilonOutOfRange(SykError, ValueError):
    pass


class BudgetExceeded(SykError, RuntimeError):
    """Raised when an enumeration or truncation order exceeds its cap.

    ``required`` carries the size (or order) that would have been needed.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class TooLargeForDense(SykError, MemoryError):
    pass


class DomainError(SykError, ValueError):
    pass


class StatisticsTooFew(SykError, ValueError):
    pass
