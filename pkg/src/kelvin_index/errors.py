"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: ``InvalidInputError`` and its subclasses
give 2, ``ConvergenceError`` gives 3.
"""


class KelvinIndexError(Exception):
    """Base class for all library errors."""


class InvalidInputError(KelvinIndexError, ValueError):
    """Arguments violate a documented precondition."""


class DomainError(InvalidInputError):
    """Argument outside the mathematical domain (e.g. Re z <= 0 for K)."""


class PoleError(DomainError):
    """Argument sits on a pole of the gamma function."""


class SeriesRangeError(InvalidInputError):
    """Ascending series requested beyond the cancellation-safe radius."""


class ConvergenceError(KelvinIndexError, ArithmeticError):
    """A quadrature or series failed to meet its tolerance."""


class TruncationError(ConvergenceError):
    """Contour truncation error exceeds the tolerance at a fixed half-height."""
