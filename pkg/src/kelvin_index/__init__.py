"""Numerical toolkit for the index transforms with kernel
K(x, tau) = ker^2_{2i tau}(2(4x)^{1/4}) + kei^2_{2i tau}(2(4x)^{1/4}):
special functions, quadrature engines, the kernel in three representations,
forward and inverse transforms, the wedge boundary-value problem, and
verification suites behind a command-line front end."""

from .errors import ConvergenceError, DomainError, InvalidInputError, KelvinIndexError

__version__ = "0.1.0"

__all__ = ["ConvergenceError", "DomainError", "InvalidInputError", "KelvinIndexError", "__version__"]
