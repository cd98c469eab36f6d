"""The index kernel  K(x, tau) = ker^2_{2i tau}(2(4x)^{1/4}) + kei^2_{2i tau}(2(4x)^{1/4}).

Three independent evaluation routes are provided:

* ``kernel_definition``: product of two Macdonald functions at rotated argument;
* ``kernel_mellin_barnes``: vertical-line integral of
  Gamma(s+i tau) Gamma(s-i tau) Gamma(s) Gamma(1/2+s) x^{-s} / (16 pi^{3/2});
* ``kernel_fourier_cosine``: cosine transform in u of K_0(4 x^{1/4} cosh^{1/2} u).

x-derivatives up to order four come from the Mellin-Barnes integrand, which
also yields the fourth-order ODE residual.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .quadrature import ContourSpec, QuadResult, Tolerance, integrate_fourier_cosine, integrate_vertical_contour
from .specfun import besselk, kelvin_k_pair_sq

X_RANGE = (1e-3, 1e3)
TAU_RANGE = (0.0, 10.0)
MB_PREFACTOR = 1.0 / (16.0 * math.pi**1.5)
# (1/(2 pi i)) ds-integral times 2 pi, times the prefactor above.
_CONTOUR_TO_KERNEL = 2.0 * math.pi * MB_PREFACTOR

CONTOUR_TOLERANCE = Tolerance(abs_tol=1e-30, rel_tol=1e-12, max_subdivisions=10)
COSINE_TOLERANCE = Tolerance(abs_tol=1e-16, rel_tol=1e-11)


class KernelRangeWarning(UserWarning):
    """Evaluation outside the supported envelope x in [1e-3, 1e3], tau in [0, 10]."""


class KernelMethod(str, enum.Enum):
    DEFINITION = "definition"
    MELLIN_BARNES = "mellin_barnes"
    FOURIER_COSINE = "fourier_cosine"


@dataclass(frozen=True)
class KernelValue:
    value: float
    err_estimate: float
    method: KernelMethod


@dataclass(frozen=True)
class KernelJet:
    """Kernel value and x-derivatives d0..d4 at one point."""

    x: float
    tau: float
    d0: float
    d1: float
    d2: float
    d3: float
    d4: float

    @property
    def derivatives(self) -> tuple[float, float, float, float, float]:
        return (self.d0, self.d1, self.d2, self.d3, self.d4)


def _check_point(x: float, tau: float) -> tuple[float, float]:
    x, tau = float(x), abs(float(tau))
    if not (x > 0 and math.isfinite(x) and math.isfinite(tau)):
        raise DomainError(f"kernel needs finite x > 0, got x={x}, tau={tau}")
    if not (X_RANGE[0] <= x <= X_RANGE[1] and tau <= TAU_RANGE[1]):
        warnings.warn(f"kernel evaluated outside the supported envelope at x={x}, tau={tau}",
                      KernelRangeWarning, stacklevel=3)
    return x, tau


def kelvin_argument(x):
    """The Kelvin-function argument 2 (4x)^{1/4}."""
    return 2.0 * (4.0 * np.asarray(x, dtype=float)) ** 0.25


def default_contour(x: float) -> ContourSpec:
    """Abscissa 1/2 inside the supported range, pulled toward 0 for tiny x
    (x^{-s} then grows like x^{-gamma} along the line)."""
    if x >= X_RANGE[0]:
        return ContourSpec(abscissa=0.5)
    return ContourSpec(abscissa=0.15)


def kernel_definition(x: float, tau: float) -> KernelValue:
    """Canonical value |K_{2 i tau}(2 (4x)^{1/4} e^{i pi/4})|^2.

    Below x = 1e-3 the Mellin-Barnes route is used instead (tagged as such).
    """
    x, tau = _check_point(x, tau)
    if x < X_RANGE[0]:
        return kernel_mellin_barnes(x, tau)
    value, residue = kelvin_k_pair_sq(tau, float(kelvin_argument(x)), return_residue=True)
    return KernelValue(float(value), 4e-13 * abs(value) + residue, KernelMethod.DEFINITION)


def _pochhammer_factor(s: np.ndarray, order: int) -> np.ndarray:
    factor = np.ones_like(s)
    for k in range(order):
        factor = factor * (s + k)
    return (-1) ** order * factor


def mellin_barnes_batch(x, tau, orders=(0,), spec: ContourSpec | None = None,
                        tol: Tolerance = CONTOUR_TOLERANCE) -> tuple[np.ndarray, QuadResult]:
    """x-derivatives of the kernel on a grid from one shared contour.

    Returns an array of shape (len(orders), len(x), len(tau)); entry
    [n, i, j] is the orders[n]-th x-derivative at (x[i], tau[j]).  All points
    share the same contour nodes, so values are smooth functions of x.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    tau_arr = np.abs(np.atleast_1d(np.asarray(tau, dtype=float)))
    if np.any(x_arr <= 0):
        raise DomainError("kernel needs x > 0")
    if spec is None:
        spec = default_contour(float(np.min(x_arr)))
    if spec.abscissa <= 0:
        raise DomainError("Mellin-Barnes contour needs a positive abscissa")
    log_x = np.log(x_arr)

    def integrand(s: np.ndarray) -> np.ndarray:
        gamma_tau = special.loggamma(s[None, :] + 1j * tau_arr[:, None]) + special.loggamma(
            s[None, :] - 1j * tau_arr[:, None])
        gamma_s = special.loggamma(s) + special.loggamma(0.5 + s)
        log_base = gamma_tau[None, :, :] + gamma_s[None, None, :] - s[None, None, :] * log_x[:, None, None]
        base = np.exp(log_base)
        stacked = [base * (_pochhammer_factor(s, n) / x_arr[:, None, None] ** n) for n in orders]
        return np.stack(stacked)

    result = integrate_vertical_contour(integrand, spec, tol, conjugate_symmetric=True,
                                        height_offset=float(np.max(tau_arr)))
    return np.asarray(result.value) * _CONTOUR_TO_KERNEL, result


def kernel_mellin_barnes(x: float, tau: float, spec: ContourSpec | None = None,
                         tol: Tolerance = CONTOUR_TOLERANCE) -> KernelValue:
    """Kernel from its Mellin-Barnes integral along Re s = spec.abscissa."""
    x, tau = _check_point(x, tau)
    values, result = mellin_barnes_batch([x], [tau], (0,), spec, tol)
    return KernelValue(float(values[0, 0, 0]), result.err_estimate * _CONTOUR_TO_KERNEL,
                       KernelMethod.MELLIN_BARNES)


def kernel_fourier_cosine(x: float, tau: float, tol: Tolerance = COSINE_TOLERANCE) -> KernelValue:
    """Kernel as the cosine transform (frequency 2 tau) of K_0(4 x^{1/4} cosh^{1/2} u)."""
    x, tau = _check_point(x, tau)
    radius = 4.0 * x**0.25

    def envelope(u: np.ndarray) -> np.ndarray:
        return besselk(0.0, radius * np.sqrt(np.cosh(u))).real

    result = integrate_fourier_cosine(envelope, 2.0 * tau, tol, scale=1.0)
    return KernelValue(float(np.real(result.value)), result.err_estimate, KernelMethod.FOURIER_COSINE)


def kernel_jet(x: float, tau: float, spec: ContourSpec | None = None,
               tol: Tolerance = CONTOUR_TOLERANCE) -> KernelJet:
    """Kernel and its first four x-derivatives, differentiated under the contour integral."""
    x, tau = _check_point(x, tau)
    values, _ = mellin_barnes_batch([x], [tau], (0, 1, 2, 3, 4), spec, tol)
    d = values[:, 0, 0]
    return KernelJet(x, tau, *(float(v) for v in d))


def ode_terms(jet: KernelJet) -> np.ndarray:
    x, t2 = jet.x, jet.tau**2
    return np.array([
        x**3 * jet.d4,
        5.5 * x**2 * jet.d3,
        x * (5.5 + t2) * jet.d2,
        0.5 * (1.0 + t2) * jet.d1,
        -jet.d0,
    ])


def ode_residual(jet: KernelJet) -> float:
    """Normalized residual of x^3 K'''' + 11/2 x^2 K''' + x(11/2 + tau^2) K'' + (1+tau^2)/2 K' - K."""
    terms = ode_terms(jet)
    return float(math.fsum(terms) / np.max(np.abs(terms)))


def operator_residual(jet: KernelJet) -> float:
    """Normalized residual of (d/dx x^{1/2} d/dx)((x d/dx)^2 + tau^2) K - K / sqrt(x).

    With w = x^2 K'' + x K' + tau^2 K the left side is sqrt(x) w'' + w' / (2 sqrt(x)),
    where w' and w'' are expanded from the jet.
    """
    x, t2 = jet.x, jet.tau**2
    w1 = x**2 * jet.d3 + 3.0 * x * jet.d2 + (1.0 + t2) * jet.d1
    w2 = x**2 * jet.d4 + 5.0 * x * jet.d3 + (4.0 + t2) * jet.d2
    root = math.sqrt(x)
    terms = np.array([root * w2, 0.5 * w1 / root, -jet.d0 / root])
    return float(math.fsum(terms) / np.max(np.abs(terms)))
