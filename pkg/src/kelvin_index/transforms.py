"""Forward index transforms F (over x) and G (over tau), their inversion
formulas, Mellin-transform utilities and the norm-bound constants.

    (F f)(tau) = integral over x of K(x, tau) f(x)
    (G g)(x)   = integral over tau of K(x, tau) g(tau)

with K the kernel of :mod:`kelvin_index.kernel`.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import interpolate, special

from .errors import ConvergenceError, DomainError, InvalidInputError
from .kernel import MB_PREFACTOR, kelvin_argument, mellin_barnes_batch
from .quadrature import (
    ContourSpec,
    Tolerance,
    gl_panels,
    integrate_decaying,
    integrate_interval,
    integrate_vertical_contour,
)
from .specfun import (
    DEFAULT_SERIES,
    KERNEL_VARIANTS,
    SERIES_RADIUS,
    SeriesControl,
    besselk,
    cbeta,
    inversion_kernel_point,
)

EULER_GAMMA = float(np.euler_gamma)
SQRT_PI = math.sqrt(math.pi)
# Kernel Mellin transform: Gamma(s+it) Gamma(s-it) Gamma(s) Gamma(1/2+s) / (8 sqrt(pi)).
_KERNEL_MELLIN = 2.0 * math.pi * MB_PREFACTOR


class TailDivergenceWarning(RuntimeWarning):
    """The weighted inversion integrand had not decayed at the end of the data."""


class DerivativeQualityWarning(RuntimeWarning):
    """Stieltjes derivative taken from a spline of sparse samples."""


class Interpolation(str, enum.Enum):
    CUBIC_SPLINE = "cubic_spline"
    PIECEWISE_LINEAR = "piecewise_linear"


ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a function on a positive, strictly increasing grid.

    Between nodes the function is interpolated; beyond the last node it
    decays like exp(-decay_rate (x - grid[-1])), with the rate fitted from the
    last five samples when not supplied; on (0, grid[0]) the interpolant is
    extended (cubic or linear extrapolation).  Producers that know the function exactly (the forward
    transforms) attach ``evaluator``/``derivative``/``mellin_transform``
    callables, which consumers prefer over the interpolant.
    """

    grid: np.ndarray
    values: np.ndarray
    interpolation: Interpolation = Interpolation.CUBIC_SPLINE
    decay_rate: float | None = None
    evaluator: ArrayFn | None = field(default=None, repr=False)
    derivative: ArrayFn | None = field(default=None, repr=False)
    mellin_transform: ArrayFn | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        grid = np.array(self.grid, dtype=float, copy=True)
        values = np.array(self.values, dtype=float, copy=True)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise InvalidInputError("grid and values must be 1-D arrays of equal length >= 2")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise InvalidInputError("grid and values must be finite")
        if grid[0] <= 0:
            raise InvalidInputError("grid must be positive")
        bad = np.nonzero(np.diff(grid) <= 0)[0]
        if bad.size:
            raise InvalidInputError(f"grid not strictly increasing at index {int(bad[0]) + 1}")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "interpolation", Interpolation(self.interpolation))

    @classmethod
    def from_callable(cls, fn: ArrayFn, grid: Sequence[float], decay_rate: float | None = None,
                      derivative: ArrayFn | None = None) -> "SampledFunction":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(fn(grid), dtype=float), decay_rate=decay_rate,
                   evaluator=fn, derivative=derivative)

    def fitted_decay_rate(self) -> float:
        """Exponential tail rate: supplied, else fitted to the last five samples (0 if no fit)."""
        if self.decay_rate is not None:
            return float(self.decay_rate)
        tail_x, tail_v = self.grid[-5:], self.values[-5:]
        if tail_x.size < 2 or np.any(tail_v == 0) or np.any(np.sign(tail_v) != np.sign(tail_v[-1])):
            return 0.0
        slope = np.polyfit(tail_x, np.log(np.abs(tail_v)), 1)[0]
        return float(max(-slope, 0.0))

    def _spline(self):
        if self.interpolation is Interpolation.CUBIC_SPLINE and self.grid.size >= 4:
            return interpolate.CubicSpline(self.grid, self.values, bc_type="not-a-knot")
        return None

    def interpolate(self, x) -> np.ndarray:
        """Interpolant with the documented extrapolation rules (ignores ``evaluator``)."""
        x = np.asarray(x, dtype=float)
        spline = self._spline()
        inside = spline(x) if spline is not None else np.interp(x, self.grid, self.values)
        rate = self.fitted_decay_rate()
        tail = self.values[-1] * np.exp(-rate * np.maximum(x - self.grid[-1], 0.0)) if rate > 0 else np.zeros_like(x)
        return np.where(x > self.grid[-1], tail, inside)

    def __call__(self, x) -> np.ndarray:
        if self.evaluator is not None:
            return np.asarray(self.evaluator(np.asarray(x, dtype=float)), dtype=float)
        return self.interpolate(x)

    def slope(self, x) -> np.ndarray:
        """Derivative: exact if supplied, else from the interpolant and tail model."""
        x = np.asarray(x, dtype=float)
        if self.derivative is not None:
            return np.asarray(self.derivative(x), dtype=float)
        spline = self._spline()
        if spline is not None:
            inside = spline(x, 1)
        else:
            index = np.clip(np.searchsorted(self.grid, x) - 1, 0, self.grid.size - 2)
            inside = np.diff(self.values)[index] / np.diff(self.grid)[index]
        rate = self.fitted_decay_rate()
        tail = -rate * self.values[-1] * np.exp(-rate * np.maximum(x - self.grid[-1], 0.0))
        return np.where(x > self.grid[-1], tail, inside)

    def scaled(self, factor: float) -> "SampledFunction":
        def wrap(fn):
            return None if fn is None else (lambda x: factor * np.asarray(fn(x)))
        return SampledFunction(self.grid, factor * self.values, self.interpolation, self.decay_rate,
                               wrap(self.evaluator), wrap(self.derivative), wrap(self.mellin_transform))


@dataclass(frozen=True)
class TestFunction:
    """f(x) = sum_k c_k exp(-lambda_k x)."""

    __test__ = False  # not a pytest class

    coefficients: tuple[float, ...]
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        c = tuple(float(v) for v in self.coefficients)
        lam = tuple(float(v) for v in self.rates)
        if len(c) != len(lam) or not c:
            raise InvalidInputError("coefficients and rates must have equal, nonzero length")
        if any(not (r > 0 and math.isfinite(r)) for r in lam) or len(set(lam)) != len(lam):
            raise InvalidInputError("rates must be distinct positive numbers")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "rates", lam)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return sum(c * np.exp(-r * x) for c, r in zip(self.coefficients, self.rates))

    def mellin(self, s):
        """Closed form Gamma(s) sum_k c_k lambda_k^{-s}, valid for Re s > 0."""
        s = np.asarray(s, dtype=complex)
        total = sum(c * np.exp(-s * math.log(r)) for c, r in zip(self.coefficients, self.rates))
        return special.gamma(s) * total

    def constraint_residuals(self) -> tuple[float, float]:
        """f*(1) and f*'(1)."""
        c, lam = np.array(self.coefficients), np.array(self.rates)
        return float(np.sum(c / lam)), float(np.sum(c * (-np.log(lam) - EULER_GAMMA) / lam))

    def roots(self) -> list[float]:
        """Positive zeros of f (at most len(rates) - 1 of them)."""
        top = 60.0 / min(self.rates)
        probe = np.linspace(0.0, top, 6001)
        values = self(probe)
        roots = []
        for k in np.nonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]:
            from scipy.optimize import brentq
            roots.append(float(brentq(lambda t: float(self(t)), probe[k], probe[k + 1], xtol=1e-15)))
        return roots

    def l1_norm(self) -> float:
        """Integral of |f| over (0, inf), exact between consecutive zeros."""
        c, lam = np.array(self.coefficients), np.array(self.rates)

        def primitive(x: float) -> float:
            return float(np.sum(c / lam * (1.0 - np.exp(-lam * x)))) if math.isfinite(x) else float(np.sum(c / lam))

        points = [0.0, *self.roots(), math.inf]
        return math.fsum(abs(primitive(b) - primitive(a)) for a, b in zip(points[:-1], points[1:]))

    def scaled(self, factor: float) -> "TestFunction":
        return TestFunction(tuple(factor * c for c in self.coefficients), self.rates)


@dataclass(frozen=True)
class MellinSpec:
    nu: float = 0.25
    p: float = 2.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.nu):
            raise InvalidInputError("nu must be finite")
        if not self.p >= 1:
            raise InvalidInputError("p must be >= 1")


# ---------------------------------------------------------------------------
# Mellin machinery
# ---------------------------------------------------------------------------

def mellin(f: TestFunction | SampledFunction, s, tol: Tolerance = Tolerance(abs_tol=1e-14, rel_tol=1e-11)):
    """Mellin transform f*(s) = integral of f(x) x^{s-1} dx."""
    s_arr = np.asarray(s, dtype=complex)
    if np.any(s_arr.real <= 0):
        raise DomainError("Re s must be positive (strip of convergence)")
    if isinstance(f, TestFunction):
        value = f.mellin(s_arr)
        return complex(value) if s_arr.ndim == 0 else value
    if f.mellin_transform is not None:
        value = np.asarray(f.mellin_transform(s_arr))
        return complex(value) if s_arr.ndim == 0 else value
    values = [_sampled_mellin(f, complex(point), tol) for point in s_arr.ravel()]
    out = np.array(values).reshape(s_arr.shape)
    return complex(out) if s_arr.ndim == 0 else out


def _sampled_mellin(f: SampledFunction, s: complex, tol: Tolerance) -> complex:
    rate = f.fitted_decay_rate()
    if rate <= 0 and s.real >= 0:
        # Tail is dropped; warn only when the last sample is not negligible.
        if abs(f.values[-1]) > tol.abs_tol:
            warnings.warn("no exponential tail could be fitted; truncating at the grid end", RuntimeWarning)
    # (0, x0) with x = x0 e^{-w}: integrand f(x) x^s decays like e^{-Re(s) w}.
    x0 = f.grid[0]
    head = integrate_decaying(lambda w: f(x0 * np.exp(-w)) * (x0 * np.exp(-w)) ** s, tol, scale=1.0 / s.real).value
    body = integrate_interval(lambda u: f(np.exp(u)) * np.exp(s * u), math.log(f.grid[0]), math.log(f.grid[-1]), tol)
    tail = 0.0
    if rate > 0:
        start = f.grid[-1]
        tail = integrate_decaying(lambda t: f(start + t) * (start + t) ** (s - 1), tol, scale=1.0 / rate).value
    return complex(head + body.value + tail)


def mellin_inverse(fstar: Callable[[np.ndarray], np.ndarray], x, nu: float, decay_rate: float = math.pi / 2,
                   tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-12)) -> np.ndarray:
    """(1/(2 pi i)) integral of fstar(s) x^{-s} ds along Re s = nu, for each x.

    Assumes fstar(conj s) = conj fstar(s) (real f)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    log_x = np.log(x_arr)

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.asarray(fstar(s))[None, :] * np.exp(-s[None, :] * log_x[:, None])

    result = integrate_vertical_contour(integrand, ContourSpec(nu), tol, conjugate_symmetric=True,
                                        decay_rate=decay_rate)
    return np.asarray(result.value)


def parseval_sides(f: TestFunction, g: TestFunction, nu: float = 0.5,
                   tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-12)) -> tuple[float, float]:
    """Both sides of the Parseval equality: integral of f g dx, and
    (1/(2 pi i)) integral of f*(s) g*(1-s) ds along Re s = nu."""
    direct = integrate_decaying(lambda x: f(x) * g(x), tol).value

    def integrand(s: np.ndarray) -> np.ndarray:
        return f.mellin(s) * g.mellin(1.0 - s)

    contour = integrate_vertical_contour(integrand, ContourSpec(nu), tol, conjugate_symmetric=True,
                                         decay_rate=math.pi)
    return float(direct), float(contour.value)


def make_test_function(rates: Sequence[float]) -> TestFunction:
    """Sum of exponentials with f*(1) = f*'(1) = 0 and unit L1 norm.

    c_1 = 1 and the remaining coefficients solve the two moment constraints
    (minimum-norm solution for more than three rates); then everything is
    rescaled so that the integral of |f| equals 1.
    """
    lam = np.asarray([float(r) for r in rates])
    if lam.size < 3:
        raise InvalidInputError("need at least three rates")
    if np.any(lam <= 0) or np.unique(lam).size != lam.size:
        raise InvalidInputError("rates must be distinct and positive")
    rows = np.vstack([1.0 / lam, (-np.log(lam) - EULER_GAMMA) / lam])
    system, rhs = rows[:, 1:], -rows[:, 0]
    if np.linalg.matrix_rank(system, tol=1e-12 * np.abs(system).max()) < 2:
        raise InvalidInputError("degenerate rates: moment system is singular")
    rest = np.linalg.lstsq(system, rhs, rcond=None)[0]
    coefficients = np.concatenate([[1.0], rest])
    raw = TestFunction(tuple(coefficients), tuple(lam))
    return raw.scaled(1.0 / raw.l1_norm())


def weighted_norm(f: TestFunction | SampledFunction, spec: MellinSpec,
                  tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-11)) -> float:
    """||f||_{nu,p} = (integral of |f|^p x^{nu p - 1} dx)^{1/p}."""
    power = spec.nu * spec.p - 1.0
    if power <= -1.0:
        raise DomainError("nu p must be positive for the weighted norm to converge at 0")

    def integrand(x: np.ndarray) -> np.ndarray:
        return np.abs(f(x)) ** spec.p * x**power

    return float(integrate_decaying(integrand, tol).value) ** (1.0 / spec.p)


# ---------------------------------------------------------------------------
# Norm bounds
# ---------------------------------------------------------------------------

def norm_bound_f(spec: MellinSpec) -> float:
    """Constant C with sup_tau |(F f)(tau)| <= C ||f||_{nu,p}:
    4^{nu-3+1/q} q^{4(nu-1)} Gamma^{1/q}(4(1-nu) q) B(1-nu, 1-nu) B(2(1-nu), 2(1-nu)), q = p/(p-1)."""
    nu, p = spec.nu, spec.p
    if not nu < 1:
        raise DomainError("the F bound needs nu < 1")
    a = 4.0 * (1.0 - nu)
    betas = cbeta(1 - nu, 1 - nu).real * cbeta(2 * (1 - nu), 2 * (1 - nu)).real
    if p == 1:
        # q -> infinity: q^{-a} Gamma(a q)^{1/q} -> (a/e)^a
        return float(4.0 ** (nu - 3.0) * (a / math.e) ** a * betas)
    q = p / (p - 1.0)
    log_gamma = special.gammaln(a * q) / q
    return float(math.exp((nu - 3.0 + 1.0 / q) * math.log(4.0) + (nu - 1.0) * 4.0 * math.log(q) + log_gamma) * betas)


def norm_bound_g(gamma: float, spec: ContourSpec | None = None,
                 tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-12)) -> float:
    """C_gamma = 4^{-gamma}/(8 pi) B(gamma, gamma) times the arc-length integral of
    |Gamma(s)|^2 along Re s = gamma."""
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    spec = spec or ContourSpec(gamma)
    if spec.abscissa != gamma:
        spec = ContourSpec(gamma, spec.half_height, spec.panels)

    def integrand(s: np.ndarray) -> np.ndarray:
        return np.abs(special.gamma(s)) ** 2 + 0j

    result = integrate_vertical_contour(integrand, spec, tol, conjugate_symmetric=True, decay_rate=math.pi)
    arc_integral = 2.0 * math.pi * float(result.value)
    return 4.0**-gamma / (8.0 * math.pi) * cbeta(gamma, gamma).real * arc_integral


# ---------------------------------------------------------------------------
# Forward transforms
# ---------------------------------------------------------------------------

FORWARD_TOLERANCE = Tolerance(abs_tol=1e-30, rel_tol=1e-11, max_subdivisions=12)


def _forward_f_mellin(f: TestFunction, tau: np.ndarray, tol: Tolerance) -> np.ndarray:
    """(F f)(tau) = (1/(2 pi i)) integral of kernel-Mellin(s) f*(1-s) ds on Re s = 1/2."""
    def integrand(s: np.ndarray) -> np.ndarray:
        log_gamma = (special.loggamma(s[None, :] + 1j * tau[:, None]) + special.loggamma(s[None, :] - 1j * tau[:, None])
                     + special.loggamma(s) + special.loggamma(0.5 + s))
        return np.exp(log_gamma) * f.mellin(1.0 - s)[None, :]

    result = integrate_vertical_contour(integrand, ContourSpec(0.5), tol, conjugate_symmetric=True,
                                        height_offset=float(np.max(tau)))
    return np.asarray(result.value) * _KERNEL_MELLIN


def _forward_f_composition(f: TestFunction, tau: np.ndarray, panels: int = 48) -> np.ndarray:
    """(F f)(tau) = integral over u of cos(2 u tau) Phi(u), with
    Phi(u) = integral over x of K_0(4 x^{1/4} cosh^{1/2} u) f(x).

    Phi is tabulated once on Gauss-Legendre nodes in u (x = w^4 inside)."""
    slowest = min(f.rates)
    w_top = (60.0 / slowest) ** 0.25
    w, w_weights = gl_panels(0.0, w_top, panels)
    x = w**4
    f_weighted = f(x) * 4.0 * w**3 * w_weights
    # Envelope K_0(4 x^{1/4} cosh^{1/2} u) is below exp(-60) once 4 w cosh^{1/2} u > 62 for every w node.
    u_top = 2.0 * math.acosh(max(1.0, (62.0 / (4.0 * max(w[1], 1e-3))) ** 2) ** 0.5) + 1.0
    u_top = min(u_top, 14.0)
    u, u_weights = gl_panels(0.0, u_top, 2 * panels)
    radius = 4.0 * w[None, :] * np.sqrt(np.cosh(u))[:, None]
    # Real-argument K_0 from scipy: keeps this route independent of the
    # Macdonald-function quadrature used by the kernel definition.
    envelope = special.k0(radius)
    profile = envelope @ f_weighted
    return np.cos(2.0 * np.outer(tau, u)) @ (profile * u_weights)


def _forward_f_direct(f: SampledFunction, tau: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Direct x-quadrature of the kernel against samples (kernel on a shared contour)."""
    rate = f.fitted_decay_rate()
    top = f.grid[-1] + (math.log(max(abs(f.values[-1]), 1e-300) / 1e-17) / rate if rate > 0 else 0.0)
    edges = np.concatenate([[0.0], f.grid[f.grid < top], [top]]) if top > f.grid[-1] else np.concatenate([[0.0], f.grid])
    edges = np.unique(edges)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        # Cube-map the first interval to tame the kernel's x -> 0 behaviour.
        n, w = gl_panels(0.0, 1.0, 2)
        if a == 0.0:
            nodes.append(b * n**3)
            weights.append(b * 3.0 * n**2 * w)
        else:
            nodes.append(a + (b - a) * n)
            weights.append((b - a) * w)
    nodes, weights = np.concatenate(nodes), np.concatenate(weights)
    weighted = f(nodes) * weights
    total = np.zeros(tau.shape)
    for start in range(0, nodes.size, 32):
        chunk = slice(start, start + 32)
        values, _ = mellin_barnes_batch(nodes[chunk], tau, (0,), ContourSpec(0.3), tol)
        total += weighted[chunk] @ values[0]
    return total


def forward_f(f: TestFunction | SampledFunction, tau_grid: Sequence[float], tol: Tolerance = FORWARD_TOLERANCE,
              method: str = "auto") -> SampledFunction:
    """(F f)(tau) on ``tau_grid``.

    ``method``:
      * "mellin_barnes" (TestFunction only; the "auto" choice): one contour
        integral of the kernel's Mellin transform against f*(1-s).  Keeps full
        relative accuracy as (F f) decays like exp(-pi tau).
      * "composition": cosine transform in u of the smooth profile
        Phi(u) = integral of K_0(4 x^{1/4} cosh^{1/2} u) f(x) dx (TestFunction only).
        Absolute accuracy only.
      * "direct" (the "auto" choice for samples): x-quadrature of the kernel.

    For TestFunction input the result carries an exact evaluator, so
    consumers are not limited to the grid.
    """
    tau = np.asarray(tau_grid, dtype=float)
    if tau.ndim != 1 or tau.size < 2 or np.any(np.diff(tau) <= 0) or tau[0] < 0:
        raise InvalidInputError("tau grid must be increasing, nonnegative, with >= 2 points")
    if method == "auto":
        method = "mellin_barnes" if isinstance(f, TestFunction) else "direct"
    if method in ("mellin_barnes", "composition") and not isinstance(f, TestFunction):
        raise InvalidInputError(f"method {method!r} needs a TestFunction")
    if method == "mellin_barnes":
        def evaluate(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            return _forward_f_mellin(f, np.abs(np.atleast_1d(t)), tol).reshape(t.shape)
    elif method == "composition":
        def evaluate(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            return _forward_f_composition(f, np.atleast_1d(t)).reshape(t.shape)
    elif method == "direct":
        def evaluate(t: np.ndarray) -> np.ndarray:
            t = np.asarray(t, dtype=float)
            return _forward_f_direct(f, np.abs(np.atleast_1d(t)), tol).reshape(t.shape)
    else:
        raise InvalidInputError(f"unknown forward_f method {method!r}")
    positive = tau if tau[0] > 0 else np.concatenate([[tau[1] * 1e-9], tau[1:]])
    values = evaluate(tau)
    return SampledFunction(positive, values, decay_rate=math.pi,
                           evaluator=evaluate if isinstance(f, TestFunction) else None)


def tau_quadrature_nodes(g: SampledFunction, tol: Tolerance, panel_width: float = 0.25) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, T] covering the support of g up to tol."""
    rate = g.fitted_decay_rate()
    top = g.grid[-1]
    if rate > 0 and abs(g.values[-1]) > 0:
        top += max(0.0, math.log(abs(g.values[-1]) / (tol.abs_tol * 1e-3))) / rate
    panels = max(8, int(math.ceil(top / panel_width)))
    return gl_panels(0.0, top, panels)


def _g_mellin_moments(g: SampledFunction, s: np.ndarray, tau: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """M(s) = integral of g(tau) Gamma(s+i tau) Gamma(s-i tau) d tau on the given nodes."""
    g_weighted = g(tau) * weights
    out = np.empty(s.shape, dtype=complex)
    for start in range(0, s.size, 512):
        chunk = s[start:start + 512]
        block = np.exp(special.loggamma(chunk[:, None] + 1j * tau[None, :])
                       + special.loggamma(chunk[:, None] - 1j * tau[None, :]))
        out[start:start + 512] = block @ g_weighted
    return out


def _g_contour_family(g: SampledFunction, tol: Tolerance, order: int):
    """Callable x -> order-th derivative of (G g)(x), via the kernel's Mellin-Barnes
    integral with the tau-integral taken first (d/dx under both integrals)."""
    tau, weights = tau_quadrature_nodes(g, tol)
    # x^order d^order(G g)/dx^order is O(1) down to x -> 0 while the contour
    # integrand carries x^{-gamma}; an absolute floor keeps tiny x affordable.
    floor = 1e-30 if order == 0 else 1e-15
    contour_tol = Tolerance(abs_tol=floor, rel_tol=1e-10, max_subdivisions=10)

    def evaluate(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        if np.any(flat <= 0):
            raise DomainError("(G g) is defined for x > 0")
        out = np.empty(flat.shape)
        # Chunks bound the (points x nodes) matrix; far-out points need many nodes.
        for start in range(0, flat.size, 96):
            chunk = flat[start:start + 96]
            log_x = np.log(chunk)
            abscissa = 0.5 if chunk.min() >= 1e-3 else 0.15

            def integrand(s: np.ndarray) -> np.ndarray:
                base = _g_mellin_moments(g, s, tau, weights) * np.exp(special.loggamma(s) + special.loggamma(0.5 + s))
                factor = np.ones_like(s)
                for k in range(order):
                    factor = factor * -(s + k)
                return (base * factor)[None, :] * np.exp(-s[None, :] * log_x[:, None])

            result = integrate_vertical_contour(integrand, ContourSpec(abscissa, panels=32), contour_tol,
                                                conjugate_symmetric=True, height_offset=float(tau[-1]))
            out[start:start + 96] = np.asarray(result.value) * _KERNEL_MELLIN / chunk**order
        return out.reshape(x.shape)

    return evaluate


def forward_g(g: SampledFunction, x_grid: Sequence[float], tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-10),
              method: str = "definition") -> SampledFunction:
    """(G g)(x) on ``x_grid`` by tau-quadrature of the kernel against g.

    ``method="definition"`` uses the Macdonald-function product at every tau
    node; ``"mellin_barnes"`` the contour form with the tau-integral inside.
    The result carries exact ``derivative`` and ``mellin_transform`` callables.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0) or x[0] <= 0:
        raise InvalidInputError("x grid must be positive, strictly increasing, with >= 2 points")
    tau, weights = tau_quadrature_nodes(g, tol)
    if method == "definition":
        g_weighted = g(tau) * weights
        values = np.empty(x.shape)
        for k, point in enumerate(x):
            argument = float(kelvin_argument(point))
            pair = np.asarray(besselk(2j * tau, argument * np.exp(0.25j * np.pi)))
            values[k] = float(np.abs(pair) ** 2 @ g_weighted)
    elif method == "mellin_barnes":
        values = _g_contour_family(g, tol, 0)(x)
    else:
        raise InvalidInputError(f"unknown forward_g method {method!r}")

    def g_mellin(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        flat = np.atleast_1d(s).ravel()
        gamma_s = np.exp(special.loggamma(flat) + special.loggamma(0.5 + flat))
        return (_KERNEL_MELLIN * gamma_s * _g_mellin_moments(g, flat, tau, weights)).reshape(s.shape)

    return SampledFunction(x, values, evaluator=_g_contour_family(g, tol, 0),
                           derivative=_g_contour_family(g, tol, 1), mellin_transform=g_mellin)


# ---------------------------------------------------------------------------
# Inversion formulas
# ---------------------------------------------------------------------------

ARGUMENT_SCALINGS = ("quartic", "square_root")


def _inversion_argument(x: np.ndarray, scaling: str) -> tuple[np.ndarray, np.ndarray]:
    """Kernel argument y(x) and the chain-rule factor (dy/dx) / y."""
    if scaling == "quartic":
        return kelvin_argument(x), 0.25 / x
    if scaling == "square_root":
        return 2.0 * np.sqrt(x), 0.5 / x
    raise InvalidInputError(f"unknown argument scaling {scaling!r}")


def inverse_f(Ff: SampledFunction, x_grid: Sequence[float], ctl: SeriesControl = DEFAULT_SERIES,
              tol: Tolerance = Tolerance(abs_tol=1e-10, rel_tol=1e-8), variant: str = "stated",
              scaling: str = "quartic", panel_width: float = 0.25, tau_max: float | None = None) -> SampledFunction:
    """Inversion of F:
        f(x) = -(16/pi) d/dx integral of Im[Gamma(1+2 i tau) P_{2 i tau}(y(x))] (F f)(tau) tau d tau,
    P the Kelvin I pair, y(x) = 2 (4x)^{1/4}.

    The x-derivative is applied to the series of P.  The tau-integral runs
    over Gauss-Legendre panels and stops once tau e^{pi tau} |F f| has stayed
    below tol.abs_tol for three consecutive panels (or at ``tau_max``, by
    default the end of the data, with a TailDivergenceWarning).

    ``variant="corrected"`` drops Gamma(1+2 i tau) from the kernel and
    ``scaling="square_root"`` uses y = 2 x^{1/2}; neither closes the round
    trip for sums of exponentials (see the decisions ledger), the first
    because its integrand grows like e^{pi tau}/tau.
    """
    if variant not in KERNEL_VARIANTS:
        raise InvalidInputError(f"unknown kernel variant {variant!r}")
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or np.any(x <= 0):
        raise InvalidInputError("x grid must be positive")
    y, chain = _inversion_argument(x, scaling)
    if np.any(y > SERIES_RADIUS):
        raise InvalidInputError("x grid exceeds the inversion kernel's series range")
    limit = float(Ff.grid[-1] if tau_max is None else tau_max)

    if Ff.evaluator is None:
        # Interpolate e^{pi tau} Ff, which is smooth and O(1), not Ff itself.
        spline = interpolate.CubicSpline(Ff.grid, np.exp(math.pi * Ff.grid) * Ff.values)

        def transform(t: np.ndarray) -> np.ndarray:
            return np.exp(-math.pi * t) * spline(t)
    else:
        transform = Ff

    panels = int(math.ceil(limit / panel_width))
    pieces, quiet, stopped = [], 0, False
    for k in range(panels):
        a, b = k * panel_width, min((k + 1) * panel_width, limit)
        nodes, weights = gl_panels(a, b, 1)
        data = np.asarray(transform(nodes))
        weight = nodes * np.exp(math.pi * nodes) * np.abs(data)
        kernel = np.asarray(inversion_kernel_point(nodes[None, :], y[:, None], ctl, variant, derivative=True))
        pieces.append((kernel * (data * nodes * weights)[None, :]).sum(axis=1))
        quiet = quiet + 1 if np.max(weight) < tol.abs_tol else 0
        if quiet >= 3:
            stopped = True
            break
    if not stopped:
        warnings.warn(f"tau e^(pi tau)|Ff| has not decayed below {tol.abs_tol:g} by tau={limit:g}",
                      TailDivergenceWarning, stacklevel=2)
    integral = np.sum(np.array(pieces), axis=0) if pieces else np.zeros_like(x)
    values = -(16.0 / math.pi) * chain * integral
    return SampledFunction(x, values) if x.size >= 2 else _single_point(x, values)


def _single_point(x: np.ndarray, values: np.ndarray) -> SampledFunction:
    return SampledFunction(np.array([x[0], x[0] * (1 + 1e-12)]), np.array([values[0], values[0]]))


def inverse_g(Gg: SampledFunction, x_grid: Sequence[float], ctl: SeriesControl = DEFAULT_SERIES,
              tol: Tolerance = Tolerance(abs_tol=1e-12, rel_tol=1e-8), variant: str = "corrected",
              log_range: tuple[float, float] = (-25.0, 9.0), panel_width: float = 0.25) -> SampledFunction:
    """Inversion of G as a Stieltjes integral against d(G g):

        stated:    g(x) = -(16 x/pi) integral of Im[Gamma(1+2ix) P_{2ix}(2(4t)^{1/4})] (G g)'(t) dt
        corrected: g(x) = +(16 x/pi) integral of Im[P_{2ix}(2(4t)^{1/4})] (G g)'(t) dt

    (P the Kelvin I pair).  Only the corrected form reproduces g in
    round-trip experiments; the default follows that.  The t-integral is
    taken over u = ln t in ``log_range`` (clipped to the series range of P),
    with the derivative from Gg.derivative when available and from the
    spline otherwise.
    """
    if variant not in KERNEL_VARIANTS:
        raise InvalidInputError(f"unknown kernel variant {variant!r}")
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or np.any(x < 0):
        raise InvalidInputError("x grid must be nonnegative")
    if Gg.derivative is None:
        per_decade = Gg.grid.size / max(1.0, math.log10(Gg.grid[-1] / Gg.grid[0]))
        if per_decade < 20:
            warnings.warn("Stieltjes derivative from a sparse spline; expect degraded accuracy",
                          DerivativeQualityWarning, stacklevel=2)
    u_top = min(log_range[1], math.log((SERIES_RADIUS / 2.0) ** 4 / 4.0))
    u_nodes, u_weights = gl_panels(log_range[0], u_top, int(math.ceil((u_top - log_range[0]) / panel_width)))
    t = np.exp(u_nodes)
    measure = Gg.slope(t) * t * u_weights
    y = kelvin_argument(t)
    order = np.abs(x)
    kernel = np.asarray(inversion_kernel_point(order[:, None], y[None, :], ctl, variant))
    sign = -1.0 if variant == "stated" else 1.0
    values = sign * 16.0 * x / math.pi * (kernel @ measure)
    return SampledFunction(x, values) if x.size >= 2 and x[0] > 0 else _raw_result(x, values)


@dataclass(frozen=True)
class PointValues:
    """Result on a grid that may include 0 (not representable as SampledFunction)."""

    grid: np.ndarray
    values: np.ndarray


def _raw_result(x: np.ndarray, values: np.ndarray):
    return PointValues(x, values)


# ---------------------------------------------------------------------------
# Fixtures and the G-side Mellin identity
# ---------------------------------------------------------------------------

def reference_boundary_datum() -> SampledFunction:
    """g(tau) = 4 pi^3 tau^2 exp(-2 pi tau): unit integral, g(0) = g'(0) = 0."""
    def fn(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return 4.0 * math.pi**3 * t**2 * np.exp(-2.0 * math.pi * t)

    return SampledFunction.from_callable(fn, np.linspace(0.01, 8.0, 400), decay_rate=2.0 * math.pi)


def gaussian_bump(center: float = 1.0, width: float = 0.3) -> SampledFunction:
    """Even, tau^2-weighted pair of Gaussians: tau^2 (e^{-(tau-c)^2/2w^2} + e^{-(tau+c)^2/2w^2})."""
    def fn(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return t**2 * (np.exp(-((t - center) ** 2) / (2 * width**2)) + np.exp(-((t + center) ** 2) / (2 * width**2)))

    grid = np.linspace(0.01, center + 12 * width, 400)
    return SampledFunction.from_callable(fn, grid, decay_rate=None)


def g_mellin_identity_sides(g: SampledFunction, y: float, gamma: float = 0.25,
                            tol: Tolerance = Tolerance(abs_tol=1e-16, rel_tol=1e-11)) -> tuple[float, float]:
    """Both sides of the G-side Mellin identity at y > 0:

      lhs = (1/(2 pi i)) integral of Gamma(1/2-s) / (Gamma(s) Gamma(1/2+s)) (G g)*(s) y^{-s} ds,  0 < gamma < 1/2
      rhs = (e^{y/2} / 8) integral of K_{i tau}(y/2) g(tau) / cosh(pi tau) d tau

    (G g)* comes from :func:`forward_g`'s Mellin transform."""
    if not 0 < gamma < 0.5:
        raise DomainError("abscissa must lie in (0, 1/2)")
    Gg = forward_g(g, [0.5, 1.0], method="mellin_barnes")

    def integrand(s: np.ndarray) -> np.ndarray:
        ratio = np.exp(special.loggamma(0.5 - s) - special.loggamma(s) - special.loggamma(0.5 + s))
        return ratio * Gg.mellin_transform(s) * np.exp(-s * math.log(y))

    tau, weights = tau_quadrature_nodes(g, tol)
    lhs = integrate_vertical_contour(integrand, ContourSpec(gamma, panels=32), tol, conjugate_symmetric=True,
                                     decay_rate=math.pi / 2, height_offset=float(tau[-1])).value
    macdonald = np.asarray(besselk(1j * tau, y / 2.0)).real
    rhs = math.exp(y / 2.0) / 8.0 * float(np.sum(macdonald * g(tau) / np.cosh(math.pi * tau) * weights))
    return float(lhs), rhs


def lebedev_ratio(x, tau) -> np.ndarray:
    """K_{i tau}(1/sqrt(x))^2 sinh(pi tau) / x^{1/4}; the inequality under test claims <= 1."""
    x_arr, t_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(tau, dtype=float))
    k = np.asarray(besselk(1j * t_arr, 1.0 / np.sqrt(x_arr))).real
    return k**2 * np.sinh(math.pi * t_arr) / x_arr**0.25


def round_trip_error(reference: np.ndarray, recovered: np.ndarray) -> float:
    """max |recovered - reference| / max |reference|."""
    reference, recovered = np.asarray(reference), np.asarray(recovered)
    return float(np.max(np.abs(recovered - reference)) / np.max(np.abs(reference)))
