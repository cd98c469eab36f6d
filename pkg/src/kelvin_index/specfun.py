"""Special functions of complex argument and complex order.

* gamma and beta (complex log-gamma from scipy, with pole checks);
* the Macdonald function K_nu(z) from its integral representation;
* I_nu(z) and 0F3 from ascending series with compensated summation;
* the squared Kelvin pairs at order 2i tau and the inversion kernel built
  from the I pair.

Every function accepts scalars or numpy arrays (broadcast together) and
returns a scalar for scalar input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError, InvalidInputError, PoleError, SeriesRangeError
from .quadrature import Tolerance, gl_panels, integrate_fourier_cosine, integrate_interval

SERIES_RADIUS = 30.0
POLE_TOLERANCE = 1e-14
SQRT_PI = math.sqrt(math.pi)
QUARTER_TURN = np.exp(0.25j * np.pi)


@dataclass(frozen=True)
class SeriesControl:
    rel_tol: float = 1e-16
    max_terms: int = 2000
    min_terms: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.rel_tol < 1:
            raise InvalidInputError("rel_tol must lie in (0, 1)")
        if self.min_terms < 1 or self.max_terms < 1 or self.min_terms > self.max_terms:
            raise InvalidInputError("need 1 <= min_terms <= max_terms")


DEFAULT_SERIES = SeriesControl()


def _unwrap(value: np.ndarray, scalar: bool):
    if scalar:
        value = value[()]
        return complex(value) if np.iscomplexobj(value) else float(value)
    return value


def _check_finite(*arrays: np.ndarray) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("arguments must be finite")


def _near_nonpositive_integer(z: np.ndarray) -> np.ndarray:
    nearest = np.round(z.real)
    return (nearest <= 0) & (np.abs(z - nearest) <= POLE_TOLERANCE * np.maximum(1.0, np.abs(nearest)))


def clgamma(z):
    """A logarithm of Gamma(z) (principal branch of scipy's loggamma)."""
    z_arr = np.asarray(z, dtype=complex)
    _check_finite(z_arr)
    if np.any(_near_nonpositive_integer(z_arr)):
        raise PoleError("gamma pole at a nonpositive integer")
    return _unwrap(special.loggamma(z_arr), z_arr.ndim == 0)


def cgamma(z):
    """Gamma(z) for complex z; PoleError at 0, -1, -2, ..."""
    z_arr = np.asarray(z, dtype=complex)
    _check_finite(z_arr)
    if np.any(_near_nonpositive_integer(z_arr)):
        raise PoleError("gamma pole at a nonpositive integer")
    return _unwrap(special.gamma(z_arr), z_arr.ndim == 0)


def cbeta(a, b):
    """Euler beta function Gamma(a) Gamma(b) / Gamma(a + b)."""
    a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    for arg in (a_arr, b_arr, a_arr + b_arr):
        if np.any(_near_nonpositive_integer(arg)):
            raise PoleError("beta function argument at a gamma pole")
    log_value = special.loggamma(a_arr) + special.loggamma(b_arr) - special.loggamma(a_arr + b_arr)
    return _unwrap(np.exp(log_value), a_arr.ndim == 0)


# ---------------------------------------------------------------------------
# Macdonald function K_nu(z)
# ---------------------------------------------------------------------------

def _contour_offsets(nu: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Imaginary offset of the integration line through (or near) the saddle.

    K_nu(z) = 1/2 * integral over the real line of exp(-z cosh y + nu y); the
    line may be moved to Im y = c as long as |arg z| + |c| < pi/2.  Passing
    near the saddle z sinh y = nu removes the exp(pi |Im nu| / 2) cancellation
    that ruins the real-line integral at large imaginary order.
    """
    room = 0.5 * np.pi - np.abs(np.angle(z))
    saddle = np.arcsinh(nu / z).imag
    return np.clip(saddle, -0.9 * room, 0.9 * room)


def _log_magnitude(t: np.ndarray, nu: np.ndarray, z: np.ndarray, c: np.ndarray) -> np.ndarray:
    y = t + 1j * c[:, None]
    return (-(z[:, None] * np.cosh(y)) + nu[:, None] * y).real


def _support(nu: np.ndarray, z: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interval of t carrying all but exp(-45) of the integrand's peak magnitude."""
    decay = np.minimum((z * np.exp(1j * c)).real, (z * np.exp(-1j * c)).real)
    reach = np.log(2.0 * (60.0 + np.abs(nu) * 10.0) / decay) + 2.0
    reach = np.log(2.0 * (60.0 + np.abs(nu) * reach) / decay) + 2.0
    span = float(np.max(reach))
    probe = np.linspace(-span, span, 4001)
    log_mag = _log_magnitude(probe, nu, z, c)
    keep = log_mag >= np.max(log_mag, axis=1, keepdims=True) - 45.0
    first = np.argmax(keep, axis=1)
    last = keep.shape[1] - 1 - np.argmax(keep[:, ::-1], axis=1)
    step = probe[1] - probe[0]
    return probe[first] - step, probe[last] + step


def besselk(order, z, rel_tol: float = 1e-13):
    """Macdonald function K_order(z) for complex order and Re z > 0.

    Evaluated from K = 1/2 * integral of exp(-z cosh y + order * y) over a
    horizontal line Im y = c chosen near the saddle point, with composite
    Gauss-Legendre panels doubled until the relative change is below rel_tol.
    """
    nu_arr, z_arr = np.broadcast_arrays(np.asarray(order, dtype=complex), np.asarray(z, dtype=complex))
    scalar = nu_arr.ndim == 0
    nu, zz = nu_arr.ravel(), z_arr.ravel()
    _check_finite(nu, zz)
    if np.any(zz.real <= 0):
        raise DomainError("besselK requires Re z > 0")
    result = np.empty(nu.shape, dtype=complex)
    # Evaluate in chunks so the node matrix stays small.
    for start in range(0, nu.size, 64):
        chunk = slice(start, start + 64)
        result[chunk] = _besselk_block(nu[chunk], zz[chunk], rel_tol)
    return _unwrap(result.reshape(nu_arr.shape), scalar)


def _real_support(nu: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exp(-z cosh t + |nu| t) < exp(-46) beyond |t| = reach
    reach = np.arccosh(1.0 + 46.0 / z)
    for _ in range(3):
        reach = np.arccosh(1.0 + (46.0 + np.abs(nu) * reach) / z)
    return -reach, reach


def _besselk_block(nu: np.ndarray, z: np.ndarray, rel_tol: float) -> np.ndarray:
    c = _contour_offsets(nu, z)
    if np.all(nu.imag == 0) and np.all(z.imag == 0):
        lo, hi = _real_support(nu.real, z.real)
    else:
        lo, hi = _support(nu, z, c)
    width = hi - lo
    previous, panels, shift = None, 8, None
    while panels <= 8192:
        xi, w = gl_panels(0.0, 1.0, panels)
        y = lo[:, None] + width[:, None] * xi[None, :] + 1j * c[:, None]
        # cosh y = 1 + 2 sinh^2(y/2); the constant -z is applied at the end,
        # which keeps the exponent accurate when |z| is large.
        exponent = -2.0 * z[:, None] * np.sinh(0.5 * y) ** 2 + nu[:, None] * y
        if shift is None:
            # Scale out the peak so that deep underflow cannot stall the test.
            shift = np.max(exponent.real, axis=1)
        integrand = np.exp(exponent - shift[:, None])
        value = 0.5 * width * (integrand @ w)
        if previous is not None:
            size = 0.5 * width * (np.abs(integrand) @ w)
            change = np.abs(value - previous)
            if np.all(change <= np.maximum(rel_tol * np.abs(value), 1e-15 * size)):
                return value * np.exp(shift - z)
        previous = value
        panels *= 2
    raise ConvergenceError("besselK quadrature did not converge")


def besselk_real_line(order: complex, z: complex, tol: Tolerance = Tolerance(abs_tol=1e-300, rel_tol=1e-12)) -> complex:
    """K_order(z) from the half-line integral of exp(-z cosh y) cosh(order y).

    The integrand is truncated at y_max = arccosh((ln(1/eps) + |Im order| pi)/Re z + 1)
    with eps = 1e-16.  This is the textbook route; it loses relative accuracy
    like exp(pi |Im order| / 2) and is kept as an independent check on
    :func:`besselk`.
    """
    nu, zz = complex(order), complex(z)
    if zz.real <= 0:
        raise DomainError("besselK requires Re z > 0")
    y_max = math.acosh((math.log(1e16) + abs(nu.imag) * math.pi) / zz.real + 1.0)

    def integrand(y: np.ndarray) -> np.ndarray:
        return np.exp(-zz * np.cosh(y)) * np.cosh(nu * y)

    return complex(integrate_interval(integrand, 0.0, y_max, tol).value)


# ---------------------------------------------------------------------------
# Ascending series
# ---------------------------------------------------------------------------

def _sum_series(first: np.ndarray, ratio, ctl: SeriesControl, growth_terms: np.ndarray | float = 0.0) -> np.ndarray:
    """Sum first * prod(ratio(k)) over k with Neumaier compensation.

    ``ratio(k)`` returns term_{k+1} / term_k.  Terms are allowed to grow for
    ``growth_terms`` steps before the stopping test is applied.
    """
    term = np.array(first, dtype=complex)
    total = term.copy()
    carry = np.zeros_like(total)
    quiet = np.zeros(total.shape, dtype=int)
    for k in range(ctl.max_terms):
        term = term * ratio(k)
        updated = total + term
        big = np.abs(total) >= np.abs(term)
        carry += np.where(big, (total - updated) + term, (term - updated) + total)
        total = updated
        small = np.abs(term) <= ctl.rel_tol * np.abs(total + carry)
        quiet = np.where(small & (k + 1 >= np.maximum(ctl.min_terms, growth_terms)), quiet + 1, 0)
        if np.all((quiet >= 2) | (term == 0)):
            return total + carry
    raise ConvergenceError(f"series did not converge in {ctl.max_terms} terms")


def _hyp0f1(b: np.ndarray, w: np.ndarray, ctl: SeriesControl) -> np.ndarray:
    """0F1(; b; w) = sum w^k / (k! (b)_k)."""
    return _sum_series(np.ones(np.broadcast(b, w).shape), lambda k: w / ((k + 1) * (b + k)), ctl,
                       growth_terms=np.sqrt(np.abs(w)) + 1)


def _hyp0f1_derivative_factor(b: np.ndarray, w: np.ndarray, ctl: SeriesControl) -> np.ndarray:
    """sum k w^k / (k! (b)_k), i.e. w * d/dw 0F1(; b; w)."""
    return w / b * _hyp0f1(b + 1, w, ctl)


def besseli(order, z, ctl: SeriesControl = DEFAULT_SERIES):
    """Modified Bessel function I_order(z) from its ascending series.

    Raises SeriesRangeError for |z| > SERIES_RADIUS, where cancellation in the
    complex-order series would eat the double-precision budget.
    """
    nu, zz = np.broadcast_arrays(np.asarray(order, dtype=complex), np.asarray(z, dtype=complex))
    scalar = nu.ndim == 0
    _check_finite(nu, zz)
    if np.any(np.abs(zz) > SERIES_RADIUS):
        raise SeriesRangeError(f"|z| exceeds the series radius {SERIES_RADIUS}")
    # I_{-n} = I_n for integer n; use the regular branch.
    integer_negative = _near_nonpositive_integer(nu) & (nu.real < 0)
    nu = np.where(integer_negative, -nu, nu)
    if np.any((zz == 0) & (nu.real < 0)):
        raise DomainError("I_nu(0) is infinite for Re nu < 0")
    half = zz / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.where(zz == 0, np.where(nu == 0, 1.0, 0.0),
                        np.exp(nu * np.log(np.where(zz == 0, 1.0, half))) * special.rgamma(nu + 1))
    series = _hyp0f1(nu + 1, half * half, ctl)
    return _unwrap(lead * series, scalar)


def hyper0f3(a1, a2, a3, z, ctl: SeriesControl = DEFAULT_SERIES):
    """Generalized hypergeometric 0F3(; a1, a2, a3; z)."""
    b1, b2, b3, zz = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a1, a2, a3, z)))
    scalar = zz.ndim == 0
    _check_finite(b1, b2, b3, zz)
    if any(np.any(_near_nonpositive_integer(b)) for b in (b1, b2, b3)):
        raise PoleError("0F3 parameter at a nonpositive integer")
    if np.any(np.abs(zz) > SERIES_RADIUS**3):
        raise SeriesRangeError("0F3 argument beyond the series guard")
    growth = np.abs(zz) ** 0.25 + 1
    total = _sum_series(np.ones(zz.shape), lambda n: zz / ((n + 1) * (b1 + n) * (b2 + n) * (b3 + n)), ctl, growth)
    return _unwrap(total, scalar)


# ---------------------------------------------------------------------------
# Kelvin pairs of order 2 i tau
# ---------------------------------------------------------------------------

def _check_tau_x(tau, x) -> tuple[np.ndarray, np.ndarray]:
    t_arr, x_arr = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(x, dtype=float))
    _check_finite(t_arr, x_arr)
    if np.any(x_arr <= 0):
        raise DomainError("argument must be positive")
    return t_arr, x_arr


def kelvin_k_pair_sq(tau, x, return_residue: bool = False):
    """ker^2 + kei^2 at order 2 i tau: K_nu(x e^{i pi/4}) K_nu(x e^{-i pi/4}), nu = 2 i tau.

    The two factors are evaluated separately; with ``return_residue`` the
    imaginary part of their product (zero in exact arithmetic) is returned too.
    """
    t_arr, x_arr = _check_tau_x(tau, x)
    nu = 2j * t_arr
    up = besselk(nu, x_arr * QUARTER_TURN)
    down = besselk(nu, x_arr * np.conj(QUARTER_TURN))
    product = np.asarray(up * down)
    value = _unwrap(product.real, t_arr.ndim == 0)
    if return_residue:
        return value, _unwrap(np.abs(product.imag), t_arr.ndim == 0)
    return value


def _i_pair_parts(tau: np.ndarray, y: np.ndarray, ctl: SeriesControl, with_derivative: bool):
    """Pieces of the I pair: P = (y/2)^{2 nu} A(y) / Gamma(1+nu)^2.

    A(y) = 0F1(; 1+nu; i y^2/4) * 0F1(; 1+nu; -i y^2/4).  Returns log of the
    power prefactor, A, and (optionally) y * A'(y).
    """
    if np.any(y > SERIES_RADIUS):
        raise SeriesRangeError(f"argument exceeds the series radius {SERIES_RADIUS}")
    nu = 2j * tau
    b = 1.0 + nu
    w = 0.25j * y * y
    up, down = _hyp0f1(b, w, ctl), _hyp0f1(b, -w, ctl)
    log_power = 2.0 * nu * np.log(y / 2.0)
    if not with_derivative:
        return log_power, up * down, None
    # y d/dy 0F1(; b; c y^2) = 2 * (w d/dw 0F1)(w = c y^2)
    y_up = 2.0 * _hyp0f1_derivative_factor(b, w, ctl)
    y_down = 2.0 * _hyp0f1_derivative_factor(b, -w, ctl)
    return log_power, up * down, y_up * down + up * y_down


def kelvin_i_pair_sq(tau, x, ctl: SeriesControl = DEFAULT_SERIES):
    """ber^2 + bei^2 at order 2 i tau: I_nu(x e^{i pi/4}) I_nu(x e^{-i pi/4}), nu = 2 i tau."""
    t_arr, x_arr = _check_tau_x(tau, x)
    log_power, series, _ = _i_pair_parts(t_arr, x_arr, ctl, False)
    value = np.exp(log_power - 2.0 * special.loggamma(1.0 + 2j * t_arr)) * series
    return _unwrap(value, t_arr.ndim == 0)


def kelvin_i_pair_sq_0f3(tau, x, ctl: SeriesControl = DEFAULT_SERIES):
    """The I pair from the product formula
    (x/2)^{2 nu} / Gamma(1+nu)^2 * 0F3(1+nu, (1+nu)/2, (2+nu)/2; x^4/64).

    Independent of :func:`kelvin_i_pair_sq` (one 0F3 instead of two 0F1)."""
    t_arr, x_arr = _check_tau_x(tau, x)
    nu = 2j * t_arr
    series = hyper0f3(1 + nu, (1 + nu) / 2, (2 + nu) / 2, x_arr**4 / 64.0, ctl)
    value = np.exp(2.0 * nu * np.log(x_arr / 2.0) - 2.0 * special.loggamma(1.0 + nu)) * series
    return _unwrap(value, t_arr.ndim == 0)


KERNEL_VARIANTS = ("stated", "corrected")


def inversion_kernel_point(tau, arg, ctl: SeriesControl = DEFAULT_SERIES, variant: str = "stated",
                           derivative: bool = False):
    """Inversion kernel Im[Gamma(1+2 i tau) (ber^2 + bei^2)_{2 i tau}(arg)].

    ``variant="corrected"`` drops the Gamma(1+2 i tau) factor, giving
    Im[(ber^2 + bei^2)_{2 i tau}(arg)]; see the decisions ledger for why.
    With ``derivative`` the value returned is arg * d/d(arg) of the kernel.
    """
    if variant not in KERNEL_VARIANTS:
        raise InvalidInputError(f"unknown inversion kernel variant {variant!r}")
    t_arr, y_arr = _check_tau_x(tau, arg)
    nu = 2j * t_arr
    log_power, series, y_series = _i_pair_parts(t_arr, y_arr, ctl, derivative)
    log_gamma = special.loggamma(1.0 + nu)
    scale = -log_gamma if variant == "stated" else -2.0 * log_gamma
    prefactor = np.exp(log_power + scale)
    if derivative:
        value = prefactor * (2.0 * nu * series + y_series)
    else:
        value = prefactor * series
    return _unwrap(value.imag, t_arr.ndim == 0)


# ---------------------------------------------------------------------------
# Hypergeometric identities used by the inversion formulas
# ---------------------------------------------------------------------------

def hypergeometric_pair_combination(tau, x, ctl: SeriesControl = DEFAULT_SERIES):
    """The two-term 0F3 combination
    2 sqrt(pi) x^{i tau - 1} / (tau sinh(2 pi tau) Gamma(2 i tau)) 0F3(1/2+i tau, 1+i tau, 1+2 i tau; x/4)
    plus its complex conjugate (tau > 0)."""
    t_arr, x_arr = _check_tau_x(tau, x)
    if np.any(t_arr <= 0):
        raise DomainError("tau must be positive")
    it = 1j * t_arr
    series = hyper0f3(0.5 + it, 1 + it, 1 + 2 * it, x_arr / 4.0, ctl)
    term = 2 * SQRT_PI * np.exp((it - 1) * np.log(x_arr) - special.loggamma(2 * it)) * series
    return _unwrap(2.0 * term.real / (t_arr * np.sinh(2 * np.pi * t_arr)), t_arr.ndim == 0)


def kelvin_pair_combination(tau, x, ctl: SeriesControl = DEFAULT_SERIES):
    """-(8 sqrt(pi) tau / (x sinh 2 pi tau)) [Gamma(2 i tau) P_{2 i tau}(2 x^{1/4}) + conjugate],
    P the I pair; equal to :func:`hypergeometric_pair_combination`."""
    t_arr, x_arr = _check_tau_x(tau, x)
    if np.any(t_arr <= 0):
        raise DomainError("tau must be positive")
    pair = np.asarray(kelvin_i_pair_sq(t_arr, 2 * x_arr**0.25, ctl))
    term = np.exp(special.loggamma(2j * t_arr)) * pair
    value = -8 * SQRT_PI * t_arr / (x_arr * np.sinh(2 * np.pi * t_arr)) * 2.0 * term.real
    return _unwrap(value, t_arr.ndim == 0)


def gamma_ratio_residue_sum(tau, x, ctl: SeriesControl = DEFAULT_SERIES):
    """Residue series of (1/2 pi i) * integral of
    Gamma(s-1+i tau) Gamma(s-1-i tau) / (Gamma(2-s) Gamma(3/2-s)) (x/4)^{-s} ds,
    summed term by term from the gamma-function residues (tau > 0)."""
    t_arr, x_arr = _check_tau_x(tau, x)
    if np.any(t_arr <= 0):
        raise DomainError("tau must be positive")
    it = 1j * t_arr
    quarter = x_arr / 4.0
    # n = 0 term, then ratio of consecutive terms.
    first = np.exp((it - 1) * np.log(quarter) + special.loggamma(-2 * it)
                   - special.loggamma(1 + it) - special.loggamma(0.5 + it))

    def ratio(n: int):
        # Gamma(-n-1-2it)/Gamma(-n-2it) = 1/(-n-1-2it)
        return -quarter / (n + 1) / (-n - 1 - 2 * it) / ((1 + it + n) * (0.5 + it + n))

    total = _sum_series(first, ratio, ctl, growth_terms=np.sqrt(np.abs(quarter)) + 1)
    return _unwrap(2.0 * total.real, t_arr.ndim == 0)


def gamma_pair_cosine_sides(s: float, y: float,
                            tol: Tolerance = Tolerance(abs_tol=1e-15, rel_tol=1e-12)) -> tuple[float, float]:
    """Both sides of the cosine-transform pair for |Gamma(s + i tau)|^2 (s > 0):

        integral_0^inf Gamma(s+i tau) Gamma(s-i tau) cos(tau y) d tau  and  pi 2^{-2s} Gamma(2s) / cosh^{2s}(y/2).
    """
    if not s > 0:
        raise DomainError("s must be positive")

    def envelope(t: np.ndarray) -> np.ndarray:
        return np.exp(2.0 * special.loggamma(s + 1j * np.asarray(t)).real)

    lhs = float(np.real(integrate_fourier_cosine(envelope, y, tol, scale=1.0).value))
    rhs = math.pi * 2.0 ** (-2 * s) * math.gamma(2 * s) / math.cosh(y / 2.0) ** (2 * s)
    return lhs, rhs
