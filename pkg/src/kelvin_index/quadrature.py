"""Integration engines: decaying half-line integrals, Fourier-cosine integrals
and truncated vertical-line contour integrals.

All engines use 15-point Gauss-Legendre panels.  Integrands are called with a
1-D numpy array of nodes and must return an array of the same length (or, for
the contour engine, an array whose last axis runs over the nodes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConvergenceError, InvalidInputError, TruncationError

GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative accuracy request plus a refinement budget.

    ``max_subdivisions`` bounds the bisection depth of any single panel (and
    the number of panel doublings in the contour engine).
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    max_subdivisions: int = 24

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise InvalidInputError(f"abs_tol must be positive, got {self.abs_tol}")
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise InvalidInputError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_subdivisions) < 1:
            raise InvalidInputError("max_subdivisions must be >= 1")

    def target(self, magnitude: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(magnitude))

    def scaled(self, factor: float) -> "Tolerance":
        """Both tolerances multiplied by ``factor`` (use < 1 to tighten)."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line Re s = abscissa, truncated at |Im s| <= half_height.

    ``half_height=None`` lets the contour engine pick the height from the
    Stirling envelope and extend it until the measured tail is below tolerance.
    """

    abscissa: float = 0.5
    half_height: float | None = None
    panels: int = 16

    def __post_init__(self) -> None:
        if not math.isfinite(self.abscissa):
            raise InvalidInputError("contour abscissa must be finite")
        if self.half_height is not None and not self.half_height > 0:
            raise InvalidInputError("half_height must be positive")
        if int(self.panels) < 1:
            raise InvalidInputError("panels must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: complex | float | np.ndarray
    err_estimate: float
    evaluations: int


def stirling_half_height(abscissa: float, abs_tol: float, safety: float = 10.0) -> float:
    """Smallest T with safety * exp(-2 pi T) * T**(4 gamma - 3/2) < abs_tol."""
    power = 4.0 * abscissa - 1.5
    height = 1.0
    for _ in range(60):
        new = (math.log(safety / abs_tol) + power * math.log(height)) / (2.0 * math.pi)
        new = max(new, 1.0)
        if abs(new - height) < 1e-12:
            break
        height = new
    return height


def gl_panels(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def _evaluate(f: Integrand, nodes: np.ndarray) -> np.ndarray:
    values = np.asarray(f(nodes))
    if values.shape[-1:] != nodes.shape:
        raise InvalidInputError("integrand must return one value per node")
    if not np.all(np.isfinite(values)):
        raise ConvergenceError("integrand returned a non-finite value")
    return values


def _gl(f: Integrand, a: float, b: float) -> complex | float:
    half = 0.5 * (b - a)
    values = _evaluate(f, 0.5 * (a + b) + half * _GL_NODES)
    return half * np.dot(values, _GL_WEIGHTS)


def _stable_sum(values) -> complex | float:
    values = list(values)
    if any(isinstance(v, complex) or np.iscomplexobj(v) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(float(v) for v in values)


def integrate_interval(f: Integrand, a: float, b: float, tol: Tolerance) -> QuadResult:
    """Globally adaptive Gauss-Legendre on a finite interval.

    Each panel is compared against its two halves; the panel with the largest
    discrepancy is bisected until the summed discrepancy meets the tolerance.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidInputError("finite interval required")
    if a == b:
        return QuadResult(0.0, 0.0, 0)

    def refine(lo: float, hi: float, depth: int):
        mid = 0.5 * (lo + hi)
        left, right = _gl(f, lo, mid), _gl(f, mid, hi)
        return [lo, hi, depth, left, right]

    panels = [refine(a, b, 0)]
    whole = _gl(f, a, b)
    errors = [abs(panels[0][3] + panels[0][4] - whole)]
    evaluations = 3 * GL_ORDER
    while True:
        total = _stable_sum(p[3] + p[4] for p in panels)
        err = math.fsum(errors)
        if err <= tol.target(total):
            return QuadResult(total, err, evaluations)
        order = sorted(range(len(panels)), key=lambda k: -errors[k])
        worst = next((k for k in order if panels[k][2] < tol.max_subdivisions), None)
        if worst is None or len(panels) > 4000:
            raise ConvergenceError(
                f"adaptive quadrature on [{a}, {b}] stalled at error {err:.3e}"
            )
        lo, hi, depth, left, right = panels.pop(worst)
        errors.pop(worst)
        mid = 0.5 * (lo + hi)
        for sub_lo, sub_hi, sub_value in ((lo, mid, left), (mid, hi, right)):
            child = refine(sub_lo, sub_hi, depth + 1)
            panels.append(child)
            errors.append(abs(child[3] + child[4] - sub_value))
            evaluations += 2 * GL_ORDER


def integrate_decaying(f: Integrand, tol: Tolerance = Tolerance(), scale: float = 1.0) -> QuadResult:
    """Integral of f over (0, inf) for an eventually (super)exponentially decaying f.

    Panels are [0, scale], [scale, 2 scale], [2 scale, 4 scale], ...; the
    first panel uses the substitution x = scale * v**3, which tames algebraic
    and logarithmic endpoint singularities.  Summation stops once two
    consecutive panels are negligible and shrinking.
    """
    if not scale > 0:
        raise InvalidInputError("scale must be positive")

    def first_panel(v: np.ndarray) -> np.ndarray:
        return np.asarray(f(scale * v**3)) * (3.0 * scale * v**2)

    per_panel = tol.scaled(0.25)
    first = integrate_interval(first_panel, 0.0, 1.0, per_panel)
    parts, errors, evaluations = [first.value], [first.err_estimate], first.evaluations
    lo, quiet = scale, 0
    for _ in range(80):
        piece = integrate_interval(f, lo, 2.0 * lo, per_panel)
        parts.append(piece.value)
        errors.append(piece.err_estimate)
        evaluations += piece.evaluations
        lo *= 2.0
        total = _stable_sum(parts)
        small = abs(piece.value) <= 0.1 * tol.target(total)
        shrinking = abs(piece.value) <= 0.5 * abs(parts[-2]) or parts[-2] == 0
        quiet = quiet + 1 if (small and shrinking) else 0
        if quiet >= 2:
            return QuadResult(total, math.fsum(errors) + abs(piece.value), evaluations)
    raise ConvergenceError("integrand does not decay on (0, inf)")


def _wynn_epsilon(partial_sums: list) -> complex | float:
    """Wynn's epsilon extrapolation of a sequence of partial sums."""
    n = len(partial_sums)
    if n < 3:
        return partial_sums[-1]
    previous = [0.0] * (n + 1)
    current = list(partial_sums)
    best = current[-1]
    for column in range(1, n):
        following = []
        for k in range(len(current) - 1):
            delta = current[k + 1] - current[k]
            if delta == 0:
                return current[k + 1]
            following.append(previous[k + 1] + 1.0 / delta)
        previous, current = current, following
        if column % 2 == 0 and current:
            best = current[-1]
        if len(current) < 2:
            break
    return best


def integrate_fourier_cosine(
    g: Integrand, omega: float, tol: Tolerance = Tolerance(), scale: float = 1.0
) -> QuadResult:
    """Integral of g(u) cos(omega u) over (0, inf) for a smooth decaying envelope g.

    Low frequencies go to :func:`integrate_decaying`.  Once omega exceeds
    8/u_decay (u_decay: the envelope's e-folding length from two probes) the
    integral is split at the zeros of the cosine and the alternating sequence
    of half-period contributions is summed with Wynn epsilon acceleration.
    """
    if omega < 0 or not math.isfinite(omega):
        raise InvalidInputError("omega must be a nonnegative finite number")

    def product(u: np.ndarray) -> np.ndarray:
        return np.asarray(g(u)) * np.cos(omega * u)

    if omega == 0:
        return integrate_decaying(g, tol, scale)
    probes = np.abs(np.asarray(g(np.array([scale, 2.0 * scale]))))
    if probes[1] > 0 and probes[0] > probes[1]:
        u_decay = scale / math.log(probes[0] / probes[1])
    else:
        u_decay = math.inf if probes[1] > 0 else scale
    if omega <= 8.0 / u_decay:
        return integrate_decaying(product, tol, scale)

    half_period = math.pi / omega
    per_piece = tol.scaled(0.1)
    first = integrate_interval(product, 0.0, 0.5 * half_period, per_piece)
    terms, errors, evaluations = [first.value], [first.err_estimate], first.evaluations
    lo, quiet = 0.5 * half_period, 0
    for _ in range(200000):
        piece = integrate_interval(product, lo, lo + half_period, per_piece)
        terms.append(piece.value)
        errors.append(piece.err_estimate)
        evaluations += piece.evaluations
        lo += half_period
        total = _stable_sum(terms)
        quiet = quiet + 1 if abs(piece.value) <= 0.01 * tol.target(total) else 0
        if quiet >= 3:
            break
    else:
        raise ConvergenceError("Fourier-cosine half-period series did not converge")
    partial = np.cumsum(terms).tolist()
    raw = _stable_sum(terms)
    accelerated = _wynn_epsilon(partial[-min(len(partial), 12):])
    if not np.isfinite(accelerated):
        accelerated = raw
    spread = abs(accelerated - raw)
    value = raw if spread > tol.target(raw) else accelerated
    return QuadResult(value, math.fsum(errors) + min(spread, abs(terms[-1])), evaluations)


def integrate_vertical_contour(
    integrand: Callable[[np.ndarray], np.ndarray],
    spec: ContourSpec = ContourSpec(),
    tol: Tolerance = Tolerance(),
    conjugate_symmetric: bool = False,
    decay_rate: float = 2.0 * math.pi,
    height_offset: float = 0.0,
) -> QuadResult:
    """(1/(2 pi i)) times the integral of integrand(s) ds along Re s = abscissa.

    ``integrand`` receives a 1-D complex array of nodes s and returns values
    whose last axis runs over the nodes; leading axes are integrated in batch.
    With ``conjugate_symmetric`` only Im s >= 0 is sampled and the result is
    real.  The truncated tail is estimated from the integrand at the ends
    assuming an envelope exp(-decay_rate |Im s|) and is added to the error.
    ``height_offset`` shifts the automatic Stirling height (use the largest
    tau when the integrand only starts to decay beyond |Im s| = tau).
    """
    gamma = spec.abscissa
    fixed = spec.half_height is not None
    height = spec.half_height if fixed else height_offset + stirling_half_height(gamma, tol.abs_tol)
    evaluations = 0
    for _ in range(40):
        lower = 0.0 if conjugate_symmetric else -height
        ends = np.array([gamma + 1j * height, gamma - 1j * height])
        end_values = np.abs(np.asarray(integrand(ends)))
        evaluations += 2
        tail = float(np.max(end_values[..., 0] + end_values[..., 1])) / (2.0 * math.pi * decay_rate)
        if conjugate_symmetric:
            tail *= 0.5

        panels = int(spec.panels)
        estimate, err = None, math.inf
        for _level in range(int(tol.max_subdivisions) + 1):
            nodes, weights = gl_panels(lower, height, panels)
            values = _evaluate(integrand, gamma + 1j * nodes)
            evaluations += nodes.size
            integral = values @ weights
            integral = integral.real / math.pi if conjugate_symmetric else integral / (2.0 * math.pi)
            if estimate is not None:
                err = float(np.max(np.abs(integral - estimate)))
                magnitude = float(np.max(np.abs(integral)))
                if err <= tol.target(magnitude):
                    break
            estimate = integral
            panels *= 2
            if nodes.size > 2_000_000:
                break
        magnitude = float(np.max(np.abs(integral)))
        if err > tol.target(magnitude):
            raise ConvergenceError(f"contour quadrature stalled at error {err:.3e}")
        if tail <= tol.target(magnitude):
            if np.ndim(integral) == 0:
                integral = float(integral) if conjugate_symmetric else complex(integral)
            return QuadResult(integral, err + tail, evaluations)
        if fixed:
            raise TruncationError(
                f"half_height={height} leaves a tail of {tail:.3e} above tolerance"
            )
        height *= 1.5
    raise TruncationError("contour integrand does not decay along the line")
