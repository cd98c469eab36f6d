"""Wedge boundary-value problem in polar coordinates (r, theta), 0 <= theta <= beta:

    u(r, theta) = integral of K(r, tau) sinh(theta tau)/sinh(beta tau) g(tau) d tau

solves the fourth-order equation

    r^3 u_rrrr + r u_rrtt + 11/2 r^2 u_rrr + 1/2 u_rtt + 11/2 r u_rr + 1/2 u_r - u = 0

with u(r, 0) = 0 and u(r, beta) = (G g)(r).  The equation is checked with
fourth-order central differences of u itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidInputError
from .kernel import mellin_barnes_batch
from .quadrature import ContourSpec, Tolerance
from .transforms import SampledFunction, forward_g, tau_quadrature_nodes

TERM_NAMES = ("r^3 u_rrrr", "r u_rrtt", "11/2 r^2 u_rrr", "1/2 u_rtt", "11/2 r u_rr", "1/2 u_r", "-u")
WEDGE_TOLERANCE = Tolerance(abs_tol=1e-15, rel_tol=1e-10)
_KERNEL_CONTOUR_TOL = Tolerance(abs_tol=1e-30, rel_tol=1e-13, max_subdivisions=10)


@dataclass(frozen=True)
class WedgeParams:
    beta: float
    r: float = 1.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.beta < 2 * math.pi:
            raise InvalidInputError("beta must lie in (0, 2 pi)")
        if not self.r > 0:
            raise InvalidInputError("r must be positive")
        if not 0 <= self.theta <= self.beta:
            raise InvalidInputError("theta must lie in [0, beta]")


@dataclass(frozen=True)
class ResidualReport:
    point: tuple[float, float]
    residual: float
    step_sizes: tuple[float, float]
    term_magnitudes: tuple[float, ...]


def sinh_ratio(theta, beta: float, tau) -> np.ndarray:
    """sinh(theta tau) / sinh(beta tau), with limit theta/beta at tau = 0.

    Small beta tau uses the Taylor form, large beta tau scaled exponentials.
    """
    theta = np.asarray(theta, dtype=float)
    tau = np.abs(np.asarray(tau, dtype=float))
    theta, tau = np.broadcast_arrays(theta, tau)
    bt = beta * tau
    small = bt < 1e-4
    large = bt > 30.0
    mid = ~(small | large)
    out = np.empty(np.broadcast(theta, tau).shape)
    tt = theta * tau
    out[small] = (theta[small] / beta) * (1 + tt[small] ** 2 / 6) / (1 + bt[small] ** 2 / 6)
    out[mid] = np.sinh(tt[mid]) / np.sinh(bt[mid])
    out[large] = np.exp(tt[large] - bt[large]) * -np.expm1(-2 * tt[large]) / -np.expm1(-2 * bt[large])
    return out


class WedgeField:
    """u on a tensor grid of radii and angles, from one shared tau panelization
    and one shared Mellin-Barnes contour for the kernel."""

    def __init__(self, g: SampledFunction, beta: float, tol: Tolerance = WEDGE_TOLERANCE) -> None:
        WedgeParams(beta)
        self.beta = beta
        self.tau, weights = tau_quadrature_nodes(g, tol)
        self.weighted_g = g(self.tau) * weights

    def kernel_matrix(self, radii: Sequence[float]) -> np.ndarray:
        values, _ = mellin_barnes_batch(np.asarray(radii, dtype=float), self.tau, (0,), ContourSpec(0.5),
                                        _KERNEL_CONTOUR_TOL)
        return values[0]

    def values(self, radii: Sequence[float], thetas: Sequence[float]) -> np.ndarray:
        """u[i, k] = u(radii[i], thetas[k])."""
        thetas = np.asarray(thetas, dtype=float)
        if np.any(thetas < 0) or np.any(thetas > self.beta):
            raise DomainError("theta outside the wedge")
        ratio = sinh_ratio(thetas[:, None], self.beta, self.tau[None, :])
        return self.kernel_matrix(radii) @ (ratio * self.weighted_g[None, :]).T


def wedge_solution(g: SampledFunction, w: WedgeParams, tol: Tolerance = WEDGE_TOLERANCE) -> float:
    """u(w.r, w.theta)."""
    if w.theta == 0:
        return 0.0
    return float(WedgeField(g, w.beta, tol).values([w.r], [w.theta])[0, 0])


def _central_weights(order: int, accuracy: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights of the central difference of the given derivative order."""
    half = (order - 1) // 2 + accuracy // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    vander = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    return offsets, np.linalg.solve(vander, rhs)


def default_steps(w: WedgeParams) -> tuple[float, float]:
    return max(1e-2 * w.r, 1e-3), min(w.beta / 20.0, 0.05)


def pde_residual(g: SampledFunction, w: WedgeParams, h_r: float | None = None, h_theta: float | None = None,
                 field: WedgeField | None = None) -> ResidualReport:
    """Normalized residual of the wedge equation at (w.r, w.theta) from
    fourth-order central differences of u (one shared quadrature for all
    stencil nodes)."""
    default_r, default_theta = default_steps(w)
    h_r = default_r if h_r is None else h_r
    h_theta = default_theta if h_theta is None else h_theta
    if w.theta - 2 * h_theta < 0 or w.theta + 2 * h_theta > w.beta:
        raise DomainError("theta stencil leaves the wedge")
    if w.r - 3 * h_r <= 0:
        raise DomainError("r stencil reaches r <= 0")
    field = field or WedgeField(g, w.beta)
    r_offsets = np.arange(-3, 4)
    t_offsets = np.arange(-2, 3)
    u = field.values(w.r + h_r * r_offsets, w.theta + h_theta * t_offsets)  # shape (7, 5)

    def r_derivative(order: int, column: np.ndarray) -> float:
        offsets, weights = _central_weights(order)
        picked = column[(offsets + 3).astype(int)]
        return float(weights @ picked) / h_r**order

    theta_off, theta_w = _central_weights(2)
    u_tt = (u[:, (theta_off + 2).astype(int)] @ theta_w) / h_theta**2  # along r offsets
    centre = u[:, 2]
    r = w.r
    terms = np.array([
        r**3 * r_derivative(4, centre),
        r * r_derivative(2, u_tt),
        5.5 * r**2 * r_derivative(3, centre),
        0.5 * r_derivative(1, u_tt),
        5.5 * r * r_derivative(2, centre),
        0.5 * r_derivative(1, centre),
        -centre[3],
    ])
    residual = math.fsum(terms) / float(np.max(np.abs(terms)))
    return ResidualReport((w.r, w.theta), residual, (h_r, h_theta), tuple(float(abs(t)) for t in terms))


def convergence_order(g: SampledFunction, w: WedgeParams, h_star: float | None = None,
                      levels: int = 3) -> tuple[float, list[tuple[float, float]]]:
    """Log-log slope of |residual| against h_r over [h*, 4h*] (h_theta scaled in step).

    Returns the least-squares slope and the (h_r, |residual|) pairs."""
    base_r, base_theta = default_steps(w)
    h_star = base_r if h_star is None else h_star
    ratio = base_theta / base_r
    widest = h_star * 2.0 ** (levels - 1)
    room = 0.9 * min(w.theta, w.beta - w.theta) / 2.0
    ratio = min(ratio, room / widest)
    field = WedgeField(g, w.beta)
    samples = []
    for k in range(levels):
        h = h_star * 2.0**k
        report = pde_residual(g, w, h, h * ratio, field)
        samples.append((h, abs(report.residual)))
    hs, rs = np.log([s[0] for s in samples]), np.log([s[1] for s in samples])
    return float(np.polyfit(hs, rs, 1)[0]), samples


def boundary_trace(g: SampledFunction, w: WedgeParams, r_grid: Sequence[float]) -> tuple[SampledFunction, SampledFunction]:
    """Traces u(r, 0) and u(r, beta) on ``r_grid``."""
    radii = np.asarray(r_grid, dtype=float)
    field = WedgeField(g, w.beta)
    values = field.values(radii, [0.0, w.beta])
    return SampledFunction(radii, values[:, 0]), SampledFunction(radii, values[:, 1])


def trace_deviation(g: SampledFunction, w: WedgeParams, r_grid: Sequence[float]) -> tuple[float, float]:
    """(max |u(r,0)|, relative sup-distance between u(r,beta) and (G g)(r))."""
    lower, upper = boundary_trace(g, w, r_grid)
    reference = forward_g(g, r_grid).values
    deviation = float(np.max(np.abs(upper.values - reference)) / np.max(np.abs(reference)))
    return float(np.max(np.abs(lower.values))), deviation


def theta_linearity_error(beta: float = math.pi / 2, r: float = 1.0, center: float = 0.1) -> float:
    """max over interior theta of |u(r,theta)/u(r,beta) - theta/beta| for a narrow
    bump in tau at ``center``; shrinks as the bump moves toward tau = 0."""
    from .transforms import gaussian_bump

    g = gaussian_bump(center, center / 4.0)
    thetas = np.linspace(0.0, beta, 9)[1:-1]
    u = WedgeField(g, beta).values([r], np.append(thetas, beta))[0]
    return float(np.max(np.abs(u[:-1] / u[-1] - thetas / beta)))
