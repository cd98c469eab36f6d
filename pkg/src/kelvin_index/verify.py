"""Verification suites: each case compares a measured quantity against a
threshold; diagnostics are reported but never gate.

Suites: specfun, quadrature, kernel, transforms, bvp (and "all").  Output is
a plain dict that serializes deterministically (see :func:`to_json`).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import special

from . import bvp, kernel, specfun, transforms
from .errors import InvalidInputError
from .quadrature import (
    ContourSpec,
    Tolerance,
    integrate_decaying,
    integrate_fourier_cosine,
    integrate_vertical_contour,
)

SUITES = ("specfun", "quadrature", "kernel", "transforms", "bvp")
KERNEL_GRID_X = (0.1, 0.5, 1.0, 2.0, 10.0)
KERNEL_GRID_TAU = (0.0, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    f_rates: tuple[float, ...] = (1.0, 2.0, 3.0)
    f_tau_max: float = 40.0
    g_variant: str = "corrected"
    beta: float = math.pi / 2


@dataclass
class Case:
    id: str
    measured: float
    threshold: float
    relation: str = "<="
    criterion: int | None = None

    @property
    def passed(self) -> bool:
        m, t = self.measured, self.threshold
        if not math.isfinite(m):
            return False
        return {"<=": m <= t, "<": m < t, ">=": m >= t, ">": m > t}[self.relation]

    def as_dict(self) -> dict[str, Any]:
        return {"id": self.id, "status": "pass" if self.passed else "fail", "measured": self.measured,
                "relation": self.relation, "threshold": self.threshold, "criterion": self.criterion}


@dataclass
class SuiteResult:
    name: str
    cases: list[Case] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def add(self, case_id: str, measured: float, threshold: float, relation: str = "<=",
            criterion: int | None = None) -> None:
        self.cases.append(Case(case_id, float(measured), float(threshold), relation, criterion))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def as_dict(self) -> dict[str, Any]:
        return {"suite": self.name, "status": "pass" if self.passed else "fail",
                "cases": [c.as_dict() for c in self.cases], "diagnostics": self.diagnostics}


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


# ---------------------------------------------------------------------------
# specfun

def _random_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    out = []
    while len(out) < n:
        z = radius * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        if z.real < 0.5 and abs(z.imag) < 0.1 and abs(z.real - round(z.real)) < 0.1:
            continue
        out.append(z)
    return np.array(out)


def run_specfun(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("specfun")
    rng = np.random.default_rng(cfg.seed)

    z = _random_disk(rng, 100, 19.0)
    res.add("gamma.recurrence", _rel(z * specfun.cgamma(z), specfun.cgamma(z + 1)), 1e-12, criterion=3)
    tau = rng.uniform(0.1, 10.0, 100)
    reflection = np.abs(specfun.cgamma(1j * tau)) ** 2 * tau * np.sinh(np.pi * tau) / np.pi
    res.add("gamma.reflection", float(np.max(np.abs(reflection - 1))), 1e-11, criterion=3)
    s = rng.uniform(0.1, 8.0, 100) + 1j * rng.uniform(-8.0, 8.0, 100)
    duplicated = specfun.cgamma(s) * specfun.cgamma(s + 0.5) * np.exp((2 * s - 1) * math.log(2)) / math.sqrt(math.pi)
    res.add("gamma.duplication", _rel(duplicated, specfun.cgamma(2 * s)), 1e-11, criterion=3)

    pair = [specfun.gamma_pair_cosine_sides(a, y) for a in (0.5, 1.0) for y in (0.5, 1.0, 2.0)]
    res.add("gamma.fourier_pair", max(abs(l / r - 1) for l, r in pair), 1e-6, criterion=3)

    nu = rng.uniform(-3, 3, 20) + 1j * rng.uniform(-10, 10, 20)
    arg = rng.uniform(0.2, 8, 20) * np.exp(1j * rng.uniform(-1.2, 1.2, 20))
    res.add("besselk.order_evenness", _rel(specfun.besselk(-nu, arg), specfun.besselk(nu, arg)), 1e-12)
    oracle_points = [(0.0, 1.0), (2j, 1.5), (0.5 + 1j, 2.0 * specfun.QUARTER_TURN), (4j, 3.0 * specfun.QUARTER_TURN)]
    res.add("besselk.real_line_oracle",
            max(abs(specfun.besselk(n, w) / specfun.besselk_real_line(n, w) - 1) for n, w in oracle_points), 1e-10)
    res.add("besselk.half_order_closed_form",
            abs(specfun.besselk(0.5, 1.0).real / (math.sqrt(math.pi / 2) / math.e) - 1), 1e-13)

    taus, xs = np.meshgrid([0.0, 0.3, 1.0, 2.5, 5.0], [0.5, 2.0, 6.0, 12.0])
    k_pair = np.asarray(specfun.kelvin_k_pair_sq(taus, xs))
    res.add("kelvin_k_pair.min_value", float(np.min(k_pair)), 0.0, ">")
    res.add("kelvin_k_pair.evenness", _rel(specfun.kelvin_k_pair_sq(-taus, xs), k_pair), 1e-12)
    i_pair = np.asarray(specfun.kelvin_i_pair_sq(taus, xs))
    i_conj = np.asarray(specfun.kelvin_i_pair_sq(-taus, xs))
    res.add("kelvin_i_pair.imag_odd", float(np.max(np.abs(i_conj.imag + i_pair.imag) / np.abs(i_pair))), 1e-12)
    res.add("kelvin_i_pair.series_vs_0f3",
            _rel(specfun.kelvin_i_pair_sq_0f3(taus, xs), i_pair), 1e-10)
    res.add("inversion_kernel.zero_order", abs(float(specfun.inversion_kernel_point(0.0, 2.0))), 0.0)

    t_grid, x_grid = np.meshgrid([0.3, 0.7, 1.0, 2.0], [0.5, 1.0, 4.0, 20.0])
    res.add("hypergeometric_identity.kelvin_form",
            _rel(specfun.hypergeometric_pair_combination(t_grid, x_grid),
                 specfun.kelvin_pair_combination(t_grid, x_grid)), 1e-7)

    lx, lt = np.meshgrid(np.geomspace(0.01, 100.0, 17), [0.1, 0.5, 1.0, 2.0, 5.0])
    ratio = transforms.lebedev_ratio(lx, lt)
    worst = np.unravel_index(np.argmax(ratio), ratio.shape)
    res.add("lebedev_inequality.max_ratio", float(np.max(ratio)), 1.0, "<", criterion=8)
    res.diagnostics["lebedev_worst_point"] = {"x": float(lx[worst]), "tau": float(lt[worst])}

    residue = [float(specfun.gamma_ratio_residue_sum(t, x) / specfun.hypergeometric_pair_combination(t, x))
               for t in (0.3, 1.0) for x in (1.0, 4.0)]
    res.diagnostics["residue_sum_over_0f3_combination"] = residue
    return res


# ---------------------------------------------------------------------------
# quadrature

def run_quadrature(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("quadrature")
    tight = Tolerance(abs_tol=1e-15, rel_tol=1e-12)
    res.add("decaying.exponential", abs(integrate_decaying(lambda y: np.exp(-y), tight).value - 1), 1e-12)
    res.add("decaying.k0", abs(integrate_decaying(lambda y: special.k0(y), tight).value / (math.pi / 2) - 1), 1e-11)
    res.add("decaying.gaussian",
            abs(integrate_decaying(lambda y: np.exp(-y * y), tight).value / (math.sqrt(math.pi) / 2) - 1), 1e-12)
    res.add("cosine.omega_zero", abs(integrate_fourier_cosine(lambda u: np.exp(-u), 0.0, tight).value - 1), 1e-12)
    res.add("cosine.laplace", abs(integrate_fourier_cosine(lambda u: np.exp(-u), 1.0, tight).value - 0.5), 1e-12)
    gauss = integrate_fourier_cosine(lambda u: np.exp(-u * u), 2.0, tight).value
    res.add("cosine.gaussian", abs(gauss / (math.sqrt(math.pi) / 2 * math.exp(-1)) - 1), 1e-11)

    for x in (1.0, 2.0):
        value = integrate_vertical_contour(lambda s: special.gamma(s) * x ** (-s), ContourSpec(1.0), tight,
                                           conjugate_symmetric=True, decay_rate=math.pi / 2).value
        res.add(f"contour.gamma_inverse_x{x:g}", abs(value / math.exp(-x) - 1), 1e-11)

    def k_square(s: np.ndarray) -> np.ndarray:
        return (math.sqrt(math.pi) / 2) * np.exp(special.loggamma(1j - s) + special.loggamma(-s - 1j)
                                                 + special.loggamma(-s) - special.loggamma(0.5 - s))

    squared = integrate_vertical_contour(k_square, ContourSpec(-0.5), tight, conjugate_symmetric=True,
                                         decay_rate=math.pi, height_offset=1.0).value
    res.add("contour.macdonald_square", abs(squared / specfun.besselk(1j, 1.0).real ** 2 - 1), 1e-10)

    f1 = lambda y: np.exp(-y)  # noqa: E731
    f2 = lambda y: np.exp(-y * y)  # noqa: E731
    combined = integrate_decaying(lambda y: 2 * f1(y) - 3 * f2(y), tight).value
    separate = 2 * integrate_decaying(f1, tight).value - 3 * integrate_decaying(f2, tight).value
    res.add("linearity.decaying", abs(combined - separate), 2 * tight.target(abs(separate)))
    contour = integrate_vertical_contour(lambda s: special.gamma(s) * 1.5 ** (-s), ContourSpec(1.0), tight,
                                         decay_rate=math.pi / 2)
    res.add("contour.conjugate_symmetry_imag", abs(np.imag(contour.value)), max(contour.err_estimate, 1e-14))
    return res


# ---------------------------------------------------------------------------
# kernel

def run_kernel(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("kernel")
    x = np.array(KERNEL_GRID_X)
    tau = np.array(KERNEL_GRID_TAU)
    definition = np.array([[kernel.kernel_definition(a, t).value for t in tau] for a in x])
    mb = kernel.mellin_barnes_batch(x, tau)[0][0]
    fc = np.array([[kernel.kernel_fourier_cosine(a, t).value for t in tau] for a in x])
    deviation, raw = 0.0, 0.0
    for a, b in ((definition, mb), (definition, fc), (mb, fc)):
        diff = np.abs(a - b)
        scale = np.maximum(np.abs(a), np.abs(b))
        # Relative below 1e-6 is the same as |diff| <= max(1e-6 scale, 1e-12).
        deviation = max(deviation, float(np.max(diff / np.maximum(scale, 1e-6))))
        raw = max(raw, float(np.max(diff / scale)))
    res.add("representations.max_pairwise_deviation", deviation, 1e-6, criterion=1)
    res.diagnostics["representations_max_relative_without_floor"] = raw
    res.add("representations.min_value", float(min(definition.min(), mb.min(), fc.min())), 0.0, ">")
    mb_negative = kernel.mellin_barnes_batch(x, -tau)[0][0]
    res.add("representations.tau_evenness", _rel(mb_negative, mb), 1e-13)

    jets, _ = kernel.mellin_barnes_batch(x, tau, (0, 1, 2, 3, 4))
    ode, operator = 0.0, 0.0
    for i, a in enumerate(x):
        for j, t in enumerate(tau):
            jet = kernel.KernelJet(float(a), float(t), *(float(v) for v in jets[:, i, j]))
            ode = max(ode, abs(kernel.ode_residual(jet)))
            operator = max(operator, abs(kernel.operator_residual(jet)))
    res.add("ode.max_normalized_residual", ode, 1e-6, criterion=2)
    res.add("operator_form.max_normalized_residual", operator, 1e-6, criterion=2)
    res.diagnostics["d1_negative_on_grid"] = bool(np.all(jets[1] < 0))

    h = 1e-4
    fd = (kernel.kernel_definition(1 + h, 1.0).value - kernel.kernel_definition(1 - h, 1.0).value) / (2 * h)
    res.add("jet.d1_vs_finite_difference", abs(kernel.kernel_jet(1.0, 1.0).d1 / fd - 1), 1e-4)
    low = kernel.kernel_mellin_barnes(1.0, 0.5, ContourSpec(0.3)).value
    high = kernel.kernel_mellin_barnes(1.0, 0.5, ContourSpec(1.0)).value
    res.add("mellin_barnes.abscissa_independence", abs(low / high - 1), 1e-8)
    res.add("fourier_cosine.tau5_absolute",
            abs(kernel.kernel_fourier_cosine(0.5, 5.0).value - kernel.kernel_definition(0.5, 5.0).value), 1e-8)

    # Constant relating the definition to the bare contour integral of the four gammas.
    bare = kernel.mellin_barnes_batch(x, [0.5])[0][0, :, 0] / kernel.MB_PREFACTOR
    measured = np.array([kernel.kernel_definition(a, 0.5).value for a in x]) / bare
    res.diagnostics["mellin_barnes_prefactor"] = {
        "measured": float(np.mean(measured)),
        "spread": float(np.ptp(measured) / np.mean(measured)),
        "stated_16_pi_3_2": kernel.MB_PREFACTOR,
        "stated_4_pi": 1.0 / (4.0 * math.pi),
    }
    return res


# ---------------------------------------------------------------------------
# transforms

def _random_test_function(rng: np.random.Generator) -> transforms.TestFunction:
    while True:
        rates = np.sort(rng.uniform(0.5, 5.0, 3))
        if np.min(np.diff(rates)) > 0.3:
            return transforms.make_test_function(rates)


def run_transforms(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("transforms")
    rng = np.random.default_rng(cfg.seed + 1)

    fixture = transforms.make_test_function(cfg.f_rates)
    res.add("test_function.constraints", max(abs(v) for v in fixture.constraint_residuals()), 1e-12, criterion=4)
    h = 1e-5
    slope = (fixture.mellin(1 + h) - fixture.mellin(1 - h)) / (2 * h)
    res.add("test_function.mellin_slope_fd", abs(slope), 1e-6)
    direct, contour = transforms.parseval_sides(
        transforms.TestFunction((1.0,), (1.0,)), transforms.TestFunction((1.0,), (1.0,)))
    res.add("parseval.exponentials", abs(contour / direct - 1), 1e-8)
    points = np.array([0.5, 1.0, 2.0])
    inverted = transforms.mellin_inverse(fixture.mellin, points, 0.25)
    res.add("mellin_inverse.test_function", _rel(inverted, fixture(points)), 1e-8)

    spec = transforms.MellinSpec(0.5, 2.0)
    bound_f = transforms.norm_bound_f(spec)
    res.add("norm_bound_f.closed_form", abs(bound_f / (math.pi * math.sqrt(6) / 64) - 1), 1e-12)
    worst_f = 0.0
    tau_grid = np.linspace(0.0, 10.0, 41)
    for _ in range(5):
        f = _random_test_function(rng)
        sup = float(np.max(np.abs(transforms.forward_f(f, tau_grid).values)))
        worst_f = max(worst_f, sup / (bound_f * transforms.weighted_norm(f, spec)))
    res.add("norm_bound_f.empirical_ratio", worst_f, 1.0, criterion=6)

    Ff = transforms.forward_f(fixture, np.linspace(0.0, cfg.f_tau_max, int(4 * cfg.f_tau_max) + 1))
    res.add("forward_f.vanishing_ratio", abs(Ff.evaluator(np.array(10.0)) / Ff.evaluator(np.array(1.0))),
            0.01, "<", criterion=6)
    composition = transforms.forward_f(fixture, [0.5, 1.0, 2.0], method="composition").values
    res.add("forward_f.mellin_vs_composition", _rel(Ff.evaluator(np.array([0.5, 1.0, 2.0])), composition), 1e-8)

    bump = transforms.gaussian_bump()
    bound_g = transforms.norm_bound_g(0.5)
    res.add("norm_bound_g.closed_form", abs(bound_g / (math.pi / 16) - 1), 1e-10)
    l1 = float(integrate_decaying(lambda t: np.abs(bump(t)), Tolerance(1e-15, 1e-12)).value)
    x_sup = np.geomspace(1e-3, 1e3, 61)
    Gg_sup = transforms.forward_g(bump, x_sup, method="mellin_barnes").values
    res.add("norm_bound_g.empirical_ratio", float(np.max(np.sqrt(x_sup) * np.abs(Gg_sup))) / (bound_g * l1),
            1.0, criterion=6)

    x_inv = np.linspace(0.5, 2.0, 9)
    table = {}
    for variant in specfun.KERNEL_VARIANTS:
        for scaling in transforms.ARGUMENT_SCALINGS:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                recovered = transforms.inverse_f(Ff, x_inv, variant=variant, scaling=scaling).values
            table[f"{variant}/{scaling}"] = transforms.round_trip_error(fixture(x_inv), recovered)
    stated = {k: v for k, v in table.items() if k.startswith("stated/")}
    best = min(stated, key=stated.get)
    res.add("round_trip_f.relative_linf", stated[best], 1e-2, criterion=4)
    res.diagnostics["round_trip_f_variant_used"] = best
    res.diagnostics["round_trip_f_variants"] = table

    Gg = transforms.forward_g(bump, np.geomspace(0.01, 100.0, 30))
    Gg_mb = transforms.forward_g(bump, Gg.grid, method="mellin_barnes").values
    res.add("forward_g.definition_vs_mellin_barnes", _rel(Gg_mb, Gg.values), 1e-8)
    x_g = np.linspace(0.25, 2.0, 8)
    g_errors = {}
    for variant in dict.fromkeys((cfg.g_variant,) + specfun.KERNEL_VARIANTS):
        recovered = transforms.inverse_g(Gg, x_g, variant=variant).values
        g_errors[variant] = transforms.round_trip_error(bump(x_g), recovered)
    res.add("round_trip_g.relative_linf", g_errors[cfg.g_variant], 5e-2, criterion=5)
    res.diagnostics["round_trip_g_variant_used"] = cfg.g_variant
    res.diagnostics["round_trip_g_variants"] = g_errors

    identity = 0.0
    for g in (bump, transforms.reference_boundary_datum()):
        for y in (1.0, 2.0):
            lhs, rhs = transforms.g_mellin_identity_sides(g, y)
            identity = max(identity, abs(lhs / rhs - 1))
    res.add("g_mellin_identity.relative", identity, 1e-5, criterion=8)
    return res


# ---------------------------------------------------------------------------
# bvp

def run_bvp(cfg: VerifyConfig) -> SuiteResult:
    res = SuiteResult("bvp")
    g = transforms.reference_boundary_datum()
    beta = cfg.beta
    r_grid = np.geomspace(0.25, 4.0, 7)
    zero, deviation = bvp.trace_deviation(g, bvp.WedgeParams(beta), r_grid)
    res.add("trace.zero_angle_max_abs", zero, 0.0, criterion=7)
    res.add("trace.opening_angle_vs_forward_g", deviation, 1e-6, criterion=7)
    beta_scan = max(bvp.trace_deviation(g, bvp.WedgeParams(b), r_grid[::3])[1]
                    for b in (math.pi / 4, math.pi / 2, math.pi))
    res.add("trace.beta_independence", beta_scan, 1e-6)

    field_ = bvp.WedgeField(g, beta)
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        for theta in (beta / 4, 3 * beta / 4):
            report = bvp.pde_residual(g, bvp.WedgeParams(beta, r, theta), field=field_)
            worst = max(worst, abs(report.residual))
    res.add("pde.max_normalized_residual", worst, 1e-3, criterion=7)
    orders = [bvp.convergence_order(g, bvp.WedgeParams(beta, r, beta / 2))[0] for r in (0.5, 1.0, 2.0)]
    res.add("pde.min_convergence_order", min(orders), 3.5, ">=", criterion=7)
    res.diagnostics["pde_convergence_orders"] = orders

    near, far = field_.values([1.0, 100.0], [beta / 2])[:, 0]
    res.add("solution.decay_ratio_r100", abs(far / near), 0.01, "<")
    lin = [bvp.theta_linearity_error(beta, 1.0, c) for c in (0.1, 0.05)]
    res.add("theta_linearity.shrink_ratio", lin[1] / lin[0], 1.0, "<")
    res.diagnostics["theta_linearity_errors"] = lin
    ratio = bvp.sinh_ratio(np.linspace(0, 6.2, 32)[:, None], 6.2, np.array([0.0, 1e-6, 1.0, 10.0])[None, :])
    res.add("sinh_ratio.finite_max", float(np.max(ratio)) if np.all(np.isfinite(ratio)) else math.inf, 1.0)
    return res


RUNNERS: dict[str, Callable[[VerifyConfig], SuiteResult]] = {
    "specfun": run_specfun,
    "quadrature": run_quadrature,
    "kernel": run_kernel,
    "transforms": run_transforms,
    "bvp": run_bvp,
}


def run_suite(name: str, cfg: VerifyConfig = VerifyConfig()) -> dict[str, Any]:
    """Report for one suite or, for "all", every suite in order."""
    if name != "all" and name not in RUNNERS:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", kernel.KernelRangeWarning)
        if name != "all":
            return RUNNERS[name](cfg).as_dict()
        parts = [RUNNERS[s](cfg) for s in SUITES]
    return {"suite": "all", "status": "pass" if all(p.passed for p in parts) else "fail",
            "suites": [p.as_dict() for p in parts]}


def _format(value: Any, indent: int, level: int) -> str:
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if isinstance(value, bool) or value is None:
        return {True: "true", False: "false", None: "null"}[value]
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return '"nan"' if math.isnan(v) else ('"inf"' if v > 0 else '"-inf"')
        return f"{v:.17g}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{_format(str(k), indent, 0)}: {_format(v, indent, level + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [inner + _format(v, indent, level + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(report: dict[str, Any], indent: int = 2) -> str:
    """JSON with every float at 17 significant digits (byte-stable across runs)."""
    return _format(report, indent, 0) + "\n"
