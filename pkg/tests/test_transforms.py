import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kelvin_index import transforms
from kelvin_index.errors import DomainError, InvalidInputError


@pytest.fixture(scope="module")
def fixture_f():
    return transforms.make_test_function([1.0, 2.0, 3.0])


def test_test_function_constraints(fixture_f):
    assert max(abs(r) for r in fixture_f.constraint_residuals()) <= 1e-12
    assert fixture_f.l1_norm() == pytest.approx(1.0, rel=1e-12)
    assert abs(fixture_f.mellin(1.0)) <= 1e-12
    h = 1e-5
    assert abs((fixture_f.mellin(1 + h) - fixture_f.mellin(1 - h)) / (2 * h)) <= 1e-6


def test_test_function_rejects_degenerate_rates():
    with pytest.raises(InvalidInputError):
        transforms.make_test_function([1.0, 2.0])
    with pytest.raises(InvalidInputError):
        transforms.make_test_function([1.0, 1.0, 2.0])


def test_parseval():
    e = transforms.TestFunction((1.0,), (1.0,))
    direct, contour = transforms.parseval_sides(e, e)
    assert direct == pytest.approx(0.5, rel=1e-12)
    assert contour == pytest.approx(direct, rel=1e-8)


def test_mellin_inversion(fixture_f):
    x = np.array([0.5, 1.0, 2.0])
    assert transforms.mellin_inverse(fixture_f.mellin, x, 0.25) == pytest.approx(fixture_f(x), rel=1e-8)


def test_sampled_mellin_matches_closed_form():
    e = transforms.TestFunction((1.0,), (2.0,))
    sampled = transforms.SampledFunction.from_callable(e, np.linspace(0.01, 30.0, 3000), decay_rate=2.0)
    assert transforms.mellin(sampled, 1.5) == pytest.approx(e.mellin(1.5), rel=1e-6)


def test_sampled_function_validation_reports_index():
    with pytest.raises(InvalidInputError, match="index 2"):
        transforms.SampledFunction(np.array([0.1, 0.2, 0.15]), np.zeros(3))
    with pytest.raises(InvalidInputError):
        transforms.SampledFunction(np.array([0.0, 1.0]), np.zeros(2))


def test_sampled_function_tail_and_slope():
    grid = np.linspace(0.1, 5.0, 50)
    s = transforms.SampledFunction(grid, np.exp(-2 * grid))
    assert s.fitted_decay_rate() == pytest.approx(2.0, rel=1e-6)
    assert s(7.0) == pytest.approx(math.exp(-14.0), rel=1e-5)
    assert s.slope(1.0) == pytest.approx(-2 * math.exp(-2.0), rel=1e-4)


def test_norm_bound_closed_forms():
    assert transforms.norm_bound_f(transforms.MellinSpec(0.5, 2.0)) == pytest.approx(math.pi * math.sqrt(6) / 64,
                                                                                     rel=1e-12)
    assert transforms.norm_bound_g(0.5) == pytest.approx(math.pi / 16, rel=1e-10)
    assert transforms.norm_bound_g(0.3) > 0
    with pytest.raises(DomainError):
        transforms.norm_bound_f(transforms.MellinSpec(1.5, 2.0))


def test_forward_f_routes_agree(fixture_f):
    tau = [0.5, 1.0, 2.0]
    mb = transforms.forward_f(fixture_f, tau).values
    comp = transforms.forward_f(fixture_f, tau, method="composition").values
    assert mb == pytest.approx(comp, rel=1e-8)


def test_forward_f_direct_on_samples():
    e = transforms.TestFunction((1.0,), (1.0,))
    sampled = transforms.SampledFunction.from_callable(e, np.linspace(0.005, 40.0, 800), decay_rate=1.0)
    sampled = transforms.SampledFunction(sampled.grid, sampled.values, decay_rate=1.0)
    direct = transforms.forward_f(sampled, [0.5, 1.0]).values
    exact = transforms.forward_f(e, [0.5, 1.0]).values
    assert direct == pytest.approx(exact, rel=1e-5)


def test_forward_f_vanishes(fixture_f):
    Ff = transforms.forward_f(fixture_f, [1.0, 10.0]).values
    assert abs(Ff[1]) < abs(Ff[0]) / 100


@settings(max_examples=5, deadline=None)
@given(st.lists(st.floats(0.5, 5.0), min_size=3, max_size=3, unique=True).filter(
    lambda r: min(np.diff(sorted(r))) > 0.3))
def test_norm_inequality_f(rates):
    f = transforms.make_test_function(rates)
    spec = transforms.MellinSpec(0.5, 2.0)
    sup = np.max(np.abs(transforms.forward_f(f, np.linspace(0, 8, 33)).values))
    assert sup <= transforms.norm_bound_f(spec) * transforms.weighted_norm(f, spec)


def test_forward_g_routes_agree():
    bump = transforms.gaussian_bump()
    x = [0.1, 1.0, 10.0]
    assert transforms.forward_g(bump, x).values == pytest.approx(
        transforms.forward_g(bump, x, method="mellin_barnes").values, rel=1e-8)


def test_inverse_f_linearity_and_zero(fixture_f):
    Ff = transforms.forward_f(fixture_f, np.linspace(0, 20, 81))
    x = [0.5, 1.0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", transforms.TailDivergenceWarning)
        once = transforms.inverse_f(Ff, x).values
        twice = transforms.inverse_f(Ff.scaled(2.0), x).values
        zero = transforms.SampledFunction(np.linspace(0.1, 5, 20), np.zeros(20))
        assert np.all(transforms.inverse_f(zero, x).values == 0)
    assert twice == pytest.approx(2 * once, rel=1e-13)


def test_inverse_f_warns_on_undecayed_tail(fixture_f):
    Ff = transforms.forward_f(fixture_f, np.linspace(0, 5, 21))
    with pytest.warns(transforms.TailDivergenceWarning):
        transforms.inverse_f(Ff, [1.0])


def test_inverse_g_trivial_cases():
    constant = transforms.SampledFunction.from_callable(np.ones_like, np.geomspace(0.01, 100, 200), 0.0,
                                                        derivative=np.zeros_like)
    assert np.all(transforms.inverse_g(constant, [0.5, 1.0]).values == 0)
    bump = transforms.gaussian_bump()
    Gg = transforms.forward_g(bump, np.geomspace(0.01, 100, 10))
    at_zero = transforms.inverse_g(Gg, [0.0, 0.5])
    assert at_zero.values[0] == 0


def test_g_mellin_identity():
    lhs, rhs = transforms.g_mellin_identity_sides(transforms.reference_boundary_datum(), 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-5)
    with pytest.raises(DomainError):
        transforms.g_mellin_identity_sides(transforms.reference_boundary_datum(), 1.0, gamma=0.7)


def test_reference_datum_has_unit_integral():
    g = transforms.reference_boundary_datum()
    t = np.linspace(0, 12, 20001)
    assert np.trapezoid(g(t), t) == pytest.approx(1.0, rel=1e-6)
