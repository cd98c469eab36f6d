import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from kelvin_index.errors import InvalidInputError, TruncationError
from kelvin_index.quadrature import (
    ContourSpec,
    Tolerance,
    gl_panels,
    integrate_decaying,
    integrate_fourier_cosine,
    integrate_interval,
    integrate_vertical_contour,
    stirling_half_height,
)
from kelvin_index.specfun import besselk

TIGHT = Tolerance(abs_tol=1e-15, rel_tol=1e-12)


@pytest.mark.parametrize("f, exact", [
    (lambda y: np.exp(-y), 1.0),
    (lambda y: besselk(0.0, y).real, math.pi / 2),
    (lambda y: np.exp(-y * y), math.sqrt(math.pi) / 2),
])
def test_decaying_examples(f, exact):
    assert integrate_decaying(f, TIGHT).value == pytest.approx(exact, rel=1e-11)


@pytest.mark.parametrize("g, omega, exact", [
    (lambda u: np.exp(-u), 0.0, 1.0),
    (lambda u: np.exp(-u), 1.0, 0.5),
    (lambda u: np.exp(-u * u), 2.0, math.sqrt(math.pi) / 2 * math.exp(-1)),
    (lambda u: np.exp(-u), 40.0, 1 / 1601),
])
def test_fourier_cosine_examples(g, omega, exact):
    assert integrate_fourier_cosine(g, omega, TIGHT).value == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("x", [1.0, 2.0])
def test_contour_inverts_gamma(x):
    result = integrate_vertical_contour(lambda s: special.gamma(s) * x ** (-s), ContourSpec(1.0), TIGHT,
                                        conjugate_symmetric=True, decay_rate=math.pi / 2)
    assert result.value == pytest.approx(math.exp(-x), rel=1e-11)


def test_contour_macdonald_square():
    def integrand(s):
        return (math.sqrt(math.pi) / 2) * np.exp(special.loggamma(1j - s) + special.loggamma(-s - 1j)
                                                 + special.loggamma(-s) - special.loggamma(0.5 - s))

    value = integrate_vertical_contour(integrand, ContourSpec(-0.5), TIGHT, conjugate_symmetric=True,
                                       decay_rate=math.pi, height_offset=1.0).value
    assert value == pytest.approx(besselk(1j, 1.0).real ** 2, rel=1e-10)


def test_contour_conjugate_symmetry_gives_real_value():
    result = integrate_vertical_contour(lambda s: special.gamma(s) * 1.5 ** (-s), ContourSpec(1.0), TIGHT,
                                        decay_rate=math.pi / 2)
    assert abs(np.imag(result.value)) <= max(result.err_estimate, 1e-14)


def test_fixed_height_too_short_raises():
    with pytest.raises(TruncationError):
        integrate_vertical_contour(lambda s: special.gamma(s), ContourSpec(1.0, half_height=2.0), TIGHT,
                                   decay_rate=math.pi / 2)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.3, 4.0))
def test_linearity(a, b, rate):
    f = lambda y: np.exp(-rate * y)  # noqa: E731
    g = lambda y: np.exp(-y * y)  # noqa: E731
    combined = integrate_decaying(lambda y: a * f(y) + b * g(y), TIGHT).value
    separate = a * integrate_decaying(f, TIGHT).value + b * integrate_decaying(g, TIGHT).value
    assert abs(combined - separate) <= 2 * TIGHT.target(abs(a) / rate + abs(b)) + 1e-14


def test_tightening_never_hurts():
    exact = math.sqrt(math.pi) / 2 * math.exp(-1)
    errors = []
    for rel in (1e-6, 1e-7, 1e-8, 1e-9):
        value = integrate_fourier_cosine(lambda u: np.exp(-u * u), 2.0, Tolerance(1e-16, rel)).value
        errors.append(abs(value - exact))
    assert all(later <= max(earlier, 1e-15) for earlier, later in zip(errors, errors[1:]))


def test_interval_and_panels():
    nodes, weights = gl_panels(0.0, 2.0, 3)
    assert weights.sum() == pytest.approx(2.0, rel=1e-15)
    assert integrate_interval(np.sin, 0.0, math.pi, TIGHT).value == pytest.approx(2.0, rel=1e-13)
    assert stirling_half_height(0.5, 1e-12) > 0


def test_tolerance_validation():
    with pytest.raises(InvalidInputError):
        Tolerance(abs_tol=0.0)
    with pytest.raises(InvalidInputError):
        ContourSpec(panels=0)
    assert Tolerance().scaled(0.1).rel_tol == pytest.approx(1e-11)
