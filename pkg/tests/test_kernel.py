import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kelvin_index import kernel
from kelvin_index.errors import DomainError
from kelvin_index.quadrature import ContourSpec

mp.mp.dps = 30


def test_definition_at_zero_order_is_a_macdonald_square():
    arg = 2 * 4**0.25 * mp.expjpi(0.25)
    assert kernel.kernel_definition(1.0, 0.0).value == pytest.approx(abs(complex(mp.besselk(0, arg))) ** 2,
                                                                     rel=1e-13)


def test_definition_against_high_precision():
    arg = 2 * 4**0.25 * mp.expjpi(0.25)
    assert kernel.kernel_definition(1.0, 1.0).value == pytest.approx(abs(complex(mp.besselk(2j, arg))) ** 2,
                                                                     rel=1e-12)


@pytest.mark.parametrize("x, tau", [(1.0, 0.5), (10.0, 2.0), (0.1, 0.0), (0.5, 5.0)])
def test_mellin_barnes_matches_definition(x, tau):
    assert kernel.kernel_mellin_barnes(x, tau).value == pytest.approx(kernel.kernel_definition(x, tau).value,
                                                                      rel=1e-9)


@pytest.mark.parametrize("x, tau", [(0.5, 1.0), (2.0, 0.0), (10.0, 2.0)])
def test_fourier_cosine_matches_definition(x, tau):
    assert kernel.kernel_fourier_cosine(x, tau).value == pytest.approx(kernel.kernel_definition(x, tau).value,
                                                                       rel=1e-8)


def test_large_order_fourier_cosine_is_small_and_positive():
    value = kernel.kernel_fourier_cosine(0.5, 5.0).value
    assert 0 < value < 1e-6
    assert value == pytest.approx(kernel.kernel_definition(0.5, 5.0).value, abs=1e-8)


def test_abscissa_independence():
    low = kernel.kernel_mellin_barnes(1.0, 0.5, ContourSpec(0.3)).value
    high = kernel.kernel_mellin_barnes(1.0, 0.5, ContourSpec(1.0)).value
    assert low == pytest.approx(high, rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(0.0, 8.0))
def test_evenness_and_positivity(x, tau):
    plus = kernel.kernel_mellin_barnes(x, tau).value
    minus = kernel.mellin_barnes_batch([x], [-tau])[0][0, 0, 0]
    assert plus > 0
    assert minus == pytest.approx(plus, rel=1e-13)


def test_jet_first_derivative_against_difference():
    h = 1e-4
    fd = (kernel.kernel_definition(1 + h, 1.0).value - kernel.kernel_definition(1 - h, 1.0).value) / (2 * h)
    jet = kernel.kernel_jet(1.0, 1.0)
    assert jet.d1 == pytest.approx(fd, rel=1e-4)
    assert jet.d0 == pytest.approx(kernel.kernel_definition(1.0, 1.0).value, rel=1e-10)


@pytest.mark.parametrize("x, tau", [(1.0, 1.0), (0.2, 0.0), (5.0, 3.0), (0.05, 0.5)])
def test_ode_and_operator_residuals(x, tau):
    jet = kernel.kernel_jet(x, tau)
    assert abs(kernel.ode_residual(jet)) <= 1e-7
    assert abs(kernel.operator_residual(jet)) <= 1e-7
    assert jet.d1 < 0


def test_residual_detects_a_wrong_jet():
    jet = kernel.kernel_jet(1.0, 1.0)
    broken = kernel.KernelJet(jet.x, jet.tau, jet.d0 * 1.01, jet.d1, jet.d2, jet.d3, jet.d4)
    assert abs(kernel.ode_residual(broken)) > 1e-5


def test_range_warning_and_domain():
    with pytest.warns(kernel.KernelRangeWarning):
        value = kernel.kernel_definition(1e-4, 1.0)
    assert value.method is kernel.KernelMethod.MELLIN_BARNES
    with pytest.raises(DomainError):
        kernel.kernel_definition(-1.0, 1.0)
    with pytest.raises(DomainError):
        kernel.kernel_mellin_barnes(1.0, 1.0, ContourSpec(-0.2))


def test_batch_shape_and_orders():
    values, result = kernel.mellin_barnes_batch([0.5, 1.0, 2.0], [0.0, 1.0], (0, 2))
    assert values.shape == (2, 3, 2)
    jet = kernel.kernel_jet(1.0, 1.0)
    assert values[1, 1, 1] == pytest.approx(jet.d2, rel=1e-11)
    assert result.err_estimate >= 0
    assert np.all(values[0] > 0)
    assert math.isfinite(kernel.MB_PREFACTOR)
