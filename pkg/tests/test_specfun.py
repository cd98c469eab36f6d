import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kelvin_index import specfun
from kelvin_index.errors import DomainError, PoleError, SeriesRangeError

mp.mp.dps = 30

finite = dict(allow_nan=False, allow_infinity=False)
off_axis = st.complex_numbers(max_magnitude=19.0, **finite).filter(
    lambda z: not (z.real < 0.5 and abs(z.imag) < 0.05 and abs(z.real - round(z.real)) < 0.05))


@settings(max_examples=100, deadline=None)
@given(off_axis)
def test_gamma_recurrence(z):
    lhs, rhs = specfun.cgamma(z + 1), z * specfun.cgamma(z)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0))
def test_gamma_reflection_on_imaginary_axis(tau):
    value = abs(specfun.cgamma(1j * tau)) ** 2 * tau * math.sinh(math.pi * tau) / math.pi
    assert value == pytest.approx(1.0, abs=1e-11)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.1, 8.0), st.floats(-8.0, 8.0))
def test_gamma_duplication(re, im):
    s = complex(re, im)
    lhs = specfun.cgamma(2 * s)
    rhs = specfun.cgamma(s) * specfun.cgamma(s + 0.5) * 2 ** (2 * s - 1) / math.sqrt(math.pi)
    assert abs(lhs - rhs) <= 1e-11 * abs(lhs)


def test_gamma_pole_and_beta():
    with pytest.raises(PoleError):
        specfun.cgamma(-3.0)
    assert specfun.cbeta(0.5, 0.5).real == pytest.approx(math.pi, rel=1e-14)
    assert specfun.clgamma(10.0).real == pytest.approx(math.lgamma(10.0), rel=1e-14)


@pytest.mark.parametrize("order", [0.0, 0.5, 2j, 10j, 20j, 1 + 3j, 5.5])
@pytest.mark.parametrize("z", [0.05, 1.0, 3 * cmath.exp(0.25j * math.pi), 0.3 * cmath.exp(-0.25j * math.pi),
                               10.0, 25 * cmath.exp(0.25j * math.pi), 2 + 1j])
def test_besselk_against_mpmath(order, z):
    reference = complex(mp.besselk(order, z))
    assert abs(specfun.besselk(order, z) - reference) <= 1e-12 * abs(reference)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(-10, 10), st.floats(0.2, 8), st.floats(-1.2, 1.2))
def test_besselk_order_evenness_and_conjugation(nr, ni, r, phi):
    nu, z = complex(nr, ni), r * cmath.exp(1j * phi)
    value = specfun.besselk(nu, z)
    assert abs(specfun.besselk(-nu, z) - value) <= 1e-12 * abs(value)
    assert abs(specfun.besselk(nu.conjugate(), z.conjugate()) - value.conjugate()) <= 1e-12 * abs(value)


def test_besselk_closed_forms_and_oracle():
    assert specfun.besselk(0.5, 1.0).real == pytest.approx(math.sqrt(math.pi / 2) / math.e, rel=1e-14)
    assert specfun.besselk(0, 1.0).real == pytest.approx(0.42102443824070834, rel=1e-14)
    assert specfun.besselk_real_line(2j, 1.5) == pytest.approx(complex(mp.besselk(2j, 1.5)), rel=1e-11)
    with pytest.raises(DomainError):
        specfun.besselk(0, 0.0)


@pytest.mark.parametrize("order", [0, 0.5, 2j, 1 + 1j])
@pytest.mark.parametrize("z", [1.0, 5 * cmath.exp(0.25j * math.pi), 20.0, -3 + 1j])
def test_besseli_against_mpmath(order, z):
    reference = complex(mp.besseli(order, z))
    assert abs(specfun.besseli(order, z) - reference) <= 1e-12 * abs(reference)


def test_besseli_series_range():
    with pytest.raises(SeriesRangeError):
        specfun.besseli(0, 31.0)


def test_hyper0f3_small_cases():
    assert specfun.hyper0f3(1, 1, 1, 0.0) == 1
    z = 0.7 + 0.2j
    reference = complex(mp.hyper([], [0.5, 1.5, 2.0], z))
    assert abs(specfun.hyper0f3(0.5, 1.5, 2.0, z) - reference) <= 1e-14 * abs(reference)


@pytest.mark.parametrize("tau", [0.0, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("x", [0.5, 2.0, 10.0])
def test_kelvin_i_pair_two_routes(tau, x):
    reference = complex(mp.besseli(2j * tau, x * mp.expjpi(0.25)) * mp.besseli(2j * tau, x * mp.expjpi(-0.25)))
    assert abs(specfun.kelvin_i_pair_sq(tau, x) - reference) <= 1e-11 * abs(reference)
    assert abs(specfun.kelvin_i_pair_sq_0f3(tau, x) - reference) <= 1e-11 * abs(reference)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 6.0), st.floats(0.3, 15.0))
def test_kelvin_k_pair_positive_and_even(tau, x):
    value = specfun.kelvin_k_pair_sq(tau, x)
    assert value > 0
    assert specfun.kelvin_k_pair_sq(-tau, x) == pytest.approx(value, rel=1e-12)
    direct = abs(complex(mp.besselk(2j * tau, x * mp.expjpi(0.25)))) ** 2
    assert value == pytest.approx(direct, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.3, 20.0))
def test_kelvin_i_pair_imaginary_part_is_odd(tau, x):
    plus, minus = specfun.kelvin_i_pair_sq(tau, x), specfun.kelvin_i_pair_sq(-tau, x)
    assert abs(plus.imag + minus.imag) <= 1e-12 * abs(plus)


def test_inversion_kernel_small_order_and_zero():
    assert specfun.inversion_kernel_point(0.0, 2.0) == 0.0
    ratio_3 = specfun.inversion_kernel_point(1e-3, 2.0) / 1e-3
    ratio_4 = specfun.inversion_kernel_point(1e-4, 2.0) / 1e-4
    # odd in tau, so the ratio settles with an O(tau^2) correction
    assert ratio_3 == pytest.approx(ratio_4, rel=1e-4)


def test_inversion_kernel_derivative_matches_difference():
    h, arg = 1e-5, 3.0
    for variant in specfun.KERNEL_VARIANTS:
        fd = (specfun.inversion_kernel_point(0.7, arg + h, variant=variant)
              - specfun.inversion_kernel_point(0.7, arg - h, variant=variant)) / (2 * h)
        analytic = specfun.inversion_kernel_point(0.7, arg, variant=variant, derivative=True) / arg
        assert analytic == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("tau", [0.3, 0.7, 2.0])
@pytest.mark.parametrize("x", [0.5, 4.0, 20.0])
def test_hypergeometric_and_kelvin_combinations_agree(tau, x):
    assert specfun.hypergeometric_pair_combination(tau, x) == pytest.approx(
        specfun.kelvin_pair_combination(tau, x), rel=1e-7)


def test_residue_series_differs_from_0f3_combination():
    # Documented defect: the ratio is not even constant in x.
    ratios = [specfun.gamma_ratio_residue_sum(0.3, x) / specfun.hypergeometric_pair_combination(0.3, x)
              for x in (1.0, 4.0)]
    assert abs(ratios[0] - ratios[1]) > 1.0


@pytest.mark.parametrize("s", [0.5, 1.0])
@pytest.mark.parametrize("y", [0.5, 1.0, 2.0])
def test_gamma_pair_cosine_transform(s, y):
    lhs, rhs = specfun.gamma_pair_cosine_sides(s, y)
    assert lhs == pytest.approx(rhs, rel=1e-6)
