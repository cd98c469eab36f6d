"""Acceptance criteria 1-9, one test (and one summary line) each.

Criteria 1-8 read the JSON report of ``kelvin-index verify all``; criterion 9
runs that command a second time and compares bytes.  Runtime limits are
measured here rather than in the report, so the report stays byte-stable.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from kelvin_index import kernel, transforms
from kelvin_index.verify import KERNEL_GRID_TAU, KERNEL_GRID_X


def _verify_all() -> bytes:
    result = subprocess.run([sys.executable, "-m", "kelvin_index", "verify", "all"], capture_output=True)
    assert result.returncode in (0, 1), result.stderr.decode()
    return result.stdout


@pytest.fixture(scope="module")
def first_run():
    return _verify_all()


@pytest.fixture(scope="module")
def report(first_run):
    data = json.loads(first_run)
    return {suite["suite"]: suite for suite in data["suites"]}


def _cases(report, criterion):
    found = [c for suite in report.values() for c in suite["cases"] if c["criterion"] == criterion]
    assert found, f"no cases tagged with criterion {criterion}"
    return found


def _summary(cases):
    return "; ".join(f"{c['id']}={c['measured']:.3g} ({c['relation']} {c['threshold']:.3g})" for c in cases)


def _check(report, record, number, title, extra_ok=True, extra=""):
    cases = _cases(report, number)
    passed = all(c["status"] == "pass" for c in cases) and extra_ok
    record(number, title, passed, _summary(cases) + (f"; {extra}" if extra else ""))
    assert passed


def test_criterion_1_representation_agreement(report, record_criterion):
    start = time.perf_counter()
    for x in KERNEL_GRID_X:
        for tau in KERNEL_GRID_TAU:
            kernel.kernel_definition(x, tau)
            kernel.kernel_fourier_cosine(x, tau)
    kernel.mellin_barnes_batch(np.array(KERNEL_GRID_X), np.array(KERNEL_GRID_TAU))
    elapsed = time.perf_counter() - start
    _check(report, record_criterion, 1, "three kernel representations agree on the 25-point grid",
           elapsed < 60.0, f"runtime {elapsed:.2f}s (< 60s)")


def test_criterion_2_ode_certification(report, record_criterion):
    _check(report, record_criterion, 2, "fourth-order ODE and operator form from exact jets")


def test_criterion_3_gamma_identities(report, record_criterion):
    _check(report, record_criterion, 3, "gamma recurrence, reflection, duplication, cosine pair")


def test_criterion_4_round_trip_f(report, record_criterion):
    fixture = transforms.make_test_function((1.0, 2.0, 3.0))
    start = time.perf_counter()
    Ff = transforms.forward_f(fixture, np.linspace(0.0, 40.0, 161))
    with pytest.warns(transforms.TailDivergenceWarning):
        transforms.inverse_f(Ff, np.linspace(0.5, 2.0, 9))
    elapsed = time.perf_counter() - start
    variant = report["transforms"]["diagnostics"]["round_trip_f_variant_used"]
    _check(report, record_criterion, 4, "F inversion round trip on the 3-rate test function",
           elapsed < 600.0, f"best stated variant {variant}; runtime {elapsed:.2f}s (< 600s)")


def test_criterion_5_round_trip_g(report, record_criterion):
    variant = report["transforms"]["diagnostics"]["round_trip_g_variant_used"]
    _check(report, record_criterion, 5, "G inversion round trip on the Gaussian bump",
           extra=f"kernel variant {variant}")


def test_criterion_6_norm_bounds(report, record_criterion):
    _check(report, record_criterion, 6, "norm bounds for F and G, vanishing of Ff")


def test_criterion_7_wedge_problem(report, record_criterion):
    _check(report, record_criterion, 7, "wedge traces, PDE residual and its convergence order")


def test_criterion_8_inequality_and_identity(report, record_criterion):
    worst = report["specfun"]["diagnostics"]["lebedev_worst_point"]
    _check(report, record_criterion, 8, "K^2 inequality and G-side Mellin identity",
           extra=f"inequality worst at x={worst['x']:.3g}, tau={worst['tau']:.3g}")


def test_criterion_9_determinism(first_run, record_criterion):
    second = _verify_all()
    passed = first_run == second
    record_criterion(9, "two runs of verify all are byte-identical", passed,
                     f"{len(first_run)} bytes, {'identical' if passed else 'different'}")
    assert passed
