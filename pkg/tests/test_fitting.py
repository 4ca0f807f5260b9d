import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optostore.errors import FitError, ShapeError
from optostore.fitting import fit_exponential, fit_fwhm, half_max_points, measure_fwhm


def test_exact_exponential():
    x = np.linspace(0.5e-6, 12e-6, 24)
    f = fit_exponential(x, 3.7 * np.exp(-x / 4.19e-6))
    assert f["tau"] == pytest.approx(4.19e-6, rel=1e-12)
    assert f["A"] == pytest.approx(3.7, rel=1e-12)
    assert f.converged and f.model == "exponential_decay"


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 100), st.floats(1e-3, 1e3))
def test_recovers_any_decay(tau, amp):
    x = np.linspace(0, 3 * tau, 15)
    assert fit_exponential(x, amp * np.exp(-x / tau))["tau"] == pytest.approx(tau, rel=1e-9)


def test_constant_is_not_a_decay():
    f = fit_exponential([1, 2, 3, 4], [2.0, 2.0, 2.0, 2.0])
    assert math.isinf(f["tau"]) and not f.converged


@pytest.mark.parametrize("x,y", [([1, 2], [1, 0.5]), ([1, 2, 3], [1, 0, 0.5]),
                                 ([1, 1, 1], [1, 0.5, 0.2]), ([1, 2, 3], [1, np.nan, 0.1])])
def test_bad_exponential_input(x, y):
    with pytest.raises(FitError):
        fit_exponential(x, y)


def test_triangle_width():
    x = np.linspace(-2, 2, 401)
    y = np.maximum(0, 1 - np.abs(x))
    assert measure_fwhm(x, y) == pytest.approx(1.0, abs=1e-12)


def test_lorentzian_width():
    h = 0.23
    x = np.linspace(-3, 3, 601)
    y = 1 / (1 + (x / h) ** 2)
    assert measure_fwhm(x, y) == pytest.approx(2 * h, rel=1e-3)
    rec = fit_fwhm(x, y)
    assert rec["center"] == pytest.approx(0.0, abs=1e-12)
    assert rec.model == "lineshape_fwhm"


def test_unsorted_input():
    x = np.linspace(-2, 2, 41)
    y = np.exp(-x ** 2)
    perm = np.random.default_rng(0).permutation(len(x))
    assert measure_fwhm(x[perm], y[perm]) == pytest.approx(measure_fwhm(x, y))


def test_edge_peak_rejected():
    with pytest.raises(ShapeError):
        half_max_points([0, 1, 2, 3], [4, 3, 2, 1])
    with pytest.raises(ShapeError):
        half_max_points([0, 1, 2, 3], [0.9, 1.0, 0.95, 0.9])
