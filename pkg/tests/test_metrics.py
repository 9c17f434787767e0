import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdyn.kinetic import markovian_closed_form
from ncdyn.metrics import compare, fit_decay_rate


def test_identical_series():
    t = np.linspace(0, 10, 101)
    m = compare((t, np.sin(t)), (t, np.sin(t)), 0.0)
    assert m.max_abs == 0.0 and m.rms == 0.0 and m.window == (0.0, 10.0)


def test_coarser_grid_used():
    tf = np.linspace(0, 10, 1001)
    tc = np.linspace(0, 10, 11)
    m = compare((tf, tf**2), (tc, tc**2 + 1.0), 0.0)
    # evaluated at coarse nodes, where linear interpolation of t^2 on the fine grid is near exact
    assert m.max_abs == pytest.approx(1.0, abs=1e-4)


def test_t_max_window():
    t = np.linspace(0, 10, 101)
    m = compare((t, t), (t, np.where(t > 5, 100.0, t)), 1.0, 5.0)
    assert m.max_abs == 0.0 and m.window == (1.0, 5.0)


def test_errors():
    t = np.linspace(0, 1, 11)
    with pytest.raises(ValueError):
        compare((t, t), (t + 5, t), 0.0)
    with pytest.raises(ValueError):
        compare((t, t), (t, t), -1.0)
    with pytest.raises(ValueError):
        compare((t, t), (t, t), 2.0)


@given(st.floats(1e-3, 2.0), st.floats(0.0, 1.0), st.floats(0.05, 3.0))
def test_fit_recovers_exponential(rate, n_eq, amp):
    t = np.linspace(0, 3.0 / rate, 50)
    n = n_eq + amp * np.exp(-rate * t)
    fit = fit_decay_rate(t, n, n_eq, 0.0, t[-1])
    assert fit.defined and fit.rate == pytest.approx(rate, rel=1e-8)
    assert fit.residual < 1e-8


def test_fit_of_closed_form_relaxation():
    k = 0.0157
    t = np.linspace(0, 3 / (2 * k), 400)
    fit = fit_decay_rate(t, markovian_closed_form(t, 1.0, 0.2, k), 0.2, 0.0, t[-1])
    assert fit.rate == pytest.approx(2 * k, rel=1e-9)


def test_fit_undefined_at_fixed_point():
    t = np.linspace(0, 1, 20)
    fit = fit_decay_rate(t, np.full_like(t, 0.3), 0.3, 0.0, 1.0)
    assert not fit.defined and fit.residual is None and "fixed point" in fit.reason


def test_fit_undefined_few_samples():
    t = np.linspace(0, 1, 20)
    fit = fit_decay_rate(t, np.exp(-t), 0.0, 0.5, 0.55)
    assert not fit.defined and fit.samples < 3
