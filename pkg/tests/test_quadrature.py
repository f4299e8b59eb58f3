import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasma_response import fermi
from plasma_response.quadrature import (DEFAULT_CONFIG, NODES, QuadratureConfig, QuadratureResult,
                                        gk15, integrate_finite, integrate_half_line,
                                        integrate_real_line, pole_seeds)


def test_constant():
    r = integrate_finite(lambda t: np.ones_like(t), 0.0, 1.0)
    assert r.converged and r.value == pytest.approx(1.0, rel=1e-15)


def test_monomial():
    assert integrate_finite(lambda t: t * t, -1.0, 1.0).value == pytest.approx(2 / 3, rel=1e-14)


def test_complex_pole_principal_log():
    r = integrate_finite(lambda t: 1 / (t - 0.5j), -1.0, 1.0, poles=[(0.0, 0.5)])
    exact = cmath.log((1 - 0.5j) / (-1 - 0.5j))
    assert r.converged
    assert abs(r.value - exact) < 1e-12
    assert r.value.imag == pytest.approx(2.2143, abs=1e-4)


@pytest.mark.parametrize("width", [1e-2, 1e-4, 1e-6])
def test_narrow_lorentzian(width):
    r = integrate_finite(lambda t: 1 / (t - 0.3 - 1j * width), -1.0, 1.0,
                         poles=[(0.3, width)])
    exact = cmath.log((0.7 - 1j * width) / (-1.3 - 1j * width))
    assert r.converged and abs(r.value - exact) < 1e-9


def test_gaussian_line():
    r = integrate_real_line(lambda t: np.exp(-t * t))
    assert r.value == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_log_density_line():
    r = integrate_real_line(lambda t: fermi.log_density(t, 0.0))
    assert r.value.real == pytest.approx(4 * fermi.f2(0.0), rel=1e-12)
    assert r.value.real == pytest.approx(1.35618, abs=1e-5)


def test_half_line():
    assert integrate_half_line(lambda t: t * np.exp(-t * t)).value == pytest.approx(0.5, rel=1e-13)


def test_gk15_degrees():
    one, neg = np.array([1.0]), np.array([-1.0])
    v, _ = gk15(lambda t: t ** 22, neg, one)
    assert v[0] == pytest.approx(2 / 23, rel=1e-13)
    _, e = gk15(lambda t: t ** 12, neg, one)
    assert e[0] < 1e-15
    assert len(NODES) == 15


def test_budget_exhaustion_flags_nonconvergence():
    cfg = QuadratureConfig(max_subdivisions=3)
    r = integrate_finite(lambda t: 1 / (t - 1e-8j), -1.0, 1.0, cfg)
    assert not r.converged and np.isfinite(r.value)


def test_deterministic():
    f = lambda t: np.exp(1j * 5 * t) / (t - 0.2 - 0.01j)
    a = integrate_finite(f, -2.0, 2.0, poles=[(0.2, 0.01)])
    b = integrate_finite(f, -2.0, 2.0, poles=[(0.2, 0.01)])
    assert a == b


def test_pole_seeds():
    assert pole_seeds(-1.0, 1.0, [(0.0, 0.1)]) == pytest.approx([-0.4, -0.2, -0.1, 0.0, 0.1, 0.2, 0.4])
    assert pole_seeds(0.0, 1.0, [(5.0, 0.1)]) == []


@pytest.mark.parametrize("a, b", [(1.0, 0.0), (0.0, math.inf), (0.0, 0.0)])
def test_bad_limits(a, b):
    with pytest.raises(ValueError):
        integrate_finite(lambda t: t, a, b)


@pytest.mark.parametrize("kw", [{"rel_tol": 0}, {"abs_tol": -1}, {"max_subdivisions": 0},
                                {"tail_eps": 1.0}, {"margin": -1.0}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        QuadratureConfig(**kw)


def test_result_arithmetic():
    a = QuadratureResult(1 + 1j, 1e-3, 15, True)
    b = QuadratureResult(2.0, 2e-3, 30, False)
    s = a + b
    assert s.value == 3 + 1j and s.error_estimate == pytest.approx(3e-3)
    assert s.evaluations == 45 and not s.converged
    assert a.scaled(-2j).value == 2 - 2j and a.scaled(-2j).error_estimate == pytest.approx(2e-3)


def _resolvent_weight(t):
    return fermi.log_density(t, 0.0) / (t - 1.0 - 0.01j)


@settings(max_examples=25, deadline=None)
@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_linearity(c):
    base = integrate_real_line(_resolvent_weight, poles=[(1.0, 0.01)])
    scaled = integrate_real_line(lambda t: c * _resolvent_weight(t), poles=[(1.0, 0.01)])
    assert abs(scaled.value - c * base.value) <= 1e-9 * abs(c * base.value)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1.9, 1.9))
def test_additivity(m):
    f = lambda t: np.exp(-t * t) / (t - 0.5 - 0.05j)
    whole = integrate_finite(f, -2.0, 2.0)
    left, right = integrate_finite(f, -2.0, m), integrate_finite(f, m, 2.0)
    err = whole.error_estimate + left.error_estimate + right.error_estimate
    assert abs(whole.value - left.value - right.value) <= max(err, 1e-13)


@pytest.mark.parametrize("alpha", [-5.0, 0.0, 6.0])
def test_tail_soundness(alpha):
    f = lambda t: fermi.log_density(t, alpha) / (t - 1.0 - 0.01j)
    t = DEFAULT_CONFIG.cutoff(alpha)
    short = integrate_finite(f, -t, t, breakpoints=[0.0], poles=[(1.0, 0.01)])
    long = integrate_finite(f, -2 * t, 2 * t, breakpoints=[0.0], poles=[(1.0, 0.01)])
    assert abs(long.value - short.value) < 10 * DEFAULT_CONFIG.abs_tol
