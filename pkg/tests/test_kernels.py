import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plasma_response.errors import NumericalError, ParameterError
from plasma_response.kernels import (SERIES_RATIO, SpectralPoint, j_kernel, j_kernel_oracle,
                                     j_kernel_oracle_result, resolvent)
from plasma_response.quadrature import QuadratureConfig

ORACLE = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-300, max_subdivisions=4000)
U = np.logspace(-3, 3, 200)


def max_rel_dev(sp, u=U, cfg=ORACLE):
    closed = j_kernel(u, sp)
    ref = np.array([j_kernel_oracle_result(ui, sp, cfg).value for ui in u])
    return float(np.max(np.abs(closed - ref) / np.abs(ref)))


def test_resolvent_examples():
    sp = SpectralPoint(2.0, 1.0, 0.01)
    assert resolvent(sp.x / sp.q, sp) == pytest.approx(1j * sp.q / sp.y, rel=1e-12)
    assert abs(resolvent(1e12, sp)) < 1e-11
    r = resolvent(0.0, SpectralPoint(1.0, 1.0, 0.01))
    assert r == pytest.approx(-(1 - 0.01j) / 1.0001, rel=1e-14)
    assert r.real == pytest.approx(-0.99990, abs=1e-5)


@pytest.mark.parametrize("field, value, msg", [("y", 0.0, "y must be > 0"), ("q", -1.0, "q must be > 0"),
                                               ("x", float("nan"), "x must be a finite")])
def test_spectral_point_validation(field, value, msg):
    kw = {"q": 1.0, "x": 1.0, "y": 0.01, field: value}
    with pytest.raises(ParameterError, match=msg):
        SpectralPoint(**kw)


@pytest.mark.parametrize("q, x, y", [(1.0, 1.0, 0.01), (0.1, 0.5, 1.0), (10.0, 2.0, 0.1), (1.0, 0.5, 0.01)])
def test_closed_form_matches_oracle(q, x, y):
    assert max_rel_dev(SpectralPoint(q, x, y)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(0.2, 5.0), st.floats(0.005, 2.0))
def test_closed_form_matches_oracle_random(q, x, y):
    sp = SpectralPoint(q, x, y)
    assert max_rel_dev(sp, np.logspace(-3, 3, 25)) < 1e-9


@pytest.mark.parametrize("q, x, y", [(1.0, 1.0, 0.01), (0.1, 2.0, 1.0), (10.0, 0.5, 0.1)])
def test_small_u_limit(q, x, y):
    sp = SpectralPoint(q, x, y)
    limit = (4 / 3) / (sp.zeta ** 2 - sp.half_q ** 2)
    for u in (1e-5, 1e-6, 1e-8):
        assert j_kernel(u, sp) == pytest.approx(limit, rel=1e-8)
    assert j_kernel_oracle(0.0, sp) == pytest.approx(limit, rel=1e-12)


def test_switch_continuity():
    sp = SpectralPoint(0.1, 1.0, 0.01)
    edge = SERIES_RATIO * min(abs(sp.zeta + sp.half_q), abs(sp.zeta - sp.half_q))
    u = np.array([edge * (1 - 1e-12), edge * (1 + 1e-12)])
    a, b = j_kernel(u, sp)
    assert abs(a - b) < 1e-10 * abs(a)


@pytest.mark.parametrize("q, x, y", [(1.0, 1.0, 0.01), (0.1, 0.5, 1.0), (10.0, 2.0, 0.1)])
def test_large_u_leading_term(q, x, y):
    sp = SpectralPoint(q, x, y)
    # correction is O(|zeta| / u)
    devs = [abs(j_kernel(u, sp) * u * u + 4.0) for u in (1e3, 1e4, 1e5)]
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 10 * abs(sp.zeta) / 1e5


def test_even_in_u():
    sp = SpectralPoint(1.0, 1.0, 0.01)
    u = np.logspace(-3, 3, 17)
    assert np.array_equal(j_kernel(u, sp), j_kernel(-u, sp))
    refl = [j_kernel_oracle(-ui, sp, ORACLE) for ui in u]
    assert np.allclose(refl, [j_kernel_oracle(ui, sp, ORACLE) for ui in u], rtol=1e-11, atol=0)


def test_denominators_stay_below_axis():
    sp = SpectralPoint(1.0, 1.0, 0.01)
    t = np.linspace(-1, 1, 101)
    for u in (1e-3, 1.0, 1e3):
        assert np.all((u * t - sp.zeta).imag == pytest.approx(-sp.y / sp.q))


def test_scalar_and_array_outputs():
    sp = SpectralPoint(1.0, 1.0, 0.01)
    assert isinstance(j_kernel(1.0, sp), complex)
    assert j_kernel(np.array([1.0, 2.0]), sp).shape == (2,)


def test_oracle_nonconvergence_raises():
    sp = SpectralPoint(1.0, 1.0, 1e-6)
    with pytest.raises(NumericalError, match="j_kernel_oracle"):
        j_kernel_oracle(1.0, sp, QuadratureConfig(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=5))
