"""Overflow-safe Fermi-Dirac kernels in reduced (dimensionless) momentum.

Every function takes the squared reduced momentum ``p_sq = P**2`` and the
reduced chemical potential ``alpha = mu / (k_B T)``.  Exponentials only ever
appear as ``exp(-|p_sq - alpha|)`` so arguments of several hundred units are
harmless.  Scalars in give floats out; arrays in give arrays out.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericalError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_half_line


def _prepare(p_sq, alpha):
    p = np.asarray(p_sq, dtype=float)
    if not math.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha!r}")
    if not np.all(np.isfinite(p)):
        raise DomainError("p_sq must be finite")
    if np.any(p < 0):
        raise DomainError("p_sq must be >= 0")
    return p, p - alpha


def _out(value, like):
    return float(value) if np.ndim(like) == 0 else value


def fermi_dirac(p_sq, alpha: float):
    """Occupation ``1 / (1 + exp(p_sq - alpha))``."""
    p, z = _prepare(p_sq, alpha)
    e = np.exp(-np.abs(z))
    out = np.where(z > 0, e / (1.0 + e), 1.0 / (1.0 + e))
    return _out(out, p_sq)


def g(p_sq, alpha: float):
    """``exp(p_sq - alpha) / (1 + exp(p_sq - alpha))**2``, i.e. ``f (1 - f)``.

    Equal to minus the derivative of :func:`fermi_dirac` with respect to
    ``p_sq``; even in the sign of ``p_sq - alpha``.
    """
    p, z = _prepare(p_sq, alpha)
    e = np.exp(-np.abs(z))
    return _out(e / (1.0 + e) ** 2, p_sq)


def _ratio(z):
    # (1 - e^z) / (1 + e^z) == -tanh(z / 2), finite for all z
    return -np.tanh(0.5 * z)


def g_prime(p_sq, alpha: float):
    """Derivative of :func:`g` with respect to ``p_sq``."""
    p, z = _prepare(p_sq, alpha)
    e = np.exp(-np.abs(z))
    return _out(e / (1.0 + e) ** 2 * _ratio(z), p_sq)


def g_double_prime(p_sq, alpha: float):
    """Second derivative of :func:`g` with respect to ``p_sq``."""
    p, z = _prepare(p_sq, alpha)
    e = np.exp(-np.abs(z))
    gv = e / (1.0 + e) ** 2
    return _out(gv * (_ratio(z) ** 2 - 2.0 * gv), p_sq)


def log_density(t, alpha: float):
    """``ln(1 + exp(alpha - t**2))`` without overflow.

    This is the transverse-plane integral of ``g`` weighted by ``P_perp**3``,
    divided by pi; it weights every one-dimensional reduced integral.  Its
    derivative in ``t`` is ``-2 t fermi_dirac(t**2, alpha)``.
    """
    tt = np.asarray(t, dtype=float)
    if not math.isfinite(alpha) or not np.all(np.isfinite(tt)):
        raise DomainError("log_density needs finite arguments")
    return _out(np.logaddexp(0.0, alpha - tt * tt), t)


@lru_cache(maxsize=512)
def _f2_result(alpha: float, cfg: QuadratureConfig):
    res = integrate_half_line(lambda t: 0.5 * log_density(t, alpha), cfg, alpha=alpha)
    if not res.converged:
        raise NumericalError("f2", res)
    return res


def f2(alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Normalisation integral ``int_0^inf x^2 f_F(x^2) dx``.

    Evaluated from the smoother log form ``(1/2) int_0^inf ln(1 + e^(alpha - x^2)) dx``.
    Results are cached per ``(alpha, cfg)``.

    Raises
    ------
    DomainError
        If ``alpha`` is not finite.
    NumericalError
        If the quadrature does not converge.
    """
    if not math.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha!r}")
    return _f2_result(float(alpha), cfg).value.real


def f2_moment_form(alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``f2`` through the defining ``x^2 f_F`` integrand (cross-check of the log form)."""
    res = integrate_half_line(lambda x: x * x * fermi_dirac(x * x, alpha), cfg, alpha=alpha)
    if not res.converged:
        raise NumericalError("f2_moment_form", res)
    return res.value.real


def f_sum_weight(alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """``(2 / (3 f2)) int_0^inf g(P^2) P^4 dP``, which equals 1 for every alpha.

    This is the high-frequency weight behind the transverse f-sum rule.
    """
    res = integrate_half_line(lambda p: g(p * p, alpha) * p ** 4, cfg, alpha=alpha)
    if not res.converged:
        raise NumericalError("f_sum_weight", res)
    return 2.0 * res.value.real / (3.0 * f2(alpha, cfg))
