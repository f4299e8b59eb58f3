"""Transverse conductivity and permittivity of a collisional quantum plasma.

All quantities are reduced: ``q = k/k_T``, ``x = omega/(k_T v_T)``,
``y = nu/(k_T v_T)``, ``z = x + i y``, ``x_p = omega_p/(k_T v_T)``; conductivities
are returned as ``sigma / sigma_0`` with ``sigma_0`` the static Drude value.

With ``L(t) = ln(1 + e^(alpha - t^2))`` and ``f_F(u) = 1/(1 + e^(u^2 - alpha))``

    sigma / sigma_0 = 1/(4 i f2) [ int (1/q - t/x) y L(t) / (t - z/q) dt
                                   - (y/x) int_0^inf u^4 f_F(u) J(u) du ]

The first integral splits into the classical term (the ``1/q`` part) and
``sigma_1`` (the ``-t/x`` part); the second is ``sigma_2``.  ``sigma_1`` and
``sigma_2`` cancel at leading order, leaving a quantum correction that scales as
``hbar^2``, i.e. as ``s^2`` under ``(q, x, y) -> s (q, x, y)``.

Permittivity follows from ``eps = 1 + 4 pi i sigma / omega``, which in reduced
units reads ``eps = 1 + i x_p^2 / (x y) * sigma / sigma_0``, or

    eps = 1 + x_p^2 / (4 f2 x^2) [ int (x/q - t) L(t) / (t - z/q) dt
                                   - int_0^inf u^4 f_F(u) J(u) du ].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import fermi
from .errors import NumericalError, ParameterError
from .kernels import SpectralPoint, j_kernel
from .quadrature import (DEFAULT_CONFIG, QuadratureConfig, QuadratureResult, integrate_finite,
                         integrate_half_line, integrate_real_line)


@dataclass(frozen=True)
class ResponseParams:
    """One operating point ``(q, x, y, alpha)`` plus the optional plasma frequency ``x_p``."""

    q: float
    x: float
    y: float
    alpha: float = 0.0
    x_p: Optional[float] = None

    def __post_init__(self):
        for name in ("q", "x", "y", "alpha"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParameterError(f"{name} must be a finite real number")
        for name in ("q", "x", "y"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be > 0")
        if self.x_p is not None:
            if not math.isfinite(self.x_p):
                raise ParameterError("x_p must be a finite real number")
            if self.x_p < 0:
                raise ParameterError("x_p must be >= 0")

    @property
    def spectral(self) -> SpectralPoint:
        return SpectralPoint(self.q, self.x, self.y)

    def with_(self, **changes) -> "ResponseParams":
        return replace(self, **changes)

    def scaled(self, s: float) -> "ResponseParams":
        """Same ``k l = q/y`` and ``omega tau = x/y``, with hbar scaled by ``s``."""
        return replace(self, q=s * self.q, x=s * self.x, y=s * self.y)


@dataclass(frozen=True)
class ResponseResult:
    params: ResponseParams
    sigma_total: complex
    sigma_classical: complex
    sigma_quantum: complex
    sigma_1: complex
    sigma_2: complex
    epsilon: Optional[complex]
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return all(r.converged for r in self.diagnostics.values())

    @property
    def error_estimate(self) -> float:
        """Error bound on ``sigma_total`` propagated from the quadratures."""
        d = self.diagnostics
        return d["total_first"].error_estimate + d["sigma_2"].error_estimate


# --- integrands -------------------------------------------------------------

def _log_weight(alpha):
    return lambda t: fermi.log_density(t, alpha)


def _classical_integrand(p: ResponseParams):
    # (y/q) L / (t - z/q) == y L / (q t - z)
    q, z, y, a = p.q, complex(p.x, p.y), p.y, p.alpha
    return lambda t: y * fermi.log_density(t, a) / (q * t - z)


def _sigma1_integrand(p: ResponseParams):
    q, z, a = p.q, complex(p.x, p.y), p.alpha
    c = -p.y / p.x
    return lambda t: c * q * t * fermi.log_density(t, a) / (q * t - z)


def _first_integrand(p: ResponseParams):
    # (1/q - t/x) y L / (t - z/q) == y (1 - q t / x) L / (q t - z)
    q, z, y, x, a = p.q, complex(p.x, p.y), p.y, p.x, p.alpha
    return lambda t: y * (1.0 - q * t / x) * fermi.log_density(t, a) / (q * t - z)


def _kernel_integrand(p: ResponseParams):
    sp, a = p.spectral, p.alpha

    def f(u):
        return u ** 4 * fermi.fermi_dirac(u * u, a) * j_kernel(u, sp)

    return f


def _tau_integral(f, p: ResponseParams, cfg: QuadratureConfig, poles=None) -> QuadratureResult:
    sp = p.spectral
    return integrate_real_line(f, cfg, alpha=p.alpha,
                               poles=sp.resolvent_poles() if poles is None else poles)


def _kernel_integral(p: ResponseParams, cfg: QuadratureConfig) -> QuadratureResult:
    sp = p.spectral
    return integrate_half_line(_kernel_integrand(p), cfg, alpha=p.alpha,
                               poles=sp.kernel_features())


def _prefactor(p: ResponseParams, cfg: QuadratureConfig) -> complex:
    return 1.0 / (4j * fermi.f2(p.alpha, cfg))


def _checked(term: str, res: QuadratureResult) -> QuadratureResult:
    if not res.converged:
        raise NumericalError(term, res)
    return res


# --- public terms -----------------------------------------------------------

def sigma_classical(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Classical (hbar-independent) part of ``sigma / sigma_0``."""
    res = _checked("sigma_classical", _tau_integral(_classical_integrand(p), p, cfg))
    return _prefactor(p, cfg) * res.value


def sigma_1(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Quantum term from the ``-(k l / omega tau) P_x`` numerator."""
    res = _checked("sigma_1", _tau_integral(_sigma1_integrand(p), p, cfg))
    return _prefactor(p, cfg) * res.value


def sigma_2(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Quantum term from the shifted Fermi-Dirac difference, via the J(u) kernel."""
    res = _checked("sigma_2", _kernel_integral(p, cfg))
    return -_prefactor(p, cfg) * (p.y / p.x) * res.value


def sigma2_2d_result(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> QuadratureResult:
    """``sigma_2`` as the nested (t, rho) double integral, diagnostics included.

    ``sigma_2 = -y/(4 i f2 x) int dt / ((t - zeta)^2 - h^2) int_0^inf rho L(t^2 + rho^2) drho``.
    The inner integral is done by adaptive quadrature at every outer node; the
    innermost ``rho`` range is truncated with the same tail policy.
    """
    sp = p.spectral
    zeta, h2, a = sp.zeta, sp.half_q ** 2, p.alpha
    evaluations = 0
    inner_ok = True

    def inner(t):
        nonlocal evaluations, inner_ok
        out = np.empty(t.shape)
        for i, ti in enumerate(t):
            shift = a - ti * ti
            res = integrate_half_line(lambda r: r * np.logaddexp(0.0, shift - r * r), cfg, alpha=shift)
            evaluations += res.evaluations
            inner_ok = inner_ok and res.converged
            out[i] = res.value.real
        return out

    def outer(t):
        s = t - zeta
        return inner(t) / (s * s - h2)

    res = integrate_real_line(outer, cfg, alpha=a, poles=sp.shifted_poles())
    res = QuadratureResult(res.value, res.error_estimate, res.evaluations + evaluations,
                           res.converged and inner_ok)
    return res.scaled(-_prefactor(p, cfg) * p.y / p.x)


def sigma2_2d(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Cross-check route for :func:`sigma_2`; see :func:`sigma2_2d_result`."""
    return _checked("sigma2_2d", sigma2_2d_result(p, cfg)).value


def sigma_quantum(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Quantum part ``sigma_1 + sigma_2`` of ``sigma / sigma_0``."""
    return sigma_1(p, cfg) + sigma_2(p, cfg)


def sigma_tr(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ResponseResult:
    """Full evaluation of ``sigma / sigma_0`` (and ``eps`` when ``x_p`` is set).

    Does not raise on non-convergence; inspect ``result.converged`` and
    ``result.diagnostics`` instead.
    """
    pref = _prefactor(p, cfg)
    r_cl = _tau_integral(_classical_integrand(p), p, cfg).scaled(pref)
    r_1 = _tau_integral(_sigma1_integrand(p), p, cfg).scaled(pref)
    r_2 = _kernel_integral(p, cfg).scaled(-pref * p.y / p.x)
    r_first = _tau_integral(_first_integrand(p), p, cfg).scaled(pref)
    total = r_first.value + r_2.value
    eps = None
    if p.x_p is not None:
        eps = 1.0 + 1j * p.x_p ** 2 / (p.x * p.y) * total if p.x_p > 0 else 1.0 + 0j
    return ResponseResult(
        params=p,
        sigma_total=total,
        sigma_classical=r_cl.value,
        sigma_quantum=r_1.value + r_2.value,
        sigma_1=r_1.value,
        sigma_2=r_2.value,
        epsilon=eps,
        diagnostics={"sigma_classical": r_cl, "sigma_1": r_1, "sigma_2": r_2, "total_first": r_first},
    )


def epsilon_tr(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Transverse permittivity from its own bracket integrals.

    Independent of :func:`sigma_tr` at the integrand level; the two agree
    through ``eps = 1 + i x_p^2/(x y) sigma/sigma_0``.
    """
    if p.x_p is None:
        raise ParameterError("x_p is required for the permittivity")
    if p.x_p == 0:
        return 1.0 + 0j
    q, x, z, a = p.q, p.x, complex(p.x, p.y), p.alpha
    # (x/q - t) L / (t - z/q) == (x - q t) L / (q t - z)
    first = _checked("epsilon_first", _tau_integral(
        lambda t: (x - q * t) * fermi.log_density(t, a) / (q * t - z), p, cfg))
    second = _checked("epsilon_kernel", _kernel_integral(p, cfg))
    return 1.0 + p.x_p ** 2 / (4.0 * fermi.f2(a, cfg) * x * x) * (first.value - second.value)


# --- small-hbar expansion ---------------------------------------------------

def transverse_g_weights(t, alpha: float):
    """Transverse-plane integrals of the ``g'`` and ``g''`` weights, over pi.

    Returns ``(A, B)`` with ``A = int_0^inf s g''(t^2 + s) ds = g(t^2)`` and
    ``B = int_0^inf s g'(t^2 + s) ds = -f_F(t^2)``, where ``s = P_perp^2``.
    """
    t = np.asarray(t, dtype=float)
    return fermi.g(t * t, alpha), -fermi.fermi_dirac(t * t, alpha)


def _small_hbar_integrand(p: ResponseParams, with_shift: bool):
    a, q, x, y = p.alpha, p.q, p.x, p.y
    shift = q / y if with_shift else 0.0
    d0 = complex(1.0, -x / y)

    def f(t):
        w2, w1 = transverse_g_weights(t, a)
        # G(P) = P_x [g'' P_x^2 + 3/2 g'] integrated over the transverse plane
        num = t ** 3 * w2 + 1.5 * t * w1
        return num / (d0 + 1j * shift * t)

    return f


def sigma_quantum_small_hbar_result(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG,
                                    with_shift: bool = True) -> QuadratureResult:
    """Leading (``hbar^2``) term of the quantum conductivity, with diagnostics.

    ``(q^3 / x) / (24 pi f2) int G(P) P_perp^2 d^3P / (1 - i x/y + i (q/y) P_x)``
    reduced to a single ``P_x`` integral.  ``with_shift=False`` drops the
    ``(q/y) P_x`` term from the resolvent (the integral then vanishes by parity).
    """
    res = integrate_real_line(_small_hbar_integrand(p, with_shift), cfg, alpha=p.alpha,
                              poles=p.spectral.resolvent_poles() if with_shift else ())
    return res.scaled(p.q ** 3 / (24.0 * p.x * fermi.f2(p.alpha, cfg)))


def sigma_quantum_small_hbar(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """See :func:`sigma_quantum_small_hbar_result`; intended for ``q << 1``."""
    return _checked("sigma_quantum_small_hbar", sigma_quantum_small_hbar_result(p, cfg)).value


# --- closed-form limits -----------------------------------------------------

def _check_xy(x, y):
    if not (math.isfinite(x) and x > 0):
        raise ParameterError("x must be > 0")
    if not (math.isfinite(y) and y > 0):
        raise ParameterError("y must be > 0")


def sigma_longwave(x: float, y: float) -> complex:
    """``k -> 0`` Drude limit ``1 / (1 - i omega tau)``."""
    _check_xy(x, y)
    return 1.0 / complex(1.0, -x / y)


def sigma_high_q_limit(x: float, y: float) -> complex:
    """``q -> inf`` limit ``i y / x = i nu / omega``."""
    _check_xy(x, y)
    return 1j * y / x
