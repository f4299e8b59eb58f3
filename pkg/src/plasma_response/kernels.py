"""Resolvent factor and the quantum angular kernel J(u).

With ``zeta = z / q`` and ``h = q / 2``

    J(u) = int_{-1}^{1} (1 - t^2) dt / ((u t - zeta)^2 - h^2).

Splitting the denominator into ``(u t - zeta - h)(u t - zeta + h)`` and
integrating the partial fractions gives

    J(u) = -2/u^2
           + (u^2 - zeta^2 - h^2) / (2 h u^3) * [L(zeta + h) - L(zeta - h)]
           - zeta / u^3 * [L(zeta + h) + L(zeta - h)],

    L(w) = Log(u - w) - Log(-u - w) = -2 atanh(u / w).

For ``y > 0`` every ``u t - w`` has imaginary part ``-y/q < 0`` along the
segment, so the principal logarithm never meets its cut.  The difference
``L(zeta + h) - L(zeta - h)`` is rewritten as
``-2 [atanh(h / (u - zeta)) + atanh(h / (u + zeta))]`` so that small ``h`` does
not cancel.  When ``u`` is small against ``|zeta ± h|`` the closed form loses
digits to ``1/u^3`` cancellation and the even power series in ``u`` is used.
When ``h`` is not small against ``|zeta|`` the two poles can have very
different moduli, and the partial fractions are then evaluated one at a time,
each switching to its own series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError, ParameterError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate_finite

#: Ratio u / min|zeta ± h| below which the power series replaces the closed form.
SERIES_RATIO = 0.5
_SERIES_TERMS = 32  # even powers u^0 .. u^62; 0.5**64 ~ 5e-20
#: Above ``h > SPLIT_RATIO * |zeta|`` the two partial fractions are evaluated separately.
SPLIT_RATIO = 0.1


@dataclass(frozen=True)
class SpectralPoint:
    """Reduced wave number ``q = k/k_T``, frequency ``x`` and collision rate ``y``."""

    q: float
    x: float
    y: float

    def __post_init__(self):
        for name in ("q", "x", "y"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ParameterError(f"{name} must be a finite real number")
            if v <= 0:
                raise ParameterError(f"{name} must be > 0")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @property
    def zeta(self) -> complex:
        return self.z / self.q

    @property
    def half_q(self) -> float:
        return 0.5 * self.q

    @property
    def pole_width(self) -> float:
        """Distance ``y/q`` of every resolvent pole from the real axis."""
        return self.y / self.q

    def resolvent_poles(self):
        """(centre, width) of the pole of ``1/(t - zeta)``."""
        return [(self.x / self.q, self.pole_width)]

    def shifted_poles(self):
        """(centre, width) of the poles ``zeta ± h`` of the quantum denominator."""
        w = self.pole_width
        return [(self.x / self.q - self.half_q, w), (self.x / self.q + self.half_q, w)]

    def kernel_features(self):
        """Moduli ``u = |Re(zeta ± h)|`` where J(u) has its log peaks."""
        w = self.pole_width
        return [(abs(c), w) for c, _ in self.shifted_poles()]


def resolvent(tau, sp: SpectralPoint):
    """``1 / (tau - z/q)``; the denominator has imaginary part ``-y/q``."""
    t = np.asarray(tau, dtype=float)
    out = 1.0 / (t - sp.zeta)
    return complex(out) if np.ndim(tau) == 0 else out


@lru_cache(maxsize=256)
def _series_coefficients(zeta: complex, h: float) -> np.ndarray:
    # Taylor coefficients c_n of 1/((s - zeta)^2 - h^2) from
    # (zeta^2 - h^2) c_n = 2 zeta c_{n-1} - c_{n-2}; only even n survive the
    # t-integration, with weight int (1 - t^2) t^n dt = 4 / ((n + 1)(n + 3)).
    n_max = 2 * _SERIES_TERMS
    d = zeta * zeta - h * h
    c = np.empty(n_max + 1, dtype=complex)
    c[0] = 1.0 / d
    c[1] = 2.0 * zeta * c[0] / d
    for n in range(2, n_max + 1):
        c[n] = (2.0 * zeta * c[n - 1] - c[n - 2]) / d
    n = np.arange(0, n_max + 1, 2)
    return c[::2] * 4.0 / ((n + 1.0) * (n + 3.0))


def _j_series(u, zeta, h):
    coef = _series_coefficients(zeta, h)
    u2 = u * u
    acc = np.full(u.shape, coef[-1], dtype=complex)
    for c in coef[-2::-1]:
        acc = acc * u2 + c
    return acc


def _j_closed(u, zeta, h):
    u2 = u * u
    u3 = u2 * u
    diff = -2.0 * (np.arctanh(h / (u - zeta)) + np.arctanh(h / (u + zeta)))
    total = -2.0 * (np.arctanh(u / (zeta + h)) + np.arctanh(u / (zeta - h)))
    return -2.0 / u2 + (u2 - zeta * zeta - h * h) / (2.0 * h * u3) * diff - zeta / u3 * total


_K_WEIGHTS = 4.0 / ((np.arange(0, 2 * _SERIES_TERMS, 2) + 1.0) * (np.arange(0, 2 * _SERIES_TERMS, 2) + 3.0))


def _k_single(u, w):
    # int_{-1}^{1} (1 - t^2) dt / (u t - w)
    out = np.empty(u.shape, dtype=complex)
    small = u < SERIES_RATIO * abs(w)
    if np.any(small):
        t2 = (u[small] / w) ** 2
        acc = np.full(t2.shape, _K_WEIGHTS[-1], dtype=complex)
        for c in _K_WEIGHTS[-2::-1]:
            acc = acc * t2 + c
        out[small] = -acc / w
    if not np.all(small):
        ub = u[~small]
        out[~small] = -2.0 * (ub * ub - w * w) / ub ** 3 * np.arctanh(ub / w) - 2.0 * w / ub ** 2
    return out


def j_kernel(u, sp: SpectralPoint):
    """Closed-form angular kernel J(u); even in ``u``, vectorised over ``u``.

    ``J(u) -> (4/3) / (zeta^2 - h^2)`` as ``u -> 0`` and ``J(u) u^2 -> -4`` as
    ``u -> inf``.
    """
    uu = np.abs(np.asarray(u, dtype=float))
    zeta, h = sp.zeta, sp.half_q
    out = np.empty(uu.shape, dtype=complex)
    if h > SPLIT_RATIO * abs(zeta):
        # poles far apart: partial fractions term by term
        out[...] = (_k_single(uu, zeta + h) - _k_single(uu, zeta - h)) / (2.0 * h)
    else:
        small = uu < SERIES_RATIO * min(abs(zeta + h), abs(zeta - h))
        if np.any(small):
            out[small] = _j_series(uu[small], zeta, h)
        if not np.all(small):
            out[~small] = _j_closed(uu[~small], zeta, h)
    return complex(out) if np.ndim(u) == 0 else out


def _j_integrand(u, sp):
    zeta, h2 = sp.zeta, sp.half_q ** 2

    def f(t):
        s = u * t - zeta
        return (1.0 - t * t) / (s * s - h2)

    return f


def j_kernel_oracle_result(u: float, sp: SpectralPoint, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Direct adaptive quadrature of the defining integral of J(u)."""
    u = abs(float(u))
    if u == 0.0:
        val = (4.0 / 3.0) / (sp.zeta ** 2 - sp.half_q ** 2)
        return integrate_finite(lambda t: np.full(t.shape, val * 0.75) * (1 - t * t), -1.0, 1.0, cfg)
    # poles of the integrand sit at t = (zeta ± h) / u
    w = sp.pole_width / u
    poles = [((sp.x / sp.q + s * sp.half_q) / u, w) for s in (-1.0, 1.0)]
    return integrate_finite(_j_integrand(u, sp), -1.0, 1.0, cfg, breakpoints=(0.0,), poles=poles)


def j_kernel_oracle(u: float, sp: SpectralPoint, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """J(u) by quadrature; raises :class:`NumericalError` if it does not converge."""
    res = j_kernel_oracle_result(u, sp, cfg)
    if not res.converged:
        raise NumericalError("j_kernel_oracle", res)
    return res.value
