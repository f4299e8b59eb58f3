"""Executable checks of the sum rule, limits, scaling laws and route equivalences.

Every check produces a :class:`CheckReport`.  A report passes when
``|measured - expected| <= tolerance * max(1, |expected|)``; relative checks are
therefore reported as ratios against an expected value of 1.

Gate tolerances live in :data:`TOLERANCES`.  Regression constants live in a
goldens file (see :func:`write_goldens` / :func:`read_goldens`) whose records
carry their own tolerance.
"""
from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from . import __version__, fermi, response
from .errors import NumericalError, ParameterError, PlasmaResponseError
from .kernels import SpectralPoint, j_kernel, j_kernel_oracle_result
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .response import ResponseParams

GOLDENS_FORMAT = 1

#: Gate tolerances; bump GOLDENS_FORMAT together with any change here.
TOLERANCES = {
    "sum_rule": 1e-8,
    "long_wave": 1e-5,
    "high_q": 3e-2,
    "hbar_scaling": 2e-2,
    "classical_invariance": 1e-6,
    "classical_collapse": 1e-4,
    "route_equivalence": 1e-6,
    "kernel": 1e-9,
    "small_hbar": 5e-2,
    "eps_asymptotic": 5e-2,
    "decomposition": 5.0,  # multiple of the summed quadrature error estimates
}

LONG_WAVE_Q = 1e-6
HIGH_Q_VALUES = (10.0, 30.0, 100.0)
HBAR_BASE_Q = 0.2
HBAR_FACTORS = (0.5, 0.25)
COLLAPSE_BASE_Q = 1.0
COLLAPSE_FACTOR = 1e-3
SMALL_HBAR_Q = 0.05
EPS_FREQUENCIES = (10.0, 30.0)
KERNEL_U = np.logspace(-3, 3, 200)

#: Quadrature settings of the J(u) oracle; tighter than the closed-form gate it checks.
ORACLE_CONFIG = QuadratureConfig(rel_tol=1e-11, abs_tol=1e-300, max_subdivisions=4000)

#: Operating points of the default validation run.
DEFAULT_GRID = (
    ResponseParams(1.0, 1.0, 0.1, 0.0),
    ResponseParams(0.5, 1.0, 0.01, 6.0),
    ResponseParams(2.0, 1.0, 0.01, -5.0),
)

Number = Union[float, complex]


@dataclass(frozen=True)
class CheckReport:
    name: str
    measured: Number
    expected: Number
    tolerance: float
    passed: bool
    notes: str = ""

    @classmethod
    def make(cls, name, measured, expected, tolerance, notes=""):
        ok = bool(abs(measured - expected) <= tolerance * max(1.0, abs(expected)))
        return cls(name, measured, expected, tolerance, ok, notes)

    @classmethod
    def relative(cls, name, measured, expected, tolerance, notes=""):
        """Report ``measured / expected`` against 1."""
        extra = f"measured={_fmt(measured)} expected={_fmt(expected)}"
        notes = f"{notes}; {extra}" if notes else extra
        return cls.make(name, measured / expected, 1.0, tolerance, notes)

    @classmethod
    def failed(cls, name, exc):
        return cls(name, math.nan, math.nan, math.nan, False, f"error: {exc}")

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = (f"{status} {self.name} measured={_fmt(self.measured)} "
               f"expected={_fmt(self.expected)} tol={self.tolerance:.3g}")
        return out + (f" | {self.notes}" if self.notes else "")


def _fmt(v) -> str:
    if isinstance(v, complex):
        return f"({v.real:.17g}{v.imag:+.17g}j)"
    return f"{v:.17g}"


def _tag(**kw) -> str:
    return ",".join(f"{k}={v:g}" for k, v in kw.items())


# --- individual checks ------------------------------------------------------

def check_sum_rule(alpha: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> CheckReport:
    """The high-frequency weight ``(2/(3 f2)) int g P^4 dP`` must equal 1."""
    name = f"sum_rule({_tag(alpha=alpha)})"
    try:
        w = fermi.f_sum_weight(alpha, cfg)
    except NumericalError as exc:
        return CheckReport.failed(name, exc)
    return CheckReport.make(name, w, 1.0, TOLERANCES["sum_rule"])


def check_limits(x: float, y: float, alpha: float,
                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[CheckReport]:
    """Long-wave, high-q, classical-collapse and hbar^2-scaling reports at ``(x, y, alpha)``."""
    tag = _tag(x=x, y=y, alpha=alpha)
    out = []

    def guarded(name, fn):
        try:
            out.extend(fn())
        except NumericalError as exc:
            out.append(CheckReport.failed(name, exc))

    def long_wave():
        r = response.sigma_tr(ResponseParams(LONG_WAVE_Q, x, y, alpha), cfg)
        return [CheckReport.relative(f"long_wave({tag})", r.sigma_total,
                                     response.sigma_longwave(x, y), TOLERANCES["long_wave"],
                                     f"q={LONG_WAVE_Q:g}")]

    def high_q():
        limit = response.sigma_high_q_limit(x, y)
        devs = []
        for q in HIGH_Q_VALUES:
            r = response.sigma_tr(ResponseParams(q, x, y, alpha), cfg)
            devs.append(abs(r.sigma_total - limit) / abs(limit))
        notes = "relative deviations " + " ".join(f"q={q:g}:{d:.3e}" for q, d in zip(HIGH_Q_VALUES, devs))
        rising = sum(1 for a, b in zip(devs, devs[1:]) if not b < a)
        return [
            CheckReport.make(f"high_q({tag})", devs[-1], 0.0, TOLERANCES["high_q"], notes),
            CheckReport.make(f"high_q_monotone({tag})", float(rising), 0.0, 0.0, notes),
        ]

    def collapse():
        p = ResponseParams(COLLAPSE_BASE_Q, x, y, alpha).scaled(COLLAPSE_FACTOR)
        r = response.sigma_tr(p, cfg)
        return [CheckReport.relative(f"classical_collapse({tag})", r.sigma_total, r.sigma_classical,
                                     TOLERANCES["classical_collapse"],
                                     f"q={p.q:g},x={p.x:g},y={p.y:g}")]

    def scaling():
        base = ResponseParams(HBAR_BASE_Q, x, y, alpha)
        sq0 = response.sigma_quantum(base, cfg)
        sc0 = response.sigma_classical(base, cfg)
        reps = []
        for s in HBAR_FACTORS:
            p = base.scaled(s)
            reps.append(CheckReport.relative(
                f"hbar_scaling({tag},s={s:g})", response.sigma_quantum(p, cfg) / sq0, s * s,
                TOLERANCES["hbar_scaling"], f"base q={HBAR_BASE_Q:g}"))
            reps.append(CheckReport.relative(
                f"classical_invariance({tag},s={s:g})", response.sigma_classical(p, cfg), sc0,
                TOLERANCES["classical_invariance"], f"base q={HBAR_BASE_Q:g}"))
        return reps

    guarded(f"long_wave({tag})", long_wave)
    guarded(f"high_q({tag})", high_q)
    guarded(f"classical_collapse({tag})", collapse)
    guarded(f"hbar_scaling({tag})", scaling)
    return out


def check_route_equivalence(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> CheckReport:
    """``sigma_2`` through the J(u) kernel against the nested double integral."""
    name = f"route_equivalence({_tag(q=p.q, x=p.x, y=p.y, alpha=p.alpha)})"
    try:
        kernel = response.sigma_2(p, cfg)
        nested = response.sigma2_2d(p, cfg)
    except NumericalError as exc:
        return CheckReport.failed(name, exc)
    return CheckReport.relative(name, kernel, nested, TOLERANCES["route_equivalence"])


def check_kernel(sp: SpectralPoint, u=KERNEL_U, cfg: QuadratureConfig = ORACLE_CONFIG) -> CheckReport:
    """Largest relative deviation of the closed-form J(u) from its quadrature oracle."""
    name = f"kernel({_tag(q=sp.q, x=sp.x, y=sp.y)})"
    closed = j_kernel(np.asarray(u, dtype=float), sp)
    worst, at, failures = 0.0, None, 0
    for ui, ci in zip(np.asarray(u, dtype=float), closed):
        res = j_kernel_oracle_result(ui, sp, cfg)
        if not res.converged and res.error_estimate > 1e-2 * TOLERANCES["kernel"] * abs(res.value):
            failures += 1
        dev = abs(ci - res.value) / abs(res.value)
        if dev > worst:
            worst, at = dev, ui
    notes = f"{len(closed)} u points, worst at u={at:.6g}" if at is not None else ""
    if failures:
        return CheckReport(name, worst, 0.0, TOLERANCES["kernel"], False,
                           f"{notes}; {failures} oracle integrals inaccurate")
    return CheckReport.make(name, worst, 0.0, TOLERANCES["kernel"], notes)


def check_decomposition(p: ResponseParams, cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[CheckReport]:
    """Direct total against classical + quantum, and positivity of Re sigma_classical."""
    tag = _tag(q=p.q, x=p.x, y=p.y, alpha=p.alpha)
    r = response.sigma_tr(p, cfg)
    if not r.converged:
        return [CheckReport.failed(f"decomposition({tag})", "quadrature did not converge")]
    err = sum(d.error_estimate for d in r.diagnostics.values())
    # roundoff floor: a few ulps of the largest term
    floor = 16 * np.finfo(float).eps * max(abs(r.sigma_classical), abs(r.sigma_1), abs(r.sigma_2))
    tol = TOLERANCES["decomposition"] * err + floor
    resid = abs(r.sigma_total - (r.sigma_classical + r.sigma_quantum))
    re_cl = r.sigma_classical.real
    return [
        CheckReport(f"decomposition({tag})", resid, 0.0, tol, bool(resid <= tol),
                    f"summed error estimate {err:.3e}"),
        CheckReport.make(f"dissipative({tag})", 1.0 if re_cl > 0 else 0.0, 1.0, 0.0,
                         f"Re sigma_classical={re_cl:.17g}"),
    ]


def check_small_hbar(x: float, y: float, alpha: float,
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> CheckReport:
    """hbar^2 expansion against the exact quantum term at small q."""
    p = ResponseParams(SMALL_HBAR_Q, x, y, alpha)
    name = f"small_hbar({_tag(q=p.q, x=x, y=y, alpha=alpha)})"
    try:
        return CheckReport.relative(name, response.sigma_quantum_small_hbar(p, cfg),
                                    response.sigma_quantum(p, cfg), TOLERANCES["small_hbar"])
    except NumericalError as exc:
        return CheckReport.failed(name, exc)


def check_eps_asymptotics(q: float, y: float, alpha: float, x_p: float = 1.0,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[CheckReport]:
    """``x^2 (eps - 1) -> -x_p^2`` at large frequency."""
    out = []
    for x in EPS_FREQUENCIES:
        p = ResponseParams(q, x, y, alpha, x_p)
        name = f"eps_asymptotic({_tag(q=q, x=x, y=y, alpha=alpha, x_p=x_p)})"
        try:
            eps = response.epsilon_tr(p, cfg)
        except NumericalError as exc:
            out.append(CheckReport.failed(name, exc))
            continue
        out.append(CheckReport.relative(name, x * x * (eps - 1.0), -x_p * x_p,
                                        TOLERANCES["eps_asymptotic"]))
    return out


# --- goldens ----------------------------------------------------------------

def _golden_eval(name: str, params: dict, cfg: QuadratureConfig) -> complex:
    if name == "f2":
        return complex(fermi.f2(params["alpha"], cfg))
    if name == "j_kernel_oracle":
        sp = SpectralPoint(params["q"], params["x"], params["y"])
        res = j_kernel_oracle_result(params["u"], sp, ORACLE_CONFIG)
        if not res.converged:
            raise NumericalError("j_kernel_oracle", res)
        return res.value
    p = ResponseParams(params["q"], params["x"], params["y"], params.get("alpha", 0.0),
                       params.get("x_p"))
    if name == "sigma_classical":
        return response.sigma_classical(p, cfg)
    if name == "sigma_quantum":
        return response.sigma_quantum(p, cfg)
    if name == "sigma_total":
        r = response.sigma_tr(p, cfg)
        if not r.converged:
            raise NumericalError("sigma_total")
        return r.sigma_total
    if name == "sigma2_2d":
        return response.sigma2_2d(p, cfg)
    if name == "epsilon":
        return response.epsilon_tr(p, cfg)
    raise KeyError(f"unknown golden quantity {name!r}")


#: (quantity, parameters, relative tolerance) frozen by :func:`freeze_goldens`.
GOLDEN_SPECS = (
    ("f2", {"alpha": 0.0}, 1e-12),
    ("f2", {"alpha": -5.0}, 1e-12),
    ("f2", {"alpha": 6.0}, 1e-12),
    ("j_kernel_oracle", {"u": 1.0, "q": 1.0, "x": 1.0, "y": 0.01}, 1e-9),
    ("sigma_classical", {"q": 1.0, "x": 1.0, "y": 0.01, "alpha": 0.0}, 1e-9),
    ("sigma_quantum", {"q": 1.0, "x": 1.0, "y": 0.01, "alpha": 0.0}, 1e-8),
    ("sigma_total", {"q": 1.0, "x": 1.0, "y": 0.01, "alpha": 0.0}, 1e-9),
    ("sigma2_2d", {"q": 1.0, "x": 1.0, "y": 0.1, "alpha": 0.0}, 1e-8),
    ("epsilon", {"q": 1.0, "x": 1.0, "y": 0.01, "alpha": 0.0, "x_p": 1.0}, 1e-9),
)


@dataclass(frozen=True)
class GoldenRecord:
    name: str
    params: dict
    value: complex
    tolerance: float

    @property
    def label(self) -> str:
        return f"golden:{self.name}({_tag(**self.params)})"


def default_goldens_path() -> Path:
    return Path(str(resources.files("plasma_response") / "data" / "goldens.txt"))


def _revision() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).parent)
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"


def freeze_goldens(cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[GoldenRecord]:
    return [GoldenRecord(n, dict(p), _golden_eval(n, p, cfg), tol) for n, p, tol in GOLDEN_SPECS]


def write_goldens(path, records: Iterable[GoldenRecord], cfg: QuadratureConfig = DEFAULT_CONFIG,
                  grid: Iterable[ResponseParams] = DEFAULT_GRID) -> None:
    """Write a goldens file: comment header with provenance, then one TSV record per line."""
    grid_txt = "; ".join(_tag(q=p.q, x=p.x, y=p.y, alpha=p.alpha) for p in grid)
    lines = [
        f"# plasma_response goldens format={GOLDENS_FORMAT}",
        f"# revision: {_revision()}",
        f"# config: rel_tol={cfg.rel_tol:g} abs_tol={cfg.abs_tol:g} "
        f"max_subdivisions={cfg.max_subdivisions} tail_eps={cfg.tail_eps:g} margin={cfg.margin:g}",
        f"# grid: {grid_txt}",
        "name\tparams\tre\tim\ttolerance",
    ]
    for r in records:
        params = ",".join(f"{k}={v!r}" for k, v in r.params.items())
        lines.append(f"{r.name}\t{params}\t{r.value.real:.17g}\t{r.value.imag:.17g}\t{r.tolerance:g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_goldens(path) -> list[GoldenRecord]:
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# plasma_response goldens"):
        raise ValueError(f"{path}: not a goldens file")
    fmt = lines[0].rsplit("format=", 1)[-1].strip()
    if fmt != str(GOLDENS_FORMAT):
        raise ValueError(f"{path}: goldens format {fmt}, expected {GOLDENS_FORMAT}")
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    if not body or body[0].split("\t") != ["name", "params", "re", "im", "tolerance"]:
        raise ValueError(f"{path}: missing column header")
    out = []
    for ln in body[1:]:
        name, params, re, im, tol = ln.split("\t")
        pd = {}
        for item in filter(None, params.split(",")):
            k, v = item.split("=")
            pd[k] = float(v)
        out.append(GoldenRecord(name, pd, complex(float(re), float(im)), float(tol)))
    return out


def check_goldens(records: Iterable[GoldenRecord], cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[CheckReport]:
    out = []
    for rec in records:
        try:
            val = _golden_eval(rec.name, rec.params, cfg)
        except (KeyError, PlasmaResponseError) as exc:
            out.append(CheckReport.failed(rec.label, exc))
            continue
        out.append(CheckReport.relative(rec.label, val, rec.value, rec.tolerance))
    return out


# --- driver -----------------------------------------------------------------

def _as_params(item) -> ResponseParams:
    if isinstance(item, ResponseParams):
        return item
    if isinstance(item, dict):
        return ResponseParams(**item)
    return ResponseParams(*item)


def run_all(grid: Iterable = DEFAULT_GRID, cfg: QuadratureConfig = DEFAULT_CONFIG,
            goldens: Iterable[GoldenRecord] = ()) -> list[CheckReport]:
    """Run every check for every grid point (plus optional golden regressions).

    Grid items may be :class:`ResponseParams`, tuples or dicts; an invalid point
    raises :class:`ParameterError` before any check runs.  Duplicate checks
    shared between points run once.  Reports are sorted by name.
    """
    points = [_as_params(g) for g in grid]
    reports: dict[str, CheckReport] = {}

    def add(reps):
        for r in ([reps] if isinstance(reps, CheckReport) else reps):
            reports.setdefault(r.name, r)

    seen = set()
    for p in points:
        for key, fn in (
            (("sum_rule", p.alpha), lambda: check_sum_rule(p.alpha, cfg)),
            (("limits", p.x, p.y, p.alpha), lambda: check_limits(p.x, p.y, p.alpha, cfg)),
            (("small_hbar", p.x, p.y, p.alpha), lambda: check_small_hbar(p.x, p.y, p.alpha, cfg)),
            (("eps", p.q, p.y, p.alpha, p.x_p), lambda: check_eps_asymptotics(
                p.q, p.y, p.alpha, p.x_p if p.x_p else 1.0, cfg)),
            (("kernel", p.q, p.x, p.y), lambda: check_kernel(p.spectral)),
            (("route", p), lambda: check_route_equivalence(p, cfg)),
            (("decomposition", p), lambda: check_decomposition(p, cfg)),
        ):
            if key not in seen:
                seen.add(key)
                add(fn())
    add(check_goldens(goldens, cfg))
    return [reports[k] for k in sorted(reports)]
