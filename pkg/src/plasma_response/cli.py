"""Command-line front end: ``eval``, ``scan`` and ``validate``.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
non-convergence or failed validation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, validation
from .errors import NumericalError, ParameterError, PlasmaResponseError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig
from .response import ResponseParams, ResponseResult, sigma_tr

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
THREADS_ENV = "PLASMA_RESPONSE_THREADS"

COLUMNS = (
    "varied_param", "q", "x", "y", "alpha", "x_p",
    "re_sigma", "im_sigma", "abs_sigma",
    "re_sigma_classical", "im_sigma_classical",
    "re_sigma_quantum", "im_sigma_quantum",
    "re_eps", "im_eps", "converged",
)
SCAN_PARAMS = ("q", "x", "y", "alpha")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Output and execution settings shared by every subcommand."""
    fmt: str = "csv"
    out: Optional[Path] = None
    threads: int = 1
    quadrature: QuadratureConfig = field(default_factory=lambda: DEFAULT_CONFIG)

    def __post_init__(self):
        if self.fmt not in ("csv", "json", "text"):
            raise UsageError(f"unknown format {self.fmt!r}")
        if self.threads < 1:
            raise UsageError("threads must be >= 1")


@dataclass(frozen=True)
class ScanSpec:
    """A 1-D sweep of ``vary`` over ``[start, stop]`` around a base point."""
    base: ResponseParams
    vary: str
    start: float
    stop: float
    steps: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.vary not in SCAN_PARAMS:
            raise UsageError(f"--vary must be one of {', '.join(SCAN_PARAMS)}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise UsageError("scan bounds must be finite")
        if self.steps < 2:
            raise UsageError("steps must be >= 2")
        if not self.start < self.stop:
            raise UsageError("--min must be < --max")
        if self.spacing not in ("linear", "log"):
            raise UsageError("spacing must be linear or log")
        if self.spacing == "log" and self.start <= 0:
            raise UsageError("log spacing requires --min > 0")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)

    def points(self) -> list[ResponseParams]:
        """Grid points in output order; raises ParameterError on any invalid point."""
        return [self.base.with_(**{self.vary: float(v)}) for v in self.values()]


def _num(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.17g}"


def result_row(r: ResponseResult, varied: str = "none") -> dict:
    p = r.params
    eps = r.epsilon
    return {
        "varied_param": varied,
        "q": p.q, "x": p.x, "y": p.y, "alpha": p.alpha, "x_p": p.x_p,
        "re_sigma": r.sigma_total.real, "im_sigma": r.sigma_total.imag,
        "abs_sigma": abs(r.sigma_total),
        "re_sigma_classical": r.sigma_classical.real, "im_sigma_classical": r.sigma_classical.imag,
        "re_sigma_quantum": r.sigma_quantum.real, "im_sigma_quantum": r.sigma_quantum.imag,
        "re_eps": None if eps is None else eps.real,
        "im_eps": None if eps is None else eps.imag,
        "converged": r.converged,
    }


def format_rows(rows: Sequence[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(list(rows), indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        cells = []
        for c in COLUMNS:
            v = row[c]
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif isinstance(v, str):
                cells.append(v)
            else:
                cells.append(_num(v))
        w.writerow(cells)
    return buf.getvalue()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def run_scan(spec: ScanSpec, run: RunConfig) -> list[ResponseResult]:
    points = spec.points()
    cfg = run.quadrature
    if run.threads == 1:
        return [sigma_tr(p, cfg) for p in points]
    with ThreadPoolExecutor(max_workers=run.threads) as pool:
        return list(pool.map(lambda p: sigma_tr(p, cfg), points))


def _base_params(ns, vary: Optional[str] = None) -> ResponseParams:
    values = {k: getattr(ns, k) for k in SCAN_PARAMS}
    if vary is not None:
        values[vary] = ns.min
    missing = [f"--{k}" for k, v in values.items() if v is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)}")
    return ResponseParams(values["q"], values["x"], values["y"], values["alpha"], ns.xp)


def _threads(ns) -> int:
    if ns.threads is not None:
        return ns.threads
    env = os.environ.get(THREADS_ENV)
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None


def _run_config(ns) -> RunConfig:
    try:
        quad = QuadratureConfig(rel_tol=ns.rel_tol, abs_tol=ns.abs_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(fmt=ns.format, out=ns.out, threads=_threads(ns), quadrature=quad)


def _unconverged(results: Sequence[ResponseResult]) -> list[ResponseResult]:
    return [r for r in results if not r.converged]


def cmd_eval(ns) -> int:
    run = _run_config(ns)
    r = sigma_tr(_base_params(ns), run.quadrature)
    _emit(format_rows([result_row(r)], run.fmt), run.out)
    return _report_convergence([r])


def cmd_scan(ns) -> int:
    run = _run_config(ns)
    spec = ScanSpec(_base_params(ns, ns.vary), ns.vary, ns.min, ns.max, ns.steps, ns.spacing)
    results = run_scan(spec, run)
    _emit(format_rows([result_row(r, spec.vary) for r in results], run.fmt), run.out)
    return _report_convergence(results)


def _report_convergence(results) -> int:
    bad = _unconverged(results)
    if not bad:
        return EXIT_OK
    for r in bad:
        terms = [k for k, d in r.diagnostics.items() if not d.converged]
        p = r.params
        print(f"error: quadrature did not converge at q={p.q:g} x={p.x:g} y={p.y:g} "
              f"alpha={p.alpha:g} ({', '.join(terms)})", file=sys.stderr)
    return EXIT_NUMERIC


def _read_grid(path: Path) -> list[ResponseParams]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read grid {path}: {exc.strerror}") from None
    pts = []
    for row in csv.DictReader(io.StringIO(text)):
        try:
            xp = row.get("x_p") or None
            pts.append(ResponseParams(float(row["q"]), float(row["x"]), float(row["y"]),
                                      float(row.get("alpha") or 0.0),
                                      None if xp is None else float(xp)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise UsageError(f"{path}: bad grid row {row}") from None
    return pts


def cmd_validate(ns) -> int:
    run = _run_config(ns)
    goldens_path = Path(ns.goldens) if ns.goldens else validation.default_goldens_path()
    grid = _read_grid(ns.grid) if ns.grid else list(validation.DEFAULT_GRID)
    if ns.freeze:
        records = validation.freeze_goldens(run.quadrature)
        validation.write_goldens(goldens_path, records, run.quadrature, grid)
        print(f"wrote {len(records)} goldens to {goldens_path}", file=sys.stderr)
    if not goldens_path.is_file():
        raise UsageError(f"goldens file not found: {goldens_path}")
    try:
        goldens = validation.read_goldens(goldens_path)
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc)) from None
    reports = validation.run_all(grid, run.quadrature, goldens)
    if run.fmt == "json":
        text = json.dumps([_report_json(r) for r in reports], indent=1) + "\n"
    else:
        text = "".join(r.line() + "\n" for r in reports)
    failed = [r for r in reports if not r.passed]
    if run.fmt != "json":
        text += f"{len(reports) - len(failed)}/{len(reports)} checks passed\n"
    _emit(text, run.out)
    for r in failed:
        print(f"FAILED: {r.name}", file=sys.stderr)
    return EXIT_NUMERIC if failed else EXIT_OK


def _report_json(r: validation.CheckReport) -> dict:
    def enc(v):
        return [v.real, v.imag] if isinstance(v, complex) else v
    return {"name": r.name, "measured": enc(r.measured), "expected": enc(r.expected),
            "tolerance": r.tolerance, "passed": r.passed, "notes": r.notes}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plasma-response",
                                 description="Transverse conductivity and permittivity of a "
                                             "collisional quantum plasma.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
    common.add_argument("--rel-tol", type=float, default=DEFAULT_CONFIG.rel_tol)
    common.add_argument("--abs-tol", type=float, default=DEFAULT_CONFIG.abs_tol)

    def point_args(required: bool) -> argparse.ArgumentParser:
        point = argparse.ArgumentParser(add_help=False)
        point.add_argument("--q", type=float, required=required, help="k / k_T")
        point.add_argument("--x", type=float, required=required, help="omega / (k_T v_T)")
        point.add_argument("--y", type=float, required=required, help="nu / (k_T v_T)")
        point.add_argument("--alpha", type=float, default=0.0, help="reduced chemical potential")
        point.add_argument("--xp", type=float, default=None,
                           help="omega_p / (k_T v_T); enables the permittivity columns")
        return point

    p_eval = sub.add_parser("eval", parents=[common, point_args(True)], help="evaluate one point")
    p_eval.add_argument("--format", choices=("csv", "json"), default="csv")
    p_eval.set_defaults(func=cmd_eval)

    p_scan = sub.add_parser("scan", parents=[common, point_args(False)], help="sweep one parameter")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--vary", choices=SCAN_PARAMS, required=True)
    p_scan.add_argument("--min", type=float, required=True)
    p_scan.add_argument("--max", type=float, required=True)
    p_scan.add_argument("--steps", type=int, default=200)
    p_scan.add_argument("--spacing", choices=("linear", "log"), default="linear")
    p_scan.set_defaults(func=cmd_scan)

    p_val = sub.add_parser("validate", parents=[common], help="run the validation checks")
    p_val.add_argument("--format", choices=("text", "json"), default="text")
    p_val.add_argument("--freeze", action="store_true",
                       help="regenerate the goldens file before checking")
    p_val.add_argument("--goldens", type=Path, default=None)
    p_val.add_argument("--grid", type=Path, default=None,
                       help="CSV with columns q,x,y[,alpha][,x_p]")
    p_val.set_defaults(func=cmd_validate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return ns.func(ns)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except PlasmaResponseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
