"""Acceptance criteria 1-10; each test prints one PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from plasma_response import fermi, response
from plasma_response.kernels import SpectralPoint, j_kernel, j_kernel_oracle_result
from plasma_response.quadrature import QuadratureConfig
from plasma_response.response import ResponseParams, sigma_tr

# tolerances and limits pinned from the acceptance criteria
SUM_RULE_TOL = 1e-8
SUM_RULE_SECONDS = 1.0
LONG_WAVE_TOL = 1e-5
HIGH_Q_TOL = 3e-2
HBAR_TOL = 2e-2
CLASSICAL_INVARIANCE_TOL = 1e-6
ROUTE_TOL = 1e-6
ROUTE_SECONDS = 60.0
KERNEL_TOL = 1e-9
SMALL_HBAR_BAND = (0.95, 1.05)
EPS_TOL = 5e-2
SCAN_SECONDS = 30.0

KERNEL_ORACLE = QuadratureConfig(rel_tol=1e-10, abs_tol=1e-300, max_subdivisions=4000)
KERNEL_GRID = [(q, x, y) for q in (0.1, 1.0, 10.0) for x in (0.5, 1.0, 2.0) for y in (0.01, 0.1, 1.0)]
ROUTE_GRID = [(1.0, 1.0, 0.1, 0.0), (0.5, 1.0, 0.01, 6.0), (2.0, 1.0, 0.01, -5.0)]
SHAPE_Q = np.linspace(0.025, 5.0, 200)


def report(number, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    return ok


@pytest.fixture
def emit(capsys):
    def _emit(number, ok, detail):
        with capsys.disabled():
            print()
            report(number, ok, detail)
        assert ok, detail
    return _emit


def criterion_1():
    worst, slowest = 0.0, 0.0
    for alpha in (-5.0, 0.0, 5.0):
        fermi._f2_result.cache_clear()
        t0 = time.perf_counter()
        w = fermi.f_sum_weight(alpha)
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(w - 1))
    ok = worst < SUM_RULE_TOL and slowest < SUM_RULE_SECONDS
    return ok, f"sum rule max |w-1|={worst:.2e} (tol {SUM_RULE_TOL:g}), slowest {slowest:.3f}s"


def criterion_2():
    target = 1 / (1 - 100j)
    devs = [abs(sigma_tr(ResponseParams(1e-6, 1.0, 0.01, a)).sigma_total / target - 1)
            for a in (-5.0, 0.0, 6.0)]
    return max(devs) < LONG_WAVE_TOL, f"long-wave max rel dev {max(devs):.2e} (tol {LONG_WAVE_TOL:g})"


def criterion_3():
    devs = [abs(sigma_tr(ResponseParams(q, 1.0, 0.01, 0.0)).sigma_total - 0.01j) / 0.01
            for q in (10.0, 30.0, 100.0)]
    ok = devs[2] < HIGH_Q_TOL and devs[0] > devs[1] > devs[2]
    return ok, "high-q rel dev " + ", ".join(f"{d:.2e}" for d in devs) + f" (q=100 tol {HIGH_Q_TOL:g}, decreasing)"


def criterion_4():
    base = ResponseParams(0.2, 1.0, 0.01, 0.0)
    sq0, sc0 = response.sigma_quantum(base), response.sigma_classical(base)
    q_dev = c_dev = 0.0
    for s in (0.5, 0.25):
        p = base.scaled(s)
        q_dev = max(q_dev, abs(response.sigma_quantum(p) / sq0 / s ** 2 - 1))
        c_dev = max(c_dev, abs(response.sigma_classical(p) / sc0 - 1))
    ok = q_dev < HBAR_TOL and c_dev < CLASSICAL_INVARIANCE_TOL
    return ok, f"hbar^2 scaling dev {q_dev:.2e} (tol {HBAR_TOL:g}), classical drift {c_dev:.1e} (tol {CLASSICAL_INVARIANCE_TOL:g})"


def criterion_5():
    t0 = time.perf_counter()
    devs = []
    for pt in ROUTE_GRID:
        p = ResponseParams(*pt)
        devs.append(abs(response.sigma_2(p) / response.sigma2_2d(p) - 1))
    elapsed = time.perf_counter() - t0
    ok = max(devs) < ROUTE_TOL and elapsed < ROUTE_SECONDS
    return ok, f"route equivalence max rel dev {max(devs):.2e} (tol {ROUTE_TOL:g}), {elapsed:.2f}s"


def criterion_6():
    u = np.logspace(-3, 3, 200)
    worst, unconverged = 0.0, 0
    for q, x, y in KERNEL_GRID:
        sp = SpectralPoint(q, x, y)
        closed = j_kernel(u, sp)
        for ui, ci in zip(u, closed):
            res = j_kernel_oracle_result(ui, sp, KERNEL_ORACLE)
            unconverged += not res.converged
            worst = max(worst, abs(ci - res.value) / abs(res.value))
    ok = worst < KERNEL_TOL and unconverged == 0
    return ok, (f"J(u) closed vs oracle max rel dev {worst:.2e} (tol {KERNEL_TOL:g}) over "
                f"{len(KERNEL_GRID)} (q,x,y) x 200 u, {unconverged} oracle failures")


def criterion_7():
    p = ResponseParams(0.05, 1.0, 0.01, 0.0)
    ratio = response.sigma_quantum_small_hbar(p) / response.sigma_quantum(p)
    lo, hi = SMALL_HBAR_BAND
    ok = lo <= ratio.real <= hi and abs(ratio.imag) <= hi - 1
    return ok, f"small-hbar / exact = {ratio.real:.6f}{ratio.imag:+.1e}j (band [{lo}, {hi}])"


def _local_extrema(v):
    kinds = []
    for i in range(1, len(v) - 1):
        if v[i] > v[i - 1] and v[i] > v[i + 1]:
            kinds.append("max")
        elif v[i] < v[i - 1] and v[i] < v[i + 1]:
            kinds.append("min")
    return kinds


def criterion_8():
    def scan(alpha):
        rs = [sigma_tr(ResponseParams(q, 1.0, 0.01, alpha)) for q in SHAPE_Q]
        return np.array([abs(r.sigma_classical) for r in rs]), np.array([abs(r.sigma_total) for r in rs])

    cl0, tot0 = scan(0.0)
    cl_ext, tot_ext = _local_extrema(cl0), _local_extrema(tot0)
    spread_neg = np.ptp(scan(-5.0)[1])
    spread_pos = np.ptp(scan(6.0)[1])
    ok = cl_ext == ["max"] and tot_ext[:2] == ["max", "min"] and spread_neg < spread_pos
    return ok, (f"classical extrema {cl_ext}, full extrema {tot_ext}, "
                f"spread alpha=-5 {spread_neg:.4e} < alpha=6 {spread_pos:.4e}")


def criterion_9():
    devs = []
    for x in (10.0, 30.0):
        eps = response.epsilon_tr(ResponseParams(1.0, x, 0.01, 0.0, 1.0))
        devs.append(abs(x * x * (eps - 1) + 1))
    ok = max(devs) < EPS_TOL and devs[1] < devs[0]
    return ok, "x^2(eps-1) rel dev from -x_p^2: " + ", ".join(f"{d:.2e}" for d in devs) + f" (tol {EPS_TOL:g})"


def _cli(*args):
    out = subprocess.run([sys.executable, "-m", "plasma_response", *args], capture_output=True, check=False)
    return out.returncode, out.stdout


def criterion_10():
    scan = ["scan", "--vary", "q", "--min", "0.025", "--max", "5", "--steps", "200",
            "--x", "1", "--y", "0.01", "--alpha", "0"]
    t0 = time.perf_counter()
    rc1, s1 = _cli(*scan, "--threads", "1")
    elapsed = time.perf_counter() - t0
    rc2, s2 = _cli(*scan, "--threads", "1")
    rc4, s4 = _cli(*scan, "--threads", "4")
    rv1, v1 = _cli("validate", "--threads", "1")
    rv4, v4 = _cli("validate", "--threads", "4")
    rv2, v2 = _cli("validate", "--threads", "1")
    same = s1 == s2 == s4 and v1 == v2 == v4
    ok = same and rc1 == rc2 == rc4 == rv1 == rv2 == rv4 == 0 and elapsed < SCAN_SECONDS
    return ok, (f"scan/validate byte-identical across runs and threads: {same}, "
                f"200-point scan {elapsed:.2f}s (limit {SCAN_SECONDS:g}s)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number, emit):
    ok, detail = CRITERIA[number - 1]()
    emit(number, ok, detail)


if __name__ == "__main__":
    results = [report(i, *fn()) for i, fn in enumerate(CRITERIA, start=1)]
    sys.exit(0 if all(results) else 1)
