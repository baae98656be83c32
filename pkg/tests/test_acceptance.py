"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for the summary only, or
through pytest, where the lines are printed even without ``-s``.
"""
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from banach_index.dsl import (C0, C01, CKSPLIT, GURARII, INF, C0Sum, Dual, Lp, Lp01, SumP,
                              Xr, normalize)
from banach_index.engine import DEFAULT_ORDER, ContradictionError, analyze
from banach_index.experiments import xr_bump
from banach_index.models import (LpCoords, WitnessFamily, basis_witnesses,
                                 lp01_step_witnesses, pm_theta_witnesses, xr_witnesses)
from banach_index.oracle import (OptConfig, eval_inf_max, eval_sup_min, f_theta_xi,
                                 objective_at, renorm_cover_demo, verify_cover)

from strategies import random_expr

CFG = OptConfig()
SLACK = 1e-4  # optimizer estimate may exceed the closed-form optimum by this much


def basis_value(p, n):
    # inf over S of max_i ||e_i - x|| in l_p^(n+1); both ends of the bracket agree
    s = n ** (-1.0 / p)
    return ((1 - s) ** p + 1 - 1 / n) ** (1 / p)


def in_bracket(v, exact):
    return exact - 1e-9 <= v <= exact + SLACK


def e(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _report(capsys, k, ok, elapsed, budget, detail):
    line = (f"criterion {k}: {'PASS' if ok else 'FAIL'}  "
            f"({elapsed:.2f}s / {budget:g}s)  {detail}")
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _run(k, budget, body, capsys=None):
    t0 = time.perf_counter()
    ok, detail = body()
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget
    _report(capsys, k, ok, elapsed, budget, detail)
    return ok


# -- criterion bodies ------------------------------------------------------------

def _golden():
    sq = math.sqrt
    table = []
    for p in (1.0, 1.5, 2.0, 4.0):
        table += [(Lp(p), "T", 2 ** (1 / p)), (Lp(p), "t", 2 ** (1 / p)),
                  (C0Sum((Lp(p),)), "t", 1.0), (C0Sum((Lp(p),)), "T", 2 ** (1 / p))]
    for p in (1.0, 1.5, 2.0, 4.0, 3.0):
        table += [(Lp01(p), "T", 2 ** (1 / p)), (Lp01(p), "t", 2 ** (1 / p))]
    table += [(C0, "T", 1.0), (C0, "t", 1.0), (Lp(INF), "T", 1.0), (Lp(INF), "t", 2.0),
              (Lp01(INF), "T", 2.0), (Lp01(INF), "t", 2.0), (C01, "T", 2.0), (C01, "t", 2.0),
              (SumP(2, Lp(1), Lp(1)), "T", sq(2 + sq(2))),
              (GURARII, "T", 2.0), (GURARII, "t", 1.0),
              (CKSPLIT, "mu1", 1.5), (CKSPLIT, "mu2", 1.5), (CKSPLIT, "T", 1.0),
              (CKSPLIT, "t", 2.0), (Dual(C0Sum((Lp(2),))), "T", 2.0)]
    for p in (1.0, 2.0, INF):
        table.append((SumP(p, Lp(1), Lp(1)), "t", 2.0))
    for r in (2.0, 3.0, 10.0):
        table.append((Xr(r), "t", 1 + 1 / r))
    bad = []
    for expr, q, v in table:
        iv = analyze(expr)[q]
        if not (abs(iv.lo - v) <= 1e-12 and abs(iv.hi - v) <= 1e-12):
            bad.append(f"{expr} {q}={iv}")
    return not bad, f"{len(table)} entries" + (f"; mismatches: {bad}" if bad else "")


def _f_sweep():
    worst = 0.0
    for p in (1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0):
        for xi in np.linspace(0.0, 1.0, 101):
            th = math.acos(float(xi) ** (p / 2))
            worst = max(worst, abs(f_theta_xi(p, th, float(xi)) - 2 ** p))
    return worst <= 1e-12, f"max |f - 2^p| = {worst:.3g}"


def _l1sum():
    w = pm_theta_witnesses(2, np.linspace(0, math.pi / 2, 101), 16)
    v = eval_inf_max(w.model, w, CFG).value
    return v >= math.sqrt(4 - 0.05), f"value {v:.12g} >= {math.sqrt(3.95):.6g}"


def _xr():
    w = xr_witnesses(2.0, 200)
    v = eval_inf_max(w.model, w, CFG).value
    bump = objective_at(w.model, w, xr_bump(200), "max")
    ok = 1.45 <= v <= 1.55 and bump <= 1.52
    return ok, f"value {v:.12g} in [1.45, 1.55], bump {bump:.12g} <= 1.52"


def _basis():
    bad, top = [], None
    for p in (1.0, 1.5, 2.0, 4.0):
        prev = -math.inf
        for n in (4, 16, 64, 256):
            model = LpCoords(p, n + 1)
            v = eval_inf_max(model, basis_witnesses(model, n), CFG).value
            if not in_bracket(v, basis_value(p, n)):
                bad.append(f"p={p} n={n} value {v} vs {basis_value(p, n)}")
            if v < prev:
                bad.append(f"p={p} n={n} decreased")
            prev = v
            if p == 1.0 and n == 256:
                top = v
    if top is None or top < 1.99:
        bad.append(f"p=1 n=256 value {top} < 1.99")
    return not bad, f"16 instances, p=1 n=256 value {top:.12g}" + (f"; {bad}" if bad else "")


def _antipodal():
    bad = []
    for p in (1.0, 1.5, 2.0, 3.0):
        model = LpCoords(p, 8)
        w = WitnessFamily(model, np.array([e(8, 0), -e(8, 0)]), "pm e1", "")
        v = eval_inf_max(model, w, CFG).value
        if abs(v - 2 ** (1 / p)) > 1e-6:
            bad.append(f"p={p}: {v}")
    return not bad, "4 exponents" + (f"; {bad}" if bad else "")


def _cover():
    model = LpCoords(INF, 16)
    w = WitnessFamily(model, np.array([e(16, 0), -e(16, 0)]), "pm e1", "")
    cov = verify_cover(model, w, 1.0, 100_000, CFG, domain="both")
    sm = eval_sup_min(model, w, CFG).value
    demo = renorm_cover_demo(8, 4, CFG)
    ok = cov.covered and abs(sm - 1.0) <= 1e-6 and demo.covered
    return ok, (f"covered={cov.covered}, sup-min {sm:.12g}, "
                f"renorm(8,4) covered={demo.covered}")


def _lp01():
    bad, parts = [], []
    for p in (1.0, 2.0):
        vals = {}
        for n in (8, 32):
            w = lp01_step_witnesses(p, n, 1024)
            vals[n] = eval_inf_max(w.model, w, CFG).value
            if not in_bracket(vals[n], basis_value(p, n)):
                bad.append(f"p={p} n={n} value {vals[n]} vs {basis_value(p, n)}")
        if not vals[32] > vals[8]:
            bad.append(f"p={p} not increasing")
        parts.append(f"p={p}: {vals[8]:.6g} -> {vals[32]:.6g}")
    return not bad, "; ".join(parts + bad)


def _engine():
    rng = random.Random(987654321)
    exprs = [random_expr(rng, 4) for _ in range(50)]
    bad = []
    r7 = 0
    try:
        for ex in exprs:
            ref = analyze(ex)
            for _ in range(10):
                order = list(DEFAULT_ORDER)
                rng.shuffle(order)
                if analyze(ex, order) != ref:
                    bad.append(f"order-dependent: {ex}")
                    break
            iv = ref.intervals
            if not (iv["mu1"].lo <= iv["t"].hi and iv["T"].lo <= iv["mu2"].hi):
                bad.append(f"chain: {ex}")
            if iv["t"].lo == iv["t"].hi == 1.0:
                r7 += 1
                d = analyze(Dual(normalize(ex)))
                if not d["T"].lo == d["T"].hi == 2.0:
                    bad.append(f"R7: {ex}")
    except ContradictionError as exc:
        bad.append(f"contradiction: {exc}")
    return not bad, f"50 expressions x 10 orders, {r7} R7 cases" + (f"; {bad}" if bad else "")


CRITERIA = [
    (1, 1.0, _golden), (2, 1.0, _f_sweep), (3, 60.0, _l1sum), (4, 30.0, _xr),
    (5, 120.0, _basis), (6, 10.0, _antipodal), (7, 30.0, _cover), (8, 60.0, _lp01),
    (9, 10.0, _engine),
]


@pytest.mark.parametrize("k, budget, body", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(k, budget, body, capsys):
    assert _run(k, budget, body, capsys)


if __name__ == "__main__":
    results = [_run(k, budget, body) for k, budget, body in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
