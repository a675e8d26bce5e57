"""Desk-scale acceptance checks for the whole package.

Each test prints exactly one summary line of the form
"[acceptance N] <what> -> PASS|FAIL" before asserting, so the tee'd
pytest log doubles as an acceptance report (run with -s to see the
lines for passing tests too).  These runs are heavier than the unit
tests; the full module takes roughly ten minutes on eight cores.
"""

import math

import numpy as np
import pytest
from conftest import bisection_ftrl_oracle, support_enumeration_oracle

from banditgame import (FixedStrategy, TsallisInf, duality_gap,
                        gen_hard_psne_instance, last_iterate_metrics,
                        pseudo_regret, run_selfplay, run_trials, solve_ne)
from banditgame.dynamics import default_threads
from banditgame.experiments import (PRESETS, PsneIdConfig, fit_loglog_slope,
                                    run_psne_identification,
                                    run_regret_scaling)
from banditgame.learners import ftrl_solve
from banditgame.rng import child_seed

MASTER_SEED = 20240915


def _report(num, label, ok, detail):
    verdict = "PASS" if ok else "FAIL"
    print(f"[acceptance {num}] {label}: {detail} -> {verdict}")
    return ok


def test_1_regret_scaling_slopes():
    # self-play on the 2x2 family with a shrinking gap eps = T^(-1/3)
    res = run_regret_scaling(PRESETS["fig1-desk"], threads=default_threads())
    slopes = {f["algorithm"]: f["slope"] for f in res.fits}
    ok = (0.25 <= slopes["tsallis"] <= 0.48
          and 0.42 <= slopes["exp3"] <= 0.62
          and slopes["ucb1"] > slopes["tsallis"])
    detail = ("tsallis=%.3f (want [0.25,0.48]) exp3=%.3f (want [0.42,0.62]) "
              "ucb1=%.3f (want > tsallis)"
              % (slopes["tsallis"], slopes["exp3"], slopes["ucb1"]))
    assert _report(1, "regret scaling slopes", ok, detail), detail


def test_2_psne_identification_rate():
    cfg = PsneIdConfig(m=16, n=16, d_1=0.2, d_min_values=[0.05],
                       horizon_multiplier=64, trials=200,
                       master_seed=MASTER_SEED)
    res = run_psne_identification(cfg, threads=default_threads())
    rates = [(r["t"], r["success_rate"]) for r in res.rows]
    first = next((k for k, (_, rate) in enumerate(rates) if rate >= 0.75), None)
    ok = first is not None and all(rate >= 0.70 for _, rate in rates[first:])
    if first is None:
        detail = "success rate never reached 0.75 within 64 x OPT"
    else:
        t_hit = rates[first][0]
        tail_min = min(rate for _, rate in rates[first:])
        detail = ("hit %.2f at t=%d (%.1f x OPT), min rate afterwards %.2f "
                  "(want >= 0.70)" % (rates[first][1], t_hit,
                                      t_hit / res.fits[0]["opt"], tail_min))
    assert _report(2, "identification probability", ok, detail), detail


def test_3_normalized_identification_u_shape():
    # d_min/d_1 ratios 1/2, 1/5, 1/50 at m = n = 16; the normalized
    # threshold time should dip at the middle ratio 1/(sqrt(16)+1) = 1/5
    cfg = PsneIdConfig(m=16, n=16, d_1=0.2, d_min_values=[0.1, 0.04, 0.004],
                       horizon_multiplier=64, trials=64,
                       master_seed=MASTER_SEED)
    res = run_psne_identification(cfg, threads=default_threads())
    norm = {f["d_min"]: (f["t_star_over_opt"] if f["defined"] else math.inf)
            for f in res.fits}
    ok = norm[0.04] < norm[0.1] and norm[0.04] < norm[0.004]
    detail = ("t*/OPT at ratio 1/2: %.2f, 1/5: %.2f, 1/50: %.2f "
              "(want strict minimum at 1/5)"
              % (norm[0.1], norm[0.04], norm[0.004]))
    assert _report(3, "normalized identification time U-shape", ok, detail), detail


def test_4_last_iterate_convergence():
    A = gen_hard_psne_instance(8, 8, 0.1, 0.2)
    sol = solve_ne(A)
    records = run_trials(A, TsallisInf, TsallisInf, 2**18, 32, MASTER_SEED,
                         threads=default_threads())
    series = [last_iterate_metrics(r, sol, A) for r in records]
    ts = [t for t, _, _ in series[0]]
    mean_breg = {t: float(np.mean([s[k][1] for s in series]))
                 for k, t in enumerate(ts)}
    fit = fit_loglog_slope([(t, v) for t, v in mean_breg.items()
                            if t >= 2**12], 2**12)
    ratio = mean_breg[2**18] / mean_breg[2**10]
    ok = (fit is not None and -1.0 <= fit.slope <= -0.2 and ratio < 0.10)
    detail = ("Bregman-sum slope %.3f (want [-1.0,-0.2]), final/t=1024 ratio "
              "%.3f (want < 0.10)" % (fit.slope if fit else float("nan"), ratio))
    assert _report(4, "last-iterate convergence", ok, detail), detail


def test_5_average_iterate_identity():
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    for k in range(50):
        m, n = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        A = rng.uniform(-1, 1, (m, n))
        T = int(rng.integers(100, 1000))
        rec = run_selfplay(A, TsallisInf(m), TsallisInf(n), T,
                           child_seed(MASTER_SEED, k))
        s = pseudo_regret(rec, A)
        gap = duality_gap(A, rec.avg_x, rec.avg_y)
        worst = max(worst, abs((s.reg_row + s.reg_col) / T - gap))
    ok = worst <= 1e-6
    detail = "max |(reg_row+reg_col)/T - DGap(avg)| = %.2e (want <= 1e-6)" % worst
    assert _report(5, "average-iterate identity", ok, detail), detail


def test_6_oracle_equivalence():
    rng = np.random.default_rng(MASTER_SEED + 1)
    worst_ftrl = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 11))
        L = rng.uniform(0, 30, m)
        eta = float(rng.uniform(0.01, 2.0))
        worst_ftrl = max(worst_ftrl, float(np.max(np.abs(
            ftrl_solve(L, eta) - bisection_ftrl_oracle(L, eta)))))
    worst_val = 0.0
    worst_gap = 0.0
    for _ in range(100):
        A = rng.uniform(-1, 1, (3, 3))
        sol = solve_ne(A)
        _, _, v_ref = support_enumeration_oracle(A)
        worst_val = max(worst_val, abs(sol.value - v_ref))
        worst_gap = max(worst_gap, duality_gap(A, sol.x_star, sol.y_star))
    ok = worst_ftrl <= 1e-8 and worst_val <= 1e-7 and worst_gap <= 1e-7
    detail = ("ftrl max |dx| = %.1e (want <= 1e-8), NE value err %.1e and "
              "gap %.1e (want <= 1e-7)" % (worst_ftrl, worst_val, worst_gap))
    assert _report(6, "oracle equivalence", ok, detail), detail


def test_7_inequality_property_suites():
    rng = np.random.default_rng(MASTER_SEED + 2)
    violations = 0
    for _ in range(1000):  # a <= b + sqrt(ac) implies a <= 2b + c
        a = float(rng.uniform(1e-6, 50))
        c = float(rng.uniform(1e-6, 50))
        b = a - math.sqrt(a * c) + float(rng.uniform(0, 10))
        violations += a > 2 * b + c + 1e-9
    for _ in range(1000):  # sum z_t/sqrt(t) <= min_s sqrt(a log2(T/s)) + 2b sqrt(s)
        T = int(rng.integers(2, 300))
        b = float(rng.uniform(0.1, 5))
        z = rng.uniform(0, b, T)
        a = float(np.sum(z**2))
        lhs = float(np.sum(z / np.sqrt(np.arange(1, T + 1))))
        rhs = min(math.sqrt(a * math.log2(T / s)) + 2 * b * math.sqrt(s)
                  for s in range(1, T + 1))
        violations += lhs > rhs + 1e-9
    for _ in range(1000):  # max * sum vs (1 + sqrt(n))/2 * sum of squares
        n = int(rng.integers(2, 20))
        x = rng.uniform(0, 10, n)
        violations += (np.max(x) * np.sum(x)
                       > (0.5 + 0.5 * math.sqrt(n)) * np.sum(x**2) + 1e-9)
        x_eq = np.full(n, 1.0 / (math.sqrt(n) + 1.0))
        x_eq[0] = 1.0
        violations += abs(np.max(x_eq) * np.sum(x_eq)
                          - (0.5 + 0.5 * math.sqrt(n)) * np.sum(x_eq**2)) > 1e-9
    for _ in range(1000):  # duality gap is 1-Lipschitz in (x, y) under L1
        m, n = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        A = rng.uniform(-1, 1, (m, n))
        x, x2 = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(m))
        y, y2 = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        lhs = abs(duality_gap(A, x, y) - duality_gap(A, x2, y2))
        violations += lhs > np.abs(x - x2).sum() + np.abs(y - y2).sum() + 1e-12
    ok = violations == 0
    detail = "%d violations across 4000 randomized cases (want 0)" % violations
    assert _report(7, "inequality property suites", ok, detail), detail


def test_8_worst_case_safety():
    rng = np.random.default_rng(MASTER_SEED)
    mats = [rng.uniform(-1, 1, (8, 8)) for _ in range(32)]
    points = []
    for T in (2**12, 2**14, 2**16):
        regs = [pseudo_regret(
            run_selfplay(A, TsallisInf(8), FixedStrategy(np.full(8, 0.125)),
                         T, child_seed(MASTER_SEED + T, k)), A).reg_row
                for k, A in enumerate(mats)]
        points.append((T, float(np.mean(regs))))
    fit = fit_loglog_slope(points, 1)
    ok = fit is not None and fit.slope <= 0.65
    detail = "mean reg_row slope vs uniform opponent %.3f (want <= 0.65)" % (
        fit.slope if fit else float("nan"))
    assert _report(8, "worst-case safety", ok, detail), detail
