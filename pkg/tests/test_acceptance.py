"""End-to-end acceptance gate.

Each test covers one published acceptance criterion and prints a single
PASS/FAIL line; run with `pytest -v -s tests/test_acceptance.py` to see the
per-criterion report.
"""

import time
from itertools import product

import numpy as np
import pytest

from schedopt import (BetaTable, Schedule, brute_force_h2, g_iteration,
                      gamma_block_oracle, gamma_h, gamma_schedule, improve_step,
                      j2, monte_carlo_j2, optimal_schedule, residual_lemma3,
                      scalar_model, solve_dare, solve_p_gamma)

from conftest import (GOLDEN, TABLE_BETA, TABLE_GAMMA, TABLE_J2, random_model)

GAMMA_TOL = 1e-6


def _report(name: str, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  ({detail})" if detail else ""
    print(f"[{tag}] {name}{suffix}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def corpus():
    """>= 20 random models (n <= 4, mixed stable/unstable) plus the bench
    and scalar models."""
    rng = np.random.default_rng(2024)
    return [random_model(rng, n=int(rng.integers(1, 5)), unstable=bool(k % 2))
            for k in range(20)]


def test_criterion_01_beta_row(bench_model, bench_ric):
    start = time.perf_counter()
    table = BetaTable(bench_model, bench_ric)
    devs = [abs(table.value(h) - TABLE_BETA[h - 1]) / TABLE_BETA[h - 1]
            for h in range(2, 7)]
    elapsed = time.perf_counter() - start
    ok = max(devs) <= 0.01 and elapsed < 1.0
    _report("criterion 1: beta table row within 1%", ok,
            f"max rel dev {max(devs):.2e}, {elapsed:.3f}s")


def test_criterion_02_j2_row(bench_model, bench_ric):
    start = time.perf_counter()
    table = BetaTable(bench_model, bench_ric)
    devs = [abs(bench_ric.tr_pw + table.value(h) / h - TABLE_J2[h - 1])
            / TABLE_J2[h - 1] for h in range(1, 7)]
    elapsed = time.perf_counter() - start
    ok = max(devs) <= 0.01 and elapsed < 1.0
    _report("criterion 2: average-cost table row within 1%", ok,
            f"max rel dev {max(devs):.2e}, {elapsed:.3f}s")


def test_criterion_03_gamma_row(bench_model):
    start = time.perf_counter()
    devs = [abs(gamma_h(bench_model, h, tol=GAMMA_TOL) - TABLE_GAMMA[h - 1])
            / TABLE_GAMMA[h - 1] for h in range(1, 7)]
    elapsed = time.perf_counter() - start
    ok = max(devs) <= 0.01 and elapsed < 30.0
    _report("criterion 3: attenuation table row within 1%", ok,
            f"max rel dev {max(devs):.2e}, {elapsed:.2f}s")


def test_criterion_04_brute_force_optimality(bench_model, bench_ric):
    start = time.perf_counter()
    table = BetaTable(bench_model, bench_ric)
    ok = True
    for h in range(1, 9):
        for m in range(1, h + 1):
            _, argmins = brute_force_h2(bench_model, bench_ric, h, m,
                                        table=table)
            ok &= optimal_schedule(h, m) in argmins
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 10.0
    _report("criterion 4: brute force confirms floor/ceil optima (h <= 8)",
            ok, f"{elapsed:.2f}s")


def test_criterion_05_convexity_suite(bench_model, bench_ric, scalar,
                                      scalar_ric, corpus):
    models = [(bench_model, bench_ric), (scalar, scalar_ric)]
    models += [(m, solve_dare(m)) for m in corpus]
    worst = 0.0
    for model, ric in models:
        vals = BetaTable(model, ric).values(51)
        scale = 1.0 + max(abs(v) for v in vals)
        for i in range(1, 50):
            worst = max(worst,
                        (2 * vals[i] - vals[i + 1] - vals[i - 1]) / scale)
    ok = worst <= 1e-9
    _report("criterion 5: per-interval penalty convex on the corpus", ok,
            f"worst normalized violation {worst:.2e}")


def test_criterion_06_rebalancing_never_worse(bench_model, bench_ric):
    table = BetaTable(bench_model, bench_ric)
    rng = np.random.default_rng(99)
    worst = 0.0
    done = 0
    while done < 1000:
        m = int(rng.integers(2, 6))
        s = Schedule(rng.integers(1, 10, size=m))
        tau = s.intervals
        pairs = [(i, l) for i in range(m) for l in range(m) if tau[i] > tau[l]]
        if not pairs:
            continue
        i, l = pairs[rng.integers(len(pairs))]
        p = int(rng.integers(0, (tau[i] - tau[l]) // 2 + 1))
        before = j2(bench_model, bench_ric, s, table=table)
        after = j2(bench_model, bench_ric, improve_step(s, i, l, p),
                   table=table)
        worst = max(worst, (after - before) / abs(before))
        done += 1
    ok = worst <= 1e-10
    _report("criterion 6: 1000 rebalancing steps never increase the cost",
            ok, f"worst rel increase {worst:.2e}")


def test_criterion_07_max_interval_and_dual_oracle(bench_model, scalar, corpus):
    ok = True
    details = []

    # gamma_schedule equals gamma of the max interval for every composition
    cache = {h: gamma_h(bench_model, h, tol=GAMMA_TOL) for h in range(1, 7)}
    for h in range(1, 7):
        for m in range(1, h + 1):
            for tau in product(range(1, h + 1), repeat=m):
                if sum(tau) != h:
                    continue
                s = Schedule(tau)
                g = gamma_schedule(bench_model, s, tol=GAMMA_TOL)
                ok &= g == cache[s.max_interval]

    # monotonicity in h across the corpus
    for model in [bench_model, scalar] + corpus:
        gs = [gamma_h(model, h, tol=GAMMA_TOL) for h in range(1, 7)]
        for a, b in zip(gs, gs[1:]):
            ok &= b >= a - 2 * GAMMA_TOL * max(a, b)

    # dual oracle agreement on the named models
    for model in (bench_model, scalar):
        for h in (1, 2, 3):
            gi = gamma_h(model, h, tol=GAMMA_TOL)
            gb = gamma_block_oracle(model, h, tol=GAMMA_TOL)
            dev = abs(gi - gb) / max(gi, gb)
            details.append(f"h={h}: {dev:.1e}")
            ok &= abs(gi - gb) <= 2 * GAMMA_TOL * max(gi, gb)

    _report("criterion 7: max-interval rule, monotonicity, dual oracle", ok,
            "dual-oracle rel devs " + ", ".join(details[:3]))


def test_criterion_08_finite_horizon_identity():
    rng = np.random.default_rng(123)
    worst = 0.0
    checked = 0
    while checked < 100:
        model = random_model(rng, n=int(rng.integers(1, 4)))
        gamma = 1.5 * gamma_h(model, 1, tol=GAMMA_TOL)
        tau = int(rng.integers(1, 9))
        result = solve_p_gamma(model, gamma)
        if not result.feasible:
            continue
        res = residual_lemma3(
            model, gamma, tau, result.p_bar, rng.standard_normal(model.n),
            rng.standard_normal((tau, model.m)),
            rng.standard_normal((tau, model.n)))
        worst = max(worst, res)
        checked += 1
    ok = worst < 1e-8
    _report("criterion 8: completion-of-squares identity (100 cases)", ok,
            f"worst normalized residual {worst:.2e}")


def test_criterion_09_lower_bounding_iteration(bench_model, scalar):
    ok = True
    details = []
    for model, gamma in ((bench_model, 5.0), (scalar, 10.0)):
        iterates = g_iteration(model, gamma, alpha=1e-6)
        p_bar = solve_p_gamma(model, gamma).p_bar
        final_gap = float(np.max(np.abs(iterates[-1].G - p_bar)))
        ok &= final_gap < 1e-6
        for a, b in zip(iterates, iterates[1:]):
            gap = np.min(np.linalg.eigvalsh(b.G - a.G))
            ok &= gap > -1e-8 * (1.0 + np.max(np.abs(b.G)))
        details.append(f"gamma={gamma}: gap {final_gap:.1e} "
                       f"after {iterates[-1].q} steps")
    _report("criterion 9: monotone iteration reaches the fixed point", ok,
            "; ".join(details))


def test_criterion_10_monte_carlo(bench_model, bench_ric):
    start = time.perf_counter()
    ok = True
    details = []
    for tau in ([1], [2], [3, 3], [2, 4]):
        s = Schedule(tau)
        report = monte_carlo_j2(bench_model, bench_ric, s,
                                horizon=10_000 * s.period, trials=50, seed=0)
        analytic = j2(bench_model, bench_ric, s)
        dev = abs(report.empirical_mean - analytic)
        ok &= dev <= 3 * report.std_error
        details.append(f"{tau}: {dev / report.std_error:.2f} sigma")
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 60.0
    _report("criterion 10: Monte Carlo within 3 standard errors", ok,
            ", ".join(details) + f", {elapsed:.1f}s")


def test_criterion_11_scalar_closed_forms():
    model = scalar_model()
    ric = solve_dare(model)
    table = BetaTable(model, ric)
    ok = abs(ric.P[0, 0] - GOLDEN) <= 1e-10
    ok &= abs(ric.Z[0, 0] - 1.0) <= 1e-10
    beta_dev = max(abs(table.value(p) - p * (p - 1) / 2)
                   for p in range(1, 11))
    ok &= beta_dev <= 1e-9
    _report("criterion 11: scalar closed forms", ok,
            f"P dev {abs(ric.P[0, 0] - GOLDEN):.1e}, beta dev {beta_dev:.1e}")
