"""Exit criteria. Each test records one PASS/FAIL line shown at the end of the run."""
import math
import time

import pytest
from scipy.stats import spearmanr

from conftest import ACCEPTANCE_LINES
from matchsim.report import format_csv
from matchsim.sweep import DEFAULT_LADDER, SweepConfig, aggregate, run_sweep, stable_hash
from matchsim.prefgen import generate_market
from matchsim.verify import (
    check_proposer_optimality,
    check_proposer_truthfulness,
    check_stability,
    check_truncation_sufficiency,
    small_markets,
)

HEADLINE = SweepConfig(n_values=(10, 100), k_values=(20,), rho_values=(3.0,), trials=200, master_seed=505)


def record(name, ok, detail):
    ACCEPTANCE_LINES.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}")
    assert ok, detail


def timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


def means(rows):
    return {(a.n, a.k, a.rho): a for a in aggregate(rows)}


def separation(a, b):
    """Difference of means in units of the combined standard error."""
    se = math.hypot(a.stderr, b.stderr)
    return (a.mean_ratio - b.mean_ratio) / se if se else math.inf


@pytest.fixture(scope="module")
def headline_run():
    return timed(run_sweep, HEADLINE)


def test_1_stability_suite():
    def run():
        failures, cases = 0, 0
        for k in (10, 20):
            for rho in (0.05, 1.0, 3.0):
                markets = (
                    generate_market(2 + stable_hash(k, i) % 49, k, rho, stable_hash(101, k, i))
                    for i in range(1000)
                )
                result = check_stability(markets)
                failures += len(result.failures)
                cases += result.cases
        return failures, cases

    (failures, cases), elapsed = timed(run)
    record("1 stability", failures == 0 and cases == 6000 and elapsed < 60,
           f"{failures} unstable outputs in {cases} markets (n <= 50), {elapsed:.1f}s (limit 60s)")


def test_2_proposer_optimality():
    result, elapsed = timed(check_proposer_optimality, small_markets(500, 5, 5, seed=202))
    record("2 proposer optimality", result.ok and elapsed < 60,
           f"{len(result.failures)} failures in {result.cases} markets (n <= 5), {elapsed:.1f}s (limit 60s)")


def test_3_proposer_truthfulness():
    result, elapsed = timed(check_proposer_truthfulness, small_markets(300, 4, 3, seed=303))
    record("3 proposer truthfulness", result.ok and elapsed < 300,
           f"{len(result.failures)} profitable proposer misreports in {result.cases} markets, {elapsed:.1f}s (limit 300s)")


def test_4_truncation_sufficiency():
    result, elapsed = timed(check_truncation_sufficiency, small_markets(1000, 4, 3, seed=404))
    detail = f"{len(result.failures)} discrepancies in {result.cases} markets (n <= 4, k <= 3), {elapsed:.1f}s (limit 300s)"
    if not result.ok:
        detail += "; smallest counterexample:\n" + result.smallest_failure().to_text()
    record("4 truncation sufficiency", result.ok and elapsed < 300, detail)


def test_5_headline_drop(headline_run):
    rows, elapsed = headline_run
    agg = means(rows)
    small, large = agg[(10, 20, 3.0)].mean_ratio, agg[(100, 20, 3.0)].mean_ratio
    factor = small / large if large else math.inf
    record("5 headline drop", small >= 20 * large and elapsed < 1800,
           f"D(10)/10 = {small:.4f}, D(100)/100 = {large:.4f}, drop x{factor:.1f} (need >= 20), {elapsed:.1f}s")


def test_6_monotone_decline(fig2_rows):
    rows, elapsed = fig2_rows
    agg = aggregate(rows)
    bad = []
    lines = []
    for k in (10, 15, 20, 40):
        for rho in (0.05, 1.0, 3.0):
            curve = [a for a in agg if a.k == k and a.rho == rho]
            assert [a.n for a in curve] == list(DEFAULT_LADDER)
            corr = spearmanr([a.n for a in curve], [a.mean_ratio for a in curve])[0]
            lines.append(f"k={k} rho={rho}: {corr:.3f}")
            if not corr <= -0.8:
                bad.append(f"k={k} rho={rho}")
    record("6 monotone decline", not bad and elapsed < 3600,
           f"Spearman(n, mean ratio) <= -0.8 failed for {bad or 'none'}; " + ", ".join(lines) + f"; {elapsed:.0f}s")


def test_7_k_effect():
    config = SweepConfig((50,), (10, 15, 20, 40), (1.0,), 200, 707)
    rows, elapsed = timed(run_sweep, config)
    agg = means(rows)
    curve = [agg[(50, k, 1.0)] for k in (10, 15, 20, 40)]
    ordered = all(a.mean_ratio <= b.mean_ratio for a, b in zip(curve, curve[1:]))
    sep = separation(curve[-1], curve[0])
    record("7 k-effect", ordered and sep >= 3 and elapsed < 1200,
           "means " + ", ".join(f"k={a.k}: {a.mean_ratio:.4f}" for a in curve)
           + f"; k=40 vs k=10 separated by {sep:.1f} SE (need 3), {elapsed:.1f}s")


def test_8_rho_effect():
    config = SweepConfig((50,), (20,), (0.05, 3.0), 200, 808)
    rows, elapsed = timed(run_sweep, config)
    agg = means(rows)
    low, high = agg[(50, 20, 0.05)], agg[(50, 20, 3.0)]
    sep = separation(low, high)
    record("8 rho-effect", high.mean_ratio < low.mean_ratio and sep >= 2,
           f"rho=0.05: {low.mean_ratio:.4f}, rho=3.0: {high.mean_ratio:.4f}, gap {sep:.1f} SE (need 2), {elapsed:.1f}s")


def test_9_large_n_tail():
    config = SweepConfig((100, 1000), (20,), (1.0,), 20, 909)
    rows, elapsed = timed(run_sweep, config)
    agg = means(rows)
    mid, tail = agg[(100, 20, 1.0)].mean_ratio, agg[(1000, 20, 1.0)].mean_ratio
    record("9 large-n tail", tail < mid and tail < 0.01 and elapsed < 7200,
           f"D(100)/100 = {mid:.4f}, D(1000)/1000 = {tail:.5f} (need < both {mid:.4f} and 0.01), {elapsed:.1f}s")


def test_10_determinism(headline_run):
    rows, _ = headline_run
    reference = format_csv(rows).encode()
    again = format_csv(run_sweep(HEADLINE)).encode()
    parallel = format_csv(run_sweep(SweepConfig(**{**HEADLINE.__dict__, "workers": 8}))).encode()
    record("10 determinism", reference == again == parallel,
           f"rerun identical: {reference == again}, workers=1 vs 8 identical: {reference == parallel}")
