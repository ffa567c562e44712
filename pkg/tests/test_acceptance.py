"""Acceptance criteria, one test per criterion, tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.  The heavy grid (directional reproduction) runs once as a
module fixture; everything else is independent.
"""

import itertools
import math
import time

import numpy as np
import pytest

from semibwk import bench
from semibwk.algorithms import SemiBwkRrsPolicy, run_policy, theory_eps
from semibwk.confidence import theory_alpha
from semibwk.core import InstanceSpec
from semibwk.environments import make_pricing
from semibwk.matroid import MatroidConstraint
from semibwk.rounding import (
    estimate_tail,
    exhaustive_distribution,
    sample_actions,
    verify_negative_correlation,
    verify_recentering_transform,
)

MASTER_SEED = 0


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def random_fractional_instance(rng):
    n = int(rng.integers(2, 21))
    if rng.random() < 0.5:
        x = rng.random(n)
        cap = int(np.ceil(x.sum()))
        con = MatroidConstraint.uniform(n, cap)
    else:
        cut = int(rng.integers(1, n))
        caps = [
            min(int(rng.integers(1, 3)), cut),
            min(int(rng.integers(1, 3)), n - cut),
        ]
        con = MatroidConstraint.partition(n, [range(cut), range(cut, n)], caps)
        x = rng.random(n)
        for g, cap in zip(con.groups, con.caps):
            idx = list(g)
            s = x[idx].sum()
            if s > cap:
                x[idx] *= cap / s * rng.uniform(0.7, 1.0)
    return x, con


def test_rrs_marginal_exactness():
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED)
    n_samples = 100_000
    worst = -np.inf
    for _ in range(200):
        x, con = random_fractional_instance(rng)
        draws = sample_actions(x, con, rng, size=n_samples)
        tol = 4 * np.sqrt(np.clip(x * (1 - x), 0.0, None) / n_samples) + 1e-6
        err = np.abs(draws.mean(axis=0) - x)
        worst = max(worst, float((err - tol).max()))
        assert (err <= tol).all(), (x, err, tol)
    elapsed = time.perf_counter() - start
    report(
        "rrs-marginal-exactness",
        worst <= 0 and elapsed < 60,
        f"200 points, 1e5 samples each; worst margin {worst:.2e}; {elapsed:.1f}s",
    )


def test_rrs_negative_correlation():
    start = time.perf_counter()
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    checked = 0
    for n in range(1, 5):
        for x in itertools.product(grid, repeat=n):
            cap = math.ceil(sum(x))
            con = MatroidConstraint.uniform(n, cap)
            dist = exhaustive_distribution(np.array(x), con)
            assert verify_negative_correlation(dist), x
            checked += 1
    # sampled pairwise covariances at n = 20
    rng = np.random.default_rng(MASTER_SEED + 1)
    n, n_samples = 20, 100_000
    bound = 4 / math.sqrt(n_samples)
    con = MatroidConstraint.partition(n, [range(10), range(10, n)], [3, 3])
    x = rng.random(n) * 0.55
    draws = sample_actions(x, con, rng, size=n_samples).astype(float)
    cov = np.cov(draws.T)
    same = max(
        cov[a, b]
        for g in con.groups
        for a, b in itertools.combinations(g, 2)
    )
    cross = max(
        abs(cov[a, b]) for a in range(10) for b in range(10, n)
    )
    elapsed = time.perf_counter() - start
    ok = same <= bound and cross <= bound and elapsed < 60
    report(
        "rrs-negative-correlation",
        ok,
        f"{checked} exhaustive grids exact; sampled cov same-group {same:.2e} / cross {cross:.2e} <= {bound:.2e}; {elapsed:.1f}s",
    )


def test_recentering_transform_property():
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 2)
    for _ in range(100):
        n = int(rng.integers(2, 5))
        x = rng.random(n)
        con = MatroidConstraint.uniform(n, int(np.ceil(x.sum())))
        dist = exhaustive_distribution(x, con)
        lam = rng.random(n)
        assert verify_recentering_transform(dist, lam), (x, lam)
    elapsed = time.perf_counter() - start
    report("recentering-transform", elapsed < 60, f"100 (dist, lambda) pairs; {elapsed:.1f}s")


def test_tail_bound():
    start = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 3)
    details = []
    ok = True
    for n_vars in (20, 40):
        est = estimate_tail(100_000, n_vars, 0.25, rng)
        bound = 3 * math.exp(-2 * n_vars * 0.25**2)
        ok = ok and est.frequency <= bound
        details.append(f"n={n_vars}: freq {est.frequency:.5f} <= {bound:.5f}")
    elapsed = time.perf_counter() - start
    report("tail-bound", ok and elapsed < 60, "; ".join(details) + f"; {elapsed:.1f}s")


def test_lp_relaxation_chain():
    start = time.perf_counter()
    worst = np.inf
    for mu, cost, con, budget, horizon in bench.random_chain_instances(50, MASTER_SEED + 4):
        for eps in (0.0, 0.1, 0.3):
            rep = bench.verify_relaxation_chain(mu, cost, con, budget, horizon, eps, tol=1e-7)
            worst = min(worst, min(rep.gaps))
            assert rep.ok, rep
    elapsed = time.perf_counter() - start
    report(
        "lp-relaxation-chain",
        worst >= -1e-7 and elapsed < 60,
        f"50 instances x eps {{0, 0.1, 0.3}}; worst gap {worst:.2e}; {elapsed:.1f}s",
    )


def test_budget_safety():
    start = time.perf_counter()
    n, T = 6, 2000
    alpha = theory_alpha(n, n, T)
    threshold = 3 * (alpha * n + math.sqrt(alpha * n * T))
    B = 1.05 * threshold
    rep = theory_eps(alpha, n, B, T)
    assert rep.precondition_ok and rep.usable
    stops = 0
    for run in range(100):
        iseed = bench.derive_seed(MASTER_SEED, "safety-instance", run)
        env, con = bench.build_env("assortment", n, iseed, "uniform")
        inst = InstanceSpec(n=n, d=n, budget=B, horizon=T)
        traj = run_policy(
            lambda i, c, r: SemiBwkRrsPolicy(i, c, r, alpha=alpha, eps=rep.eps),
            env,
            inst,
            con,
            seed=bench.derive_seed(MASTER_SEED, "safety-run", run),
        )
        stops += traj.stop_round is not None
    elapsed = time.perf_counter() - start
    report(
        "budget-safety",
        stops <= 5 and elapsed < 300,
        f"{stops}/100 runs stopped before T (B={B:.0f}, alpha={alpha:.2f}, eps={rep.eps:.3f}); {elapsed:.1f}s",
    )


def test_sublinear_regret():
    start = time.perf_counter()
    horizons = (1000, 2000, 4000)
    rates = []
    for T in horizons:
        per_run = []
        for run in range(20):
            iseed = bench.derive_seed(MASTER_SEED, "regret-instance", run)
            env, con = make_pricing(6, seed=iseed, matroid="partition")
            inst = InstanceSpec(n=6, d=2, budget=T / 2, horizon=T)
            mu, cost = env.exact_means()
            opt_rate = bench.atoms_lp_value(mu, cost, con, T / 2, T)
            traj = run_policy(
                lambda i, c, r: SemiBwkRrsPolicy(i, c, r, alpha=5.0, eps=0.0),
                env,
                inst,
                con,
                seed=bench.derive_seed(MASTER_SEED, "regret-run", T, run),
            )
            per_run.append((T * opt_rate - traj.total_reward) / T)
        rates.append(float(np.mean(per_run)))
    elapsed = time.perf_counter() - start
    ok = rates[0] > rates[1] > rates[2] and elapsed < 600
    report(
        "sublinear-regret",
        ok,
        "per-round regret " + " > ".join(f"{r:.4f}" for r in rates) + f" over T={horizons}; {elapsed:.1f}s",
    )


@pytest.fixture(scope="module")
def directional_rows():
    cfg = bench.ExperimentConfig(
        envs=("assortment", "pricing"),
        matroids=("uniform", "partition"),
        n_list=(26,),
        t_list=(1000, 3000, 6000),
        b_rule="half-t",
        runs=20,
        policies=("semibwk-rrs", "pdbwk", "omm"),
        alpha=5.0,
        eps=0.0,
        seed=MASTER_SEED,
    )
    start = time.perf_counter()
    rows = bench.run_experiment(cfg)
    return rows, time.perf_counter() - start


def test_directional_reproduction(directional_rows):
    rows, elapsed = directional_rows
    means = {}
    for r in rows:
        means.setdefault((r.policy, r.T), []).append(r.total_reward)
    lines = []
    ok = True
    for T in (1000, 3000, 6000):
        ours = float(np.mean(means[("semibwk-rrs", T)]))
        best_baseline = max(
            float(np.mean(means[("pdbwk", T)])), float(np.mean(means[("omm", T)]))
        )
        ratio = ours / best_baseline
        ok = ok and ours >= 0.98 * best_baseline
        if T == 6000:
            ok = ok and ours > best_baseline
        lines.append(f"T={T}: {ours:.1f} vs {best_baseline:.1f} (x{ratio:.3f})")
    # per-cell ratios, for the record
    cell = {}
    for r in rows:
        cell.setdefault((r.env, r.matroid, r.T), {}).setdefault(r.policy, []).append(
            r.total_reward
        )
    for key in sorted(cell):
        c = cell[key]
        rr = np.mean(c["semibwk-rrs"]) / max(np.mean(c["pdbwk"]), np.mean(c["omm"]))
        lines.append(f"cell {key}: x{rr:.3f}")
    ok = ok and elapsed < 3600
    report("directional-reproduction", ok, "; ".join(lines) + f"; {elapsed:.0f}s")


def test_timing_shape():
    start = time.perf_counter()
    _, summaries = bench.timing_experiment(
        policies=("semibwk-rrs", "pdbwk"),
        n_list=(6, 26, 52),
        windows=50,
        window_size=10,
        seed=MASTER_SEED,
    )
    med = {(s.policy, s.n): s.median_us for s in summaries}
    growth = med[("semibwk-rrs", 52)] / med[("semibwk-rrs", 6)]
    cubic = (52 / 6) ** 3
    pd_increasing = med[("pdbwk", 6)] < med[("pdbwk", 26)] < med[("pdbwk", 52)]
    elapsed = time.perf_counter() - start
    ok = growth <= cubic and pd_increasing and elapsed < 600
    report(
        "timing-shape",
        ok,
        f"semibwk median us {med[('semibwk-rrs', 6)]:.0f}/{med[('semibwk-rrs', 26)]:.0f}/{med[('semibwk-rrs', 52)]:.0f} "
        f"(growth x{growth:.1f} <= cubic x{cubic:.0f}); "
        f"pdbwk {med[('pdbwk', 6)]:.0f}/{med[('pdbwk', 26)]:.0f}/{med[('pdbwk', 52)]:.0f} increasing={pd_increasing}; {elapsed:.1f}s",
    )
