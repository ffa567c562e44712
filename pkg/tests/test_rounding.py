import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from semibwk.matroid import MatroidConstraint
from semibwk.rounding import (
    dependent_round,
    estimate_tail,
    exhaustive_distribution,
    sample_actions,
    verify_negative_correlation,
    verify_recentering_transform,
)


def independent_dist(ps):
    out = {}
    for bits in itertools.product([0, 1], repeat=len(ps)):
        prob = Fraction(1)
        for b, p in zip(bits, ps):
            prob *= p if b else (1 - p)
        out[bits] = prob
    return out


def test_integral_input_returned_unchanged():
    m = MatroidConstraint.uniform(4, 2)
    rng = np.random.default_rng(0)
    x = np.array([1.0, 0.0, 1.0, 0.0])
    for _ in range(5):
        assert (dependent_round(x, m, rng) == x.astype(bool)).all()


def test_cap_one_half_half():
    m = MatroidConstraint.uniform(2, 1)
    dist = exhaustive_distribution(np.array([0.5, 0.5]), m)
    assert dist == {(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)}


def test_cap_two_branching_tree_exact():
    m = MatroidConstraint.uniform(3, 2)
    x = np.array([0.6, 0.4, 0.5])
    dist = exhaustive_distribution(x, m)
    assert sum(dist.values()) == 1
    for a in range(3):
        marginal = sum(p for o, p in dist.items() if o[a])
        assert marginal == Fraction(x[a])
    assert max(sum(o) for o in dist) <= 2
    # pairwise covariances from the exact distribution are nonpositive
    for a, b in itertools.combinations(range(3), 2):
        e_ab = sum(p for o, p in dist.items() if o[a] and o[b])
        assert e_ab <= Fraction(x[a]) * Fraction(x[b])


def test_negative_correlation_verifier():
    ps = [Fraction(1, 3), Fraction(2, 3)]
    assert verify_negative_correlation(independent_dist(ps))
    m = MatroidConstraint.uniform(2, 1)
    dist = exhaustive_distribution(np.array([0.5, 0.5]), m)
    assert verify_negative_correlation(dist)
    assert sum(p for o, p in dist.items() if o == (1, 1)) == 0
    both_or_neither = {(1, 1): Fraction(1, 2), (0, 0): Fraction(1, 2)}
    assert not verify_negative_correlation(both_or_neither)


def test_recentering_transform():
    m = MatroidConstraint.uniform(2, 1)
    dist = exhaustive_distribution(np.array([0.5, 0.5]), m)
    assert verify_recentering_transform(dist, [0.0, 0.0])
    assert verify_recentering_transform(dist, [1.0, 1.0])
    ind = independent_dist([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    assert verify_recentering_transform(ind, [0.3, 0.9, 0.5])


def test_recentering_transform_catches_positive_correlation():
    both_or_neither = {(1, 1): Fraction(1, 2), (0, 0): Fraction(1, 2)}
    assert not verify_recentering_transform(both_or_neither, [1.0, 1.0])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_exhaustive_grid_negative_correlation(n):
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    for x in itertools.product(grid, repeat=n):
        cap = math.ceil(sum(x))
        m = MatroidConstraint.uniform(n, cap)
        dist = exhaustive_distribution(np.array(x), m)
        assert sum(dist.values()) == 1
        for a in range(n):
            assert sum(p for o, p in dist.items() if o[a]) == Fraction(x[a])
        assert verify_negative_correlation(dist)


def test_sampling_matches_exact_distribution():
    m = MatroidConstraint.uniform(3, 2)
    x = np.array([0.6, 0.4, 0.5])
    dist = exhaustive_distribution(x, m)
    draws = sample_actions(x, m, np.random.default_rng(11), size=200_000)
    for outcome, p in dist.items():
        freq = (draws == np.array(outcome, dtype=bool)).all(axis=1).mean()
        assert freq == pytest.approx(float(p), abs=0.006)


def test_marginals_and_feasibility_random_inputs():
    rng = np.random.default_rng(5)
    for trial in range(12):
        n = int(rng.integers(2, 13))
        if rng.random() < 0.5:
            x = rng.random(n) * 0.95
            m = MatroidConstraint.uniform(n, max(int(np.ceil(x.sum())), 1))
        else:
            cut = int(rng.integers(1, n))
            m = MatroidConstraint.partition(n, [range(cut), range(cut, n)], [1, 1])
            x = rng.random(n)
            for g, cap in zip(m.groups, m.caps):
                s = x[list(g)].sum()
                if s > cap:
                    x[list(g)] *= 0.9 * cap / s
        nsamp = 40_000
        draws = sample_actions(x, m, rng, size=nsamp)
        for g, cap in zip(m.groups, m.caps):
            gsum = draws[:, list(g)].sum(axis=1)
            s = x[list(g)].sum()
            assert gsum.min() >= math.floor(s) - 1e-9  # group sums concentrate
            assert gsum.max() <= math.ceil(s) + 1e-9
            assert gsum.max() <= cap
        err = np.abs(draws.mean(axis=0) - np.clip(x, 0, 1))
        tol = 4 * np.sqrt(np.clip(x * (1 - x), 1e-12, None) / nsamp) + 1e-6
        assert (err <= tol + 0.005).all()


def test_group_sum_hits_floor_or_ceil():
    rng = np.random.default_rng(9)
    n = 6
    x = rng.random(n) * 0.9
    m = MatroidConstraint.uniform(n, int(np.ceil(x.sum())))
    draws = sample_actions(x, m, rng, size=5000)
    s = x.sum()
    sizes = set(draws.sum(axis=1).tolist())
    assert sizes <= {math.floor(s), math.ceil(s)}


def test_cross_group_independence():
    m = MatroidConstraint.partition(4, [[0, 1], [2, 3]], [1, 1])
    x = np.array([0.5, 0.5, 0.5, 0.5])
    dist = exhaustive_distribution(x, m)
    # within-group: exclusive; across groups: product structure
    for o, p in dist.items():
        assert o[0] + o[1] == 1 and o[2] + o[3] == 1
        assert p == Fraction(1, 4)
    draws = sample_actions(x, m, np.random.default_rng(3), size=50_000)
    cov = np.cov(draws[:, 0].astype(float), draws[:, 2].astype(float))[0, 1]
    assert abs(cov) <= 4 / math.sqrt(50_000)


def test_interleaved_partition_groups():
    # group atoms need not be contiguous; marginals and caps must still hold
    m = MatroidConstraint.partition(4, [[0, 2], [1, 3]], [1, 1])
    x = np.array([0.3, 0.6, 0.5, 0.2])
    dist = exhaustive_distribution(x, m)
    assert sum(dist.values()) == 1
    for a in range(4):
        assert sum(p for o, p in dist.items() if o[a]) == Fraction(x[a])
    for o in dist:
        assert o[0] + o[2] <= 1 and o[1] + o[3] <= 1
    draws = sample_actions(x, m, np.random.default_rng(21), size=30_000)
    assert np.abs(draws.mean(axis=0) - x).max() < 0.02
    assert (draws[:, [0, 2]].sum(axis=1) <= 1).all()
    assert (draws[:, [1, 3]].sum(axis=1) <= 1).all()


def test_infeasible_point_rejected():
    m = MatroidConstraint.uniform(3, 1)
    with pytest.raises(ValueError):
        dependent_round(np.array([0.9, 0.9, 0.9]), m, np.random.default_rng(0))


def test_tail_estimate():
    rng = np.random.default_rng(2)
    est = estimate_tail(4000, 20, 0.5, rng)
    assert est.frequency == 0.0  # mean can never exceed 1
    est2 = estimate_tail(4000, 20, 0.25, rng)
    assert est2.frequency <= 3 * math.exp(-2 * 20 * 0.25**2)
    assert 0.0 <= est2.ci_low <= est2.ci_high <= 1.0


def test_determinism_same_seed_same_draws():
    m = MatroidConstraint.partition(6, [[0, 1, 2], [3, 4, 5]], [2, 1])
    x = np.array([0.3, 0.7, 0.5, 0.2, 0.6, 0.1])
    a = sample_actions(x, m, np.random.default_rng(42), size=100)
    b = sample_actions(x, m, np.random.default_rng(42), size=100)
    assert (a == b).all()
