import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semibwk.confidence import ConfidenceState, rad, theory_alpha


def test_rad_zero_mean_collapses_to_alpha_over_m():
    assert rad(5.0, 0.0, 10) == pytest.approx(0.5)


def test_rad_direct_values():
    # sqrt(5*0.2/100) + 5/100
    assert rad(5.0, 0.2, 100) == pytest.approx(0.15)
    # monotone nonincreasing in m at fixed x: frozen from direct evaluation
    assert rad(5.0, 0.2, 400) == pytest.approx(0.0625)
    assert rad(5.0, 0.2, 400) < rad(5.0, 0.2, 100)


def test_rad_contract_violations():
    with pytest.raises(ValueError):
        rad(5.0, 0.2, 0)
    with pytest.raises(ValueError):
        rad(0.0, 0.2, 10)
    with pytest.raises(ValueError):
        rad(5.0, -0.1, 10)


@given(
    st.floats(0.1, 50.0),
    st.floats(0.0, 1.0),
    st.integers(1, 10_000),
)
@settings(max_examples=200, deadline=None)
def test_rad_monotonicity(alpha, x, m):
    base = rad(alpha, x, m)
    assert rad(alpha + 1.0, x, m) >= base
    assert rad(alpha, min(x + 0.1, 1.0) if x < 1 else x, m) >= base or x >= 1
    assert rad(alpha, x, m + 1) <= base


def test_bounds_unpulled_atom_full_range():
    state = ConfidenceState(n=2, d=2, alpha=5.0)
    b = state.bounds()
    assert b.reward_upper.tolist() == [1.0, 1.0]
    assert b.reward_lower.tolist() == [0.0, 0.0]
    assert b.cost_upper.tolist() == [[1.0, 1.0], [1.0, 1.0]]
    assert b.cost_lower.tolist() == [[0.0, 0.0], [0.0, 0.0]]


def test_bounds_worked_example():
    # 100 pulls summing to 20: mean 0.2, radius 0.15 -> [0.05, 0.35]
    state = ConfidenceState(n=1, d=1, alpha=5.0)
    for _ in range(100):
        state.update([0], [0.2], [[0.2]])
    b = state.bounds()
    assert b.reward_upper[0] == pytest.approx(0.35)
    assert b.reward_lower[0] == pytest.approx(0.05)


def test_bounds_projection_clamps():
    state = ConfidenceState(n=1, d=1, alpha=5.0)
    for _ in range(4):
        state.update([0], [1.0], [[0.0]])
    b = state.bounds()
    assert b.reward_upper[0] == 1.0
    assert b.cost_lower[0, 0] == 0.0


def test_update_contracts():
    state = ConfidenceState(n=3, d=1, alpha=5.0)
    state.update([], [], np.zeros((0, 1)))
    assert state.pulls.sum() == 0
    state.update([1], [0.7], [[0.1]])
    assert state.pulls.tolist() == [0, 1, 0]
    assert state.reward_sum[1] == pytest.approx(0.7)
    with pytest.raises(ValueError):
        state.update([3], [0.1], [[0.1]])
    with pytest.raises(ValueError):
        state.update([1, 1], [0.1, 0.2], [[0.1], [0.2]])


def test_sequential_updates_match_batch_replay():
    rng = np.random.default_rng(8)
    n, d = 5, 2
    seq = ConfidenceState(n, d, alpha=3.0)
    observations = []
    for _ in range(40):
        k = int(rng.integers(0, 4))
        atoms = rng.choice(n, size=k, replace=False)
        r = rng.random(k)
        c = rng.random((k, d))
        observations.append((atoms, r, c))
        seq.update(atoms, r, c)
    replay = ConfidenceState(n, d, alpha=3.0)
    pulls = np.zeros(n, dtype=int)
    rsum = np.zeros(n)
    csum = np.zeros((n, d))
    for atoms, r, c in observations:
        replay.update(atoms, r, c)
        for i, a in enumerate(atoms):
            pulls[a] += 1
            rsum[a] += r[i]
            csum[a] += c[i]
    assert (seq.pulls == pulls).all()
    np.testing.assert_allclose(seq.reward_sum, rsum)
    np.testing.assert_allclose(seq.consumption_sum, csum)
    np.testing.assert_allclose(seq.reward_sum, replay.reward_sum)


@given(st.integers(0, 100_000))
@settings(max_examples=80, deadline=None)
def test_bounds_ordering_invariants(seed):
    rng = np.random.default_rng(seed)
    n, d = 4, 2
    state = ConfidenceState(n, d, alpha=float(rng.uniform(0.5, 20)))
    for _ in range(int(rng.integers(0, 30))):
        k = int(rng.integers(0, n + 1))
        atoms = rng.choice(n, size=k, replace=False)
        state.update(atoms, rng.random(k), rng.random((k, d)))
    b = state.bounds()
    assert (0 <= b.reward_lower).all() and (b.reward_lower <= b.reward_upper).all()
    assert (b.reward_upper <= 1).all()
    assert (0 <= b.cost_lower).all() and (b.cost_lower <= b.cost_upper).all()
    assert (b.cost_upper <= 1).all()
    pulled = state.pulls > 0
    mean = np.where(pulled, state.reward_sum / np.maximum(state.pulls, 1), 0.0)
    clamped = np.clip(mean, 0, 1)
    assert (b.reward_lower[pulled] <= clamped[pulled] + 1e-12).all()
    assert (clamped[pulled] <= b.reward_upper[pulled] + 1e-12).all()


def test_statistical_coverage():
    # Bernoulli(p) pulls with the theory alpha: the mean lands inside the
    # interval in at least 99% of 10000 trials
    n_trials = 10_000
    alpha = theory_alpha(1, 1, 1000)
    rng = np.random.default_rng(123)
    for p in (0.05, 0.5, 0.95):
        for m in (5, 50, 500):
            hits = rng.binomial(m, p, size=n_trials)
            mean = hits / m
            radius = np.sqrt(alpha * mean / m) + alpha / m
            upper = np.minimum(mean + radius, 1.0)
            lower = np.maximum(mean - radius, 0.0)
            covered = ((lower <= p) & (p <= upper)).mean()
            assert covered >= 0.99, (p, m, covered)
