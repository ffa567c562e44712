"""Domain types for instances, rounds, budgets and trajectories.

A run consumes i.i.d. outcome matrices: one round's realized per-atom rewards
and per-resource consumption.  Budgets are shared across resources; the run
stops the first time any remaining budget goes strictly below zero, and the
stopping round's reward does not count (its consumption does - the round still
executed).  All stochastic components take an explicit seeded generator; one
master seed per run derives independent streams for the environment and the
policy, so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np


@dataclass(frozen=True)
class InstanceSpec:
    """Problem dimensions: n atoms, d resources, a common budget and horizon."""

    n: int
    d: int
    budget: float
    horizon: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1:
            raise ValueError("need n >= 1 atoms and d >= 1 resources")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")


@dataclass(frozen=True)
class OutcomeMatrix:
    """One round's realization: rewards (n,) and consumption (n, d), all in [0,1]."""

    rewards: np.ndarray
    consumption: np.ndarray

    def __post_init__(self) -> None:
        r = np.asarray(self.rewards, dtype=float)
        c = np.asarray(self.consumption, dtype=float)
        if r.ndim != 1 or c.ndim != 2 or c.shape[0] != r.size:
            raise ValueError("rewards must be (n,), consumption (n, d)")
        if r.size and (r.min() < 0.0 or r.max() > 1.0):
            raise ValueError("rewards must lie in [0, 1]")
        if c.size and (c.min() < 0.0 or c.max() > 1.0):
            raise ValueError("consumption must lie in [0, 1]")
        object.__setattr__(self, "rewards", r)
        object.__setattr__(self, "consumption", c)

    @property
    def n(self) -> int:
        return self.rewards.size

    @property
    def d(self) -> int:
        return self.consumption.shape[1]


@dataclass
class BudgetState:
    """Remaining per-resource budgets plus the stopping flag/round.

    ``rounds_settled`` counts settled rounds (1-indexed), so the state itself
    knows which round tripped the stop.
    """

    remaining: np.ndarray
    stopped: bool = False
    stop_round: int | None = None
    rounds_settled: int = 0

    @staticmethod
    def fresh(spec: InstanceSpec) -> "BudgetState":
        return BudgetState(remaining=np.full(spec.d, float(spec.budget)))


@dataclass(frozen=True)
class RoundRecord:
    """Semi-bandit feedback for one settled round.

    ``atoms`` are the chosen atoms; the observed arrays cover exactly those
    atoms (row k belongs to atoms[k]).  ``fractional`` optionally keeps the
    LP point the action was rounded from, for diagnostics.
    """

    t: int
    atoms: tuple[int, ...]
    rewards_observed: np.ndarray
    consumption_observed: np.ndarray
    reward: float
    consumption: np.ndarray
    fractional: np.ndarray | None = None


@dataclass
class Trajectory:
    records: list[RoundRecord] = field(default_factory=list)
    total_reward: float = 0.0
    stop_round: int | None = None

    def replay_total(self) -> float:
        """Recompute the counted reward from the records (stopping round excluded)."""
        cutoff = self.stop_round if self.stop_round is not None else np.inf
        return float(sum(r.reward for r in self.records if r.t < cutoff))


@runtime_checkable
class Environment(Protocol):
    """Supplier of i.i.d. outcome matrices.

    Implementations expose ``n`` and ``d``, draw one matrix per round from the
    given stream (arbitrary correlation inside a round is fine), and - for
    oracle tests - may expose exact means via ``exact_means()``.
    """

    n: int
    d: int

    def sample(self, t: int, rng: np.random.Generator) -> OutcomeMatrix: ...

    def exact_means(self) -> tuple[np.ndarray, np.ndarray]: ...


def settle_round(
    state: BudgetState, action: np.ndarray, outcome: OutcomeMatrix
) -> tuple[float, np.ndarray, BudgetState]:
    """Apply one round: additive reward/consumption over the chosen atoms,
    decrement budgets, and flag the stop when any remaining goes strictly
    below zero.  The caller excludes the stopping round's reward from totals.
    """
    mask = np.asarray(action)
    if mask.dtype != bool:
        raise ValueError("action must be a boolean mask")
    if mask.shape != (outcome.n,) or state.remaining.shape != (outcome.d,):
        raise ValueError("action/outcome/state dimensions disagree")
    if state.stopped:
        raise RuntimeError("cannot settle a round after the run stopped")
    reward = float(outcome.rewards[mask].sum())
    consumption = outcome.consumption[mask].sum(axis=0)
    state.remaining = state.remaining - consumption
    state.rounds_settled += 1
    if bool((state.remaining < 0.0).any()):
        state.stopped = True
        state.stop_round = state.rounds_settled
    return reward, consumption, state
