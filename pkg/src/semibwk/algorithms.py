"""Online policies behind one interface: SemiBwK-RRS and the pdBwK / OMM baselines.

SemiBwK-RRS repeats, every round: refresh the confidence bounds, solve the
optimistic LP over the matroid polytope with the margin-scaled budget, and turn
the fractional solution into an action with the negatively correlated rounding.
pdBwK enumerates the feasible subsets as explicit arms and plays bang-per-buck
against multiplicative resource weights; OMM greedily maximizes reward UCBs and
ignores budgets (the run loop still stops it when a budget crosses zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .confidence import ConfidenceState
from .core import BudgetState, Environment, InstanceSpec, RoundRecord, Trajectory, settle_round
from .lp import build_round_lp, solve
from .matroid import MatroidConstraint
from .rounding import dependent_round


class Policy(Protocol):
    def select(self, t: int) -> np.ndarray: ...

    def observe(self, t: int, atoms, rewards, consumption) -> None: ...


PolicyFactory = Callable[[InstanceSpec, MatroidConstraint, np.random.Generator], Policy]


@dataclass(frozen=True)
class EpsReport:
    """Recommended LP budget margin plus the budget precondition it assumes."""

    eps: float
    threshold: float  # budgets must exceed 3*(alpha*n + sqrt(alpha*n*T))
    precondition_ok: bool
    usable: bool  # eps < 1


def theory_eps(alpha: float, n: int, budget: float, horizon: int) -> EpsReport:
    """Margin sqrt(alpha*n/B) + alpha*n/B + sqrt(alpha*n*T)/B with its
    precondition B > 3*(alpha*n + sqrt(alpha*n*T))."""
    if budget <= 0:
        raise ValueError("the margin formula needs a positive budget")
    an = alpha * n
    eps = math.sqrt(an / budget) + an / budget + math.sqrt(an * horizon) / budget
    threshold = 3.0 * (an + math.sqrt(an * horizon))
    return EpsReport(
        eps=eps,
        threshold=threshold,
        precondition_ok=budget > threshold,
        usable=eps < 1.0,
    )


class SemiBwkRrsPolicy:
    """Optimistic LP + negatively correlated rounding."""

    name = "semibwk-rrs"

    def __init__(
        self,
        instance: InstanceSpec,
        constraint: MatroidConstraint,
        rng: np.random.Generator,
        alpha: float = 5.0,
        eps: float | str = 0.0,
    ):
        if eps == "auto":
            eps = theory_eps(alpha, instance.n, instance.budget, instance.horizon).eps
        if not 0.0 <= float(eps) < 1.0:
            raise ValueError(f"eps must lie in [0, 1), got {eps}")
        self.instance = instance
        self.constraint = constraint
        self.rng = rng
        self.eps = float(eps)
        self.state = ConfidenceState(instance.n, instance.d, alpha)
        self.last_fractional: np.ndarray | None = None

    def select(self, t: int) -> np.ndarray:
        b = self.state.bounds()
        lp = build_round_lp(
            b.reward_upper,
            b.cost_lower,
            self.constraint,
            self.instance.budget,
            self.instance.horizon,
            self.eps,
        )
        x, _ = solve(lp)
        self.last_fractional = x
        return dependent_round(x, self.constraint, self.rng)

    def observe(self, t: int, atoms, rewards, consumption) -> None:
        self.state.update(atoms, rewards, consumption)


class PrimalDualBwkPolicy:
    """Bang-per-buck over enumerated arms with multiplicative resource weights.

    Arms are all feasible subsets (empty set included).  Each arm's reward UCB
    and per-resource consumption LCB come from the shared per-atom confidence
    state, summed over the arm's atoms.  The score divides the reward UCB by
    the weight-averaged consumption LCB plus the per-round time cost B/T;
    weights then grow multiplicatively in the realized consumption with
    learning rate sqrt(ln d / B).
    """

    name = "pdbwk"

    def __init__(
        self,
        instance: InstanceSpec,
        constraint: MatroidConstraint,
        rng: np.random.Generator,
        alpha: float = 5.0,
        max_arms: int = 100_000,
    ):
        self.instance = instance
        arms = list(constraint.enumerate_feasible(limit=max_arms))
        self.arm_matrix = np.zeros((len(arms), instance.n))
        for i, atoms in enumerate(arms):
            self.arm_matrix[i, list(atoms)] = 1.0
        self.state = ConfidenceState(instance.n, instance.d, alpha)
        self.weights = np.ones(instance.d)
        b = instance.budget
        self.eta = math.sqrt(math.log(instance.d) / b) if (instance.d > 1 and b > 0) else 0.0
        self.time_cost = b / instance.horizon if instance.horizon else 0.0

    def select(self, t: int) -> np.ndarray:
        b = self.state.bounds()
        ucb = self.arm_matrix @ b.reward_upper
        lcb = self.arm_matrix @ b.cost_lower  # (arms, d)
        v = self.weights / self.weights.sum()
        denom = lcb @ v + self.time_cost
        positive = denom > 0.0
        score = np.where(
            positive,
            ucb / np.where(positive, denom, 1.0),
            np.where(ucb > 0.0, np.inf, 0.0),
        )
        best = int(np.argmax(score))
        return self.arm_matrix[best].astype(bool)

    def observe(self, t: int, atoms, rewards, consumption) -> None:
        self.state.update(atoms, rewards, consumption)
        realized = np.asarray(consumption, dtype=float).reshape(-1, self.instance.d).sum(axis=0)
        self.weights = self.weights * np.power(1.0 + self.eta, realized)


class OptimisticMatroidMaxPolicy:
    """Budget-oblivious greedy maximization of the reward UCBs."""

    name = "omm"

    def __init__(
        self,
        instance: InstanceSpec,
        constraint: MatroidConstraint,
        rng: np.random.Generator,
        alpha: float = 5.0,
    ):
        self.constraint = constraint
        self.state = ConfidenceState(instance.n, instance.d, alpha)

    def select(self, t: int) -> np.ndarray:
        return self.constraint.greedy_max_weight(self.state.bounds().reward_upper)

    def observe(self, t: int, atoms, rewards, consumption) -> None:
        self.state.update(atoms, rewards, consumption)


POLICIES: dict[str, type] = {
    SemiBwkRrsPolicy.name: SemiBwkRrsPolicy,
    PrimalDualBwkPolicy.name: PrimalDualBwkPolicy,
    OptimisticMatroidMaxPolicy.name: OptimisticMatroidMaxPolicy,
}


def run_policy(
    factory: PolicyFactory,
    env: Environment,
    instance: InstanceSpec,
    constraint: MatroidConstraint,
    seed=None,
    *,
    env_rng: np.random.Generator | None = None,
    policy_rng: np.random.Generator | None = None,
    record_fractional: bool = True,
) -> Trajectory:
    """Drive one full run: select, sample, settle, feed back; stop at budget
    violation or the horizon.  The stopping round's reward is excluded from
    the trajectory total.

    Pass a ``seed`` to derive independent environment and policy streams from
    one master seed, or inject the two streams directly (the harness does the
    latter to pair outcome streams across policies).
    """
    if env.n != instance.n or env.d != instance.d:
        raise ValueError("environment and instance dimensions disagree")
    if (env_rng is None) != (policy_rng is None):
        raise ValueError("provide both streams or neither")
    if env_rng is None:
        env_seq, policy_seq = np.random.SeedSequence(seed).spawn(2)
        env_rng = np.random.default_rng(env_seq)
        policy_rng = np.random.default_rng(policy_seq)
    policy = factory(instance, constraint, policy_rng)

    budget = BudgetState.fresh(instance)
    traj = Trajectory()
    total = 0.0
    for t in range(1, instance.horizon + 1):
        action = policy.select(t)
        if not constraint.is_feasible(action):
            raise RuntimeError(f"policy emitted an infeasible action at round {t}")
        outcome = env.sample(t, env_rng)
        reward, consumption, budget = settle_round(budget, action, outcome)
        atoms = np.flatnonzero(action)
        policy.observe(t, atoms, outcome.rewards[atoms], outcome.consumption[atoms])
        frac = getattr(policy, "last_fractional", None) if record_fractional else None
        traj.records.append(
            RoundRecord(
                t=t,
                atoms=tuple(int(a) for a in atoms),
                rewards_observed=outcome.rewards[atoms].copy(),
                consumption_observed=outcome.consumption[atoms].copy(),
                reward=reward,
                consumption=consumption,
                fractional=None if frac is None else np.asarray(frac).copy(),
            )
        )
        if budget.stopped:
            traj.stop_round = budget.stop_round
            break
        total += reward
    traj.total_reward = total
    return traj
