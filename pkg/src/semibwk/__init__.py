"""Combinatorial semi-bandits with knapsacks.

SemiBwK-RRS (optimistic LP over a matroid polytope + negatively correlated
randomized rounding) with pdBwK and OMM baselines, stochastic environments,
brute-force verification oracles and a benchmark harness.
"""

from ._backend import ACTIVE_BACKEND
from .algorithms import (
    OptimisticMatroidMaxPolicy,
    PrimalDualBwkPolicy,
    SemiBwkRrsPolicy,
    run_policy,
    theory_eps,
)
from .confidence import ConfidenceBounds, ConfidenceState, rad, theory_alpha
from .core import (
    BudgetState,
    Environment,
    InstanceSpec,
    OutcomeMatrix,
    RoundRecord,
    Trajectory,
    settle_round,
)
from .environments import AssortmentEnv, BiddingEnv, PricingEnv, make_assortment, make_bidding, make_pricing
from .lp import LinearProgram, LpInfeasibleError, LpUnboundedError, build_round_lp, solve
from .matroid import MatroidConstraint, UnsupportedConstraintError
from .rounding import (
    dependent_round,
    estimate_tail,
    exhaustive_distribution,
    sample_actions,
    verify_negative_correlation,
    verify_recentering_transform,
)

__all__ = [
    "ACTIVE_BACKEND",
    "AssortmentEnv",
    "BiddingEnv",
    "BudgetState",
    "ConfidenceBounds",
    "ConfidenceState",
    "Environment",
    "InstanceSpec",
    "LinearProgram",
    "LpInfeasibleError",
    "LpUnboundedError",
    "MatroidConstraint",
    "OptimisticMatroidMaxPolicy",
    "OutcomeMatrix",
    "PricingEnv",
    "PrimalDualBwkPolicy",
    "RoundRecord",
    "SemiBwkRrsPolicy",
    "Trajectory",
    "UnsupportedConstraintError",
    "build_round_lp",
    "dependent_round",
    "estimate_tail",
    "exhaustive_distribution",
    "make_assortment",
    "make_bidding",
    "make_pricing",
    "rad",
    "run_policy",
    "sample_actions",
    "settle_round",
    "solve",
    "theory_alpha",
    "theory_eps",
    "verify_negative_correlation",
    "verify_recentering_transform",
]

__version__ = "0.1.0"
