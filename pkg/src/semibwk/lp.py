"""Dense LP solving for the per-round optimistic program.

The solver is a bounded-variable primal simplex with Bland's anti-cycling rule
(see ``_kernels``); problem sizes here are tiny, so determinism and residual
checking matter more than asymptotics.  ``build_round_lp`` assembles the
optimistic program a policy solves each round: maximize the reward UCBs subject
to consumption LCB rows with the margin-scaled per-round budget, inside the
matroid polytope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .matroid import MatroidConstraint


class LpError(RuntimeError):
    pass


class LpInfeasibleError(LpError):
    pass


class LpUnboundedError(LpError):
    pass


@dataclass(frozen=True)
class LinearProgram:
    """maximize c.x  subject to  A x <= b  and the implicit box 0 <= x <= 1."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(np.asarray(self.c, dtype=float))
        A = np.ascontiguousarray(np.asarray(self.A, dtype=float))
        b = np.ascontiguousarray(np.asarray(self.b, dtype=float))
        if A.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise ValueError("c and b must be vectors, A a matrix")
        if A.shape != (b.size, c.size):
            raise ValueError(f"shape mismatch: A{A.shape}, c({c.size},), b({b.size},)")
        for name, arr in (("c", c), ("A", A), ("b", b)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.c.size


def solve(lp: LinearProgram, tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Solve to optimality; returns (x, value).

    Raises LpInfeasibleError / LpUnboundedError; the returned point is
    re-substituted into every constraint and must violate none beyond ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    status, x = _kernels.simplex_core(lp.c, lp.A, lp.b)
    if status == _kernels.INFEASIBLE:
        raise LpInfeasibleError("no feasible point")
    if status == _kernels.UNBOUNDED:
        raise LpUnboundedError("objective unbounded (impossible under the box)")
    if status != _kernels.OPTIMAL:
        raise LpError("simplex iteration limit hit")
    residual = lp.A @ x - lp.b if lp.b.size else np.zeros(0)
    if residual.size and residual.max() > tol:
        raise LpError(f"solution violates a row by {residual.max():.3e} > tol")
    if x.min() < -tol or x.max() > 1.0 + tol:
        raise LpError("solution violates the box beyond tol")
    return x, float(lp.c @ x)


def build_round_lp(
    reward_upper: np.ndarray,
    cost_lower: np.ndarray,
    constraint: MatroidConstraint,
    budget: float,
    horizon: int,
    eps: float,
) -> LinearProgram:
    """Per-round optimistic LP: maximize UCB rewards with LCB consumption rows
    capped at (1-eps)*B/T, plus the matroid polytope rows."""
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    mu = np.asarray(reward_upper, dtype=float)
    cm = np.asarray(cost_lower, dtype=float)
    n = constraint.n
    if mu.shape != (n,) or cm.ndim != 2 or cm.shape[0] != n:
        raise ValueError("bounds shapes do not match the constraint")
    rhs_round = (1.0 - eps) * budget / horizon
    poly_A, poly_b = constraint.polytope_constraints()
    A = np.vstack([cm.T, poly_A])
    b = np.concatenate([np.full(cm.shape[1], rhs_round), poly_b])
    return LinearProgram(c=mu, A=A, b=b)
