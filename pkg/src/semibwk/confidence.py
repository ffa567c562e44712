"""Confidence-radius arithmetic and per-atom UCB/LCB maintenance.

The radius is rad(alpha, x, m) = sqrt(alpha*x/m) + alpha/m.  Upper/lower bounds
project the empirical mean +/- its radius into [0, 1]; atoms never pulled get
the full-range bounds [0, 1] (maximal uncertainty keeps the optimism intact).
Two preset alphas matter downstream: the theory value 3*ln(n*d*T) and the
experiment heuristic 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def rad(alpha: float, x, m):
    """Confidence radius sqrt(alpha*x/m) + alpha/m; accepts scalars or arrays."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x_arr = np.asarray(x, dtype=float)
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr < 1):
        raise ValueError("m must be a positive count")
    if np.any(x_arr < 0):
        raise ValueError("x must be nonnegative")
    out = np.sqrt(alpha * x_arr / m_arr) + alpha / m_arr
    return float(out) if np.isscalar(x) and np.isscalar(m) else out


def theory_alpha(n: int, d: int, horizon: int) -> float:
    """Default theory-mode alpha = 3*ln(n*d*T)."""
    return 3.0 * math.log(max(n * d * max(horizon, 1), 2))


@dataclass(frozen=True)
class ConfidenceBounds:
    reward_upper: np.ndarray  # (n,)
    reward_lower: np.ndarray  # (n,)
    cost_upper: np.ndarray  # (n, d)
    cost_lower: np.ndarray  # (n, d)


class ConfidenceState:
    """Pull counts and running sums per atom (and per atom x resource)."""

    def __init__(self, n: int, d: int, alpha: float):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        self.n = n
        self.d = d
        self.alpha = float(alpha)
        self.pulls = np.zeros(n, dtype=np.int64)
        self.reward_sum = np.zeros(n)
        self.consumption_sum = np.zeros((n, d))

    def update(self, atoms, rewards, consumption) -> None:
        """Fold in semi-bandit feedback for exactly the chosen atoms.

        ``atoms`` are the chosen atom indices; ``rewards`` (k,) and
        ``consumption`` (k, d) are their observed values, row k for atoms[k].
        """
        idx = np.asarray(atoms, dtype=np.int64).ravel()
        r = np.atleast_1d(np.asarray(rewards, dtype=float))
        c = np.asarray(consumption, dtype=float).reshape(idx.size, self.d)
        if idx.size == 0:
            return
        if idx.min() < 0 or idx.max() >= self.n:
            raise ValueError("feedback for an atom outside the ground set")
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate feedback for one atom in a single round")
        if r.shape != (idx.size,):
            raise ValueError("one reward per chosen atom required")
        self.pulls[idx] += 1
        self.reward_sum[idx] += r
        self.consumption_sum[idx] += c

    def bounds(self) -> ConfidenceBounds:
        pulled = self.pulls > 0
        m = np.maximum(self.pulls, 1).astype(float)
        mu_hat = self.reward_sum / m
        r = np.sqrt(self.alpha * mu_hat / m) + self.alpha / m
        reward_upper = np.where(pulled, np.clip(mu_hat + r, 0.0, 1.0), 1.0)
        reward_lower = np.where(pulled, np.clip(mu_hat - r, 0.0, 1.0), 0.0)

        c_hat = self.consumption_sum / m[:, None]
        rc = np.sqrt(self.alpha * c_hat / m[:, None]) + self.alpha / m[:, None]
        cost_upper = np.where(pulled[:, None], np.clip(c_hat + rc, 0.0, 1.0), 1.0)
        cost_lower = np.where(pulled[:, None], np.clip(c_hat - rc, 0.0, 1.0), 0.0)
        return ConfidenceBounds(reward_upper, reward_lower, cost_upper, cost_lower)

    @staticmethod
    def from_exact_means(mu, cost) -> "ConfidenceBounds":
        """Clean-event bounds: both sides pinned at the exact means."""
        mu = np.asarray(mu, dtype=float)
        cost = np.asarray(cost, dtype=float)
        return ConfidenceBounds(mu.copy(), mu.copy(), cost.copy(), cost.copy())
