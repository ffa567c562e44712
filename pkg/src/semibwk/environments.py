"""Stochastic instance generators with closed-form exact means.

Three families, each drawing fixed instance parameters once from an instance
seed and per-round outcome matrices from the run's stream:

* dynamic assortment - n products, one resource per product; prices ~ U[0,1],
  valuations ~ U[0,1] per round.  Standard: a sale (valuation >= price) earns
  the price and consumes one unit; otherwise nothing.  Modified: a no-sale
  earns and consumes the valuation instead.
* dynamic pricing - two products with n/2 allowed prices each (uniformly
  spaced, endpoints included); valuations are N(v0_i, 1) truncated to [0,1]
  by rejection.  Standard: atom (price p, product i) sells iff v_i >= p,
  earning p and consuming one unit of product i.  Modified: when p < v_i the
  atom earns a fresh U[0,1] draw with consumption 1, else it earns 0 with
  consumption 0.3.
* repeated bidding - r auctions times a grid of bid levels, one money
  resource.  A bid b wins against a U[0,1] competing price with probability b,
  earning max(value_i - b, 0) and paying b.
"""

from __future__ import annotations

import math

import numpy as np

from .core import OutcomeMatrix
from .matroid import MatroidConstraint


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def split_halves(n: int) -> MatroidConstraint:
    """Partition matroid with two equal halves, cap 1 each (max action size 2)."""
    half = n // 2
    return MatroidConstraint.partition(
        n, [range(half), range(half, n)], [1, 1]
    )


class AssortmentEnv:
    """Products with per-product inventory; d = n."""

    def __init__(self, n: int, mode: str = "standard", seed=None, prices=None):
        if mode not in ("standard", "modified"):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.d = n
        self.mode = mode
        if prices is None:
            prices = np.random.default_rng(seed).random(n)
        self.prices = np.asarray(prices, dtype=float)
        if self.prices.shape != (n,):
            raise ValueError("one price per product required")

    def sample(self, t: int, rng: np.random.Generator) -> OutcomeMatrix:
        v = rng.random(self.n)
        sale = v >= self.prices
        if self.mode == "standard":
            rewards = np.where(sale, self.prices, 0.0)
            diag = sale.astype(float)
        else:
            rewards = np.where(sale, self.prices, v)
            diag = np.where(sale, 1.0, v)
        consumption = np.zeros((self.n, self.d))
        np.fill_diagonal(consumption, diag)
        return OutcomeMatrix(rewards=rewards, consumption=consumption)

    def exact_means(self) -> tuple[np.ndarray, np.ndarray]:
        p = self.prices
        if self.mode == "standard":
            mu = p * (1.0 - p)
            diag = 1.0 - p
        else:
            # no-sale branch contributes E[v; v < p] = p^2/2 to both
            mu = p * (1.0 - p) + p**2 / 2.0
            diag = (1.0 - p) + p**2 / 2.0
        cost = np.zeros((self.n, self.d))
        np.fill_diagonal(cost, diag)
        return mu, cost


class PricingEnv:
    """Two products, n/2 price levels each; atoms are (product, price) pairs
    in product-major order; d = 2."""

    products = 2

    def __init__(self, n: int, mode: str = "standard", seed=None, base_values=None):
        if n < 2 or n % 2 != 0:
            raise ValueError("pricing needs an even atom count n >= 2")
        if mode not in ("standard", "modified"):
            raise ValueError(f"unknown mode {mode!r}")
        self.n = n
        self.d = self.products
        self.mode = mode
        self.levels = n // self.products
        self.price_grid = np.linspace(0.0, 1.0, self.levels) if self.levels > 1 else np.array([0.0])
        if base_values is None:
            base_values = np.random.default_rng(seed).random(self.products)
        self.base_values = np.asarray(base_values, dtype=float)
        if self.base_values.shape != (self.products,):
            raise ValueError("one base valuation per product required")

    def _truncated_normal(self, rng: np.random.Generator, loc: float) -> float:
        # rejection keeps the conditional law exact; acceptance >= Phi(1)-Phi(0)
        while True:
            draws = rng.normal(loc, 1.0, size=8)
            ok = (draws >= 0.0) & (draws <= 1.0)
            if ok.any():
                return float(draws[np.argmax(ok)])

    def sale_probability(self, product: int, price: float) -> float:
        """P[truncated valuation >= price], by the normal CDF ratio."""
        v0 = self.base_values[product]
        denom = _norm_cdf(1.0 - v0) - _norm_cdf(-v0)
        return (_norm_cdf(1.0 - v0) - _norm_cdf(price - v0)) / denom

    def sample(self, t: int, rng: np.random.Generator) -> OutcomeMatrix:
        v = np.array([self._truncated_normal(rng, v0) for v0 in self.base_values])
        rewards = np.zeros(self.n)
        consumption = np.zeros((self.n, self.d))
        for i in range(self.products):
            lo = i * self.levels
            prices = self.price_grid
            if self.mode == "standard":
                sale = v[i] >= prices
                rewards[lo : lo + self.levels] = np.where(sale, prices, 0.0)
                consumption[lo : lo + self.levels, i] = sale.astype(float)
            else:
                under = prices < v[i]
                rewards[lo : lo + self.levels] = np.where(
                    under, rng.random(self.levels), 0.0
                )
                consumption[lo : lo + self.levels, i] = np.where(under, 1.0, 0.3)
        return OutcomeMatrix(rewards=rewards, consumption=consumption)

    def exact_means(self) -> tuple[np.ndarray, np.ndarray]:
        mu = np.zeros(self.n)
        cost = np.zeros((self.n, self.d))
        for i in range(self.products):
            lo = i * self.levels
            q = np.array([self.sale_probability(i, p) for p in self.price_grid])
            if self.mode == "standard":
                mu[lo : lo + self.levels] = self.price_grid * q
                cost[lo : lo + self.levels, i] = q
            else:
                mu[lo : lo + self.levels] = 0.5 * q
                cost[lo : lo + self.levels, i] = q + 0.3 * (1.0 - q)
        return mu, cost


class BiddingEnv:
    """r simultaneous auctions, bid grid per auction, one money resource."""

    def __init__(self, r: int, bid_levels=4, seed=None, values=None):
        if r < 1:
            raise ValueError("need at least one auction")
        if isinstance(bid_levels, int):
            if bid_levels < 1:
                raise ValueError("need at least one bid level")
            bids = np.linspace(0.0, 1.0, bid_levels) if bid_levels > 1 else np.array([0.0])
        else:
            bids = np.asarray(bid_levels, dtype=float)
        if bids.min() < 0.0 or bids.max() > 1.0:
            raise ValueError("bid levels must lie in [0, 1]")
        self.r = r
        self.bids = bids
        self.levels = bids.size
        self.n = r * self.levels
        self.d = 1
        if values is None:
            values = np.random.default_rng(seed).random(r)
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (r,):
            raise ValueError("one value per auction required")

    def sample(self, t: int, rng: np.random.Generator) -> OutcomeMatrix:
        competing = rng.random(self.r)
        rewards = np.zeros(self.n)
        consumption = np.zeros((self.n, 1))
        for i in range(self.r):
            lo = i * self.levels
            win = self.bids >= competing[i]
            utility = np.clip(self.values[i] - self.bids, 0.0, 1.0)
            rewards[lo : lo + self.levels] = np.where(win, utility, 0.0)
            consumption[lo : lo + self.levels, 0] = np.where(win, self.bids, 0.0)
        return OutcomeMatrix(rewards=rewards, consumption=consumption)

    def exact_means(self) -> tuple[np.ndarray, np.ndarray]:
        mu = np.zeros(self.n)
        cost = np.zeros((self.n, 1))
        for i in range(self.r):
            lo = i * self.levels
            win_p = self.bids  # P[U[0,1] <= b] = b
            mu[lo : lo + self.levels] = win_p * np.clip(self.values[i] - self.bids, 0.0, 1.0)
            cost[lo : lo + self.levels, 0] = win_p * self.bids
        return mu, cost


def make_assortment(
    n: int, mode: str = "standard", seed=None, matroid: str = "uniform", k: int = 2
) -> tuple[AssortmentEnv, MatroidConstraint]:
    env = AssortmentEnv(n, mode=mode, seed=seed)
    constraint = MatroidConstraint.uniform(n, k) if matroid == "uniform" else split_halves(n)
    return env, constraint


def make_pricing(
    n: int, mode: str = "standard", seed=None, matroid: str = "partition", k: int = 2
) -> tuple[PricingEnv, MatroidConstraint]:
    env = PricingEnv(n, mode=mode, seed=seed)
    constraint = MatroidConstraint.uniform(n, k) if matroid == "uniform" else split_halves(n)
    return env, constraint


def make_bidding(
    r: int, bid_levels=4, seed=None
) -> tuple[BiddingEnv, MatroidConstraint]:
    env = BiddingEnv(r, bid_levels=bid_levels, seed=seed)
    groups = [range(i * env.levels, (i + 1) * env.levels) for i in range(r)]
    constraint = MatroidConstraint.partition(env.n, groups, [1] * r)
    return env, constraint
