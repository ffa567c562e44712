"""Negatively correlated randomized rounding and its verifiers.

``dependent_round`` maps a fractional polytope point to a random feasible
action with exact per-atom marginals.  Within each group the two lowest-indexed
fractional coordinates are repeatedly pair-rounded: with probability
d2/(d1+d2) move (x_a, x_b) -> (x_a+d1, x_b-d1), else (x_a-d2, x_b+d2), where
d1 = min(1-x_a, x_b) and d2 = min(x_a, 1-x_b).  Every step keeps the group sum
and all marginals and makes at least one coordinate integral; a last lone
fractional coordinate is rounded to 1 with its own probability.  Groups use
independent substreams, so cross-group coordinates are literally independent.
Caps are integers and fractional group sums never exceed them, so the final
integral sum stays feasible.

The verifiers work on exact finite distributions (rationals), produced by
``exhaustive_distribution`` which enumerates the same branching tree the
sampler walks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.stats import beta as _beta_dist

from . import _kernels
from .matroid import MatroidConstraint, UnsupportedConstraintError

_SNAP = 1e-12


def _ingest(x, constraint: MatroidConstraint, tol: float) -> np.ndarray:
    """Clamp into the box, reject points outside the polytope beyond tol, and
    rescale any group whose sum exceeds its cap by at most tol."""
    if not isinstance(constraint, MatroidConstraint):
        raise UnsupportedConstraintError(
            "rounding supports uniform/partition matroids only"
        )
    xv = np.asarray(x, dtype=float)
    if xv.shape != (constraint.n,):
        raise ValueError("fractional point length mismatch")
    if not np.all(np.isfinite(xv)):
        raise ValueError("fractional point must be finite")
    if xv.min() < -tol or xv.max() > 1.0 + tol:
        raise ValueError("fractional point outside the box beyond tol")
    xv = np.clip(xv, 0.0, 1.0)
    out = xv.copy()
    for g, cap in zip(constraint.groups, constraint.caps):
        idx = list(g)
        s = out[idx].sum()
        if s > cap + tol:
            raise ValueError(f"group sum {s} exceeds cap {cap} beyond tol")
        if s > cap and s > 0:
            out[idx] *= cap / s
    return out


def sample_actions(
    x,
    constraint: MatroidConstraint,
    rng: np.random.Generator,
    size: int = 1,
    tol: float = 1e-7,
) -> np.ndarray:
    """Draw ``size`` independent rounded actions; returns a (size, n) bool array."""
    xc = _ingest(x, constraint, tol)
    member, gstart, glen = constraint.rounding_groups()
    unif = np.empty((size, constraint.n))
    for g, stream in enumerate(rng.spawn(len(glen))):
        lo = int(gstart[g])
        unif[:, lo : lo + int(glen[g])] = stream.random((size, int(glen[g])))
    out = np.zeros((size, constraint.n), dtype=np.uint8)
    _kernels.round_batch(xc, member, gstart, glen, unif, out)
    return out.astype(bool)


def dependent_round(
    x, constraint: MatroidConstraint, rng: np.random.Generator, tol: float = 1e-7
) -> np.ndarray:
    """Round one fractional point to a feasible action (bool mask)."""
    return sample_actions(x, constraint, rng, size=1, tol=tol)[0]


# -- exact enumeration ----------------------------------------------------


def _enum_group(vals: tuple[Fraction, ...]) -> dict[tuple[int, ...], Fraction]:
    frac_idx = [i for i, v in enumerate(vals) if 0 < v < 1]
    if not frac_idx:
        return {tuple(int(v) for v in vals): Fraction(1)}
    if len(frac_idx) == 1:
        i = frac_idx[0]
        p = vals[i]
        hi = list(vals)
        hi[i] = Fraction(1)
        lo = list(vals)
        lo[i] = Fraction(0)
        out: dict[tuple[int, ...], Fraction] = {}
        if p > 0:
            out[tuple(int(v) for v in hi)] = p
        if p < 1:
            out[tuple(int(v) for v in lo)] = out.get(tuple(int(v) for v in lo), Fraction(0)) + (1 - p)
        return out
    a, b = frac_idx[0], frac_idx[1]
    d1 = min(1 - vals[a], vals[b])
    d2 = min(vals[a], 1 - vals[b])
    p_first = d2 / (d1 + d2)
    out = {}
    for prob, (da, db) in ((p_first, (d1, -d1)), (1 - p_first, (-d2, d2))):
        if prob == 0:
            continue
        nxt = list(vals)
        nxt[a] = vals[a] + da
        nxt[b] = vals[b] + db
        for outcome, q in _enum_group(tuple(nxt)).items():
            out[outcome] = out.get(outcome, Fraction(0)) + prob * q
    return out


def exhaustive_distribution(
    x, constraint: MatroidConstraint, tol: float = 1e-7
) -> dict[tuple[int, ...], Fraction]:
    """Exact outcome distribution of ``dependent_round`` on ``x``.

    Exponential in n; intended for n <= ~8.  Coordinates are taken as the exact
    rationals of their float values, so probabilities are exact.
    """
    xc = _ingest(x, constraint, tol)
    vals = tuple(Fraction(v) for v in xc)
    dists = [
        _enum_group(tuple(vals[a] for a in g)) for g in constraint.groups
    ]
    combined: dict[tuple[int, ...], Fraction] = {tuple(): Fraction(1)}
    flat_order: list[int] = [a for g in constraint.groups for a in g]
    for d in dists:
        combined = {
            prefix + outcome: p * q
            for prefix, p in combined.items()
            for outcome, q in d.items()
        }
    # undo the group permutation back to atom order
    inv = np.argsort(flat_order)
    return {
        tuple(int(outcome[k]) for k in inv): p for outcome, p in combined.items()
    }


# -- property verifiers ----------------------------------------------------


def _marginals(dist: dict[tuple[int, ...], Fraction]):
    n = len(next(iter(dist)))
    zero = Fraction(0) if isinstance(next(iter(dist.values())), Fraction) else 0.0
    m = [zero] * n
    for outcome, p in dist.items():
        for i, bit in enumerate(outcome):
            if bit:
                m[i] = m[i] + p
    return m


def verify_negative_correlation(dist, tol: float | None = None) -> bool:
    """Check the product-moment inequalities on every subset:
    E[prod_{i in S} X_i] <= prod E[X_i]  and the same for 1 - X_i."""
    dist = dict(dist)
    n = len(next(iter(dist)))
    exact = isinstance(next(iter(dist.values())), Fraction)
    if tol is None:
        tol = 1e-12 if exact else 1e-9
    m = _marginals(dist)
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            e_ones = sum(p for o, p in dist.items() if all(o[i] for i in S))
            e_zeros = sum(p for o, p in dist.items() if all(not o[i] for i in S))
            prod_ones = 1
            prod_zeros = 1
            for i in S:
                prod_ones = prod_ones * m[i]
                prod_zeros = prod_zeros * (1 - m[i])
            if e_ones > prod_ones + tol or e_zeros > prod_zeros + tol:
                return False
    return True


def verify_recentering_transform(dist, lambdas, tol: float | None = None) -> bool:
    """Check that both families (1 +/- l_i (X_i - E X_i))/2 keep the product
    upper bound E[prod_{i in S} Y_i] <= prod E[Y_i] = 2^-|S| on every subset."""
    dist = dict(dist)
    n = len(next(iter(dist)))
    exact = isinstance(next(iter(dist.values())), Fraction)
    if tol is None:
        tol = 1e-12 if exact else 1e-9
    lam = [Fraction(float(l)) if exact else float(l) for l in lambdas]
    if len(lam) != n:
        raise ValueError("one lambda per coordinate required")
    m = _marginals(dist)
    half = Fraction(1, 2) if exact else 0.5
    for sign in (1, -1):
        for size in range(1, n + 1):
            for S in combinations(range(n), size):
                e_prod = 0
                for outcome, p in dist.items():
                    term = p
                    for i in S:
                        term = term * (1 + sign * lam[i] * (outcome[i] - m[i])) * half
                    e_prod = e_prod + term
                bound = half ** len(S)
                if e_prod > bound + tol:
                    return False
    return True


@dataclass(frozen=True)
class TailEstimate:
    """Monte-Carlo tail estimate with an exact (Clopper-Pearson) interval."""

    n_samples: int
    hits: int
    frequency: float
    ci_low: float
    ci_high: float


def estimate_tail(
    m_samples: int,
    n_vars: int,
    eta: float,
    rng: np.random.Generator,
    confidence: float = 0.99,
) -> TailEstimate:
    """Empirical frequency of {mean of the rounded vector >= 1/2 + eta} for the
    all-halves point under a uniform cap of floor(n/2)."""
    x = np.full(n_vars, 0.5)
    constraint = MatroidConstraint.uniform(n_vars, n_vars // 2)
    draws = sample_actions(x, constraint, rng, size=m_samples)
    means = draws.mean(axis=1)
    hits = int(np.count_nonzero(means >= 0.5 + eta))
    a = (1.0 - confidence) / 2.0
    lo = 0.0 if hits == 0 else float(_beta_dist.ppf(a, hits, m_samples - hits + 1))
    hi = 1.0 if hits == m_samples else float(_beta_dist.ppf(1 - a, hits + 1, m_samples - hits))
    return TailEstimate(
        n_samples=m_samples,
        hits=hits,
        frequency=hits / m_samples,
        ci_low=lo,
        ci_high=hi,
    )
