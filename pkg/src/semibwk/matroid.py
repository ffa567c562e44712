"""Action families: uniform and partition matroids over a ground set of atoms.

A constraint owns three views used across the package: feasibility/rank queries
on subsets, the linear inequalities of its induced polytope, and the flat group
layout consumed by the rounding kernel.  Atoms left out of every explicit
partition group form an implicit free group whose cap equals its size, so they
are unconstrained but still participate in rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np


class UnsupportedConstraintError(TypeError):
    """Raised when an operation only defined for uniform/partition matroids
    receives some other constraint (the general rank-oracle route is declared
    but not implemented)."""


class RankOracle:
    """Extension point for general matroids given by a rank oracle.

    Swap-rounding and the exponential polytope description are out of scope;
    anything reaching the LP or rounding layers with this interface gets an
    UnsupportedConstraintError.
    """

    def rank(self, subset) -> int:
        raise NotImplementedError("general matroid support is an extension point only")


@dataclass(frozen=True)
class MatroidConstraint:
    """Uniform or partition matroid on atoms ``0..n-1``.

    ``groups``/``caps`` always cover every atom: a uniform matroid is stored as
    the single group of all atoms with cap K, and a partition matroid carries
    its explicit groups followed by the implicit free group (cap = size) when
    some atoms are uncovered.  ``n_explicit_groups`` counts the groups that
    emit polytope rows.
    """

    n: int
    kind: str  # "uniform" | "partition"
    groups: tuple[tuple[int, ...], ...]
    caps: tuple[int, ...]
    n_explicit_groups: int
    _flat: tuple[np.ndarray, np.ndarray, np.ndarray] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one atom")
        seen: set[int] = set()
        for g, cap in zip(self.groups, self.caps):
            if not 0 <= cap <= len(g):
                raise ValueError(f"cap {cap} outside [0, {len(g)}]")
            for a in g:
                if not 0 <= a < self.n:
                    raise ValueError(f"atom {a} outside ground set")
                if a in seen:
                    raise ValueError(f"atom {a} appears in two groups")
                seen.add(a)
        if len(seen) != self.n:
            raise ValueError("groups must cover all atoms (free group missing)")
        member = np.concatenate([np.asarray(g, dtype=np.int64) for g in self.groups])
        glen = np.asarray([len(g) for g in self.groups], dtype=np.int64)
        gstart = np.concatenate(([0], np.cumsum(glen)[:-1])).astype(np.int64)
        object.__setattr__(self, "_flat", (member, gstart, glen))

    @staticmethod
    def uniform(n: int, k: int) -> "MatroidConstraint":
        if not 0 <= k <= n:
            raise ValueError(f"cardinality cap {k} outside [0, {n}]")
        return MatroidConstraint(
            n=n, kind="uniform", groups=(tuple(range(n)),), caps=(k,), n_explicit_groups=1
        )

    @staticmethod
    def partition(
        n: int, groups: Sequence[Iterable[int]], caps: Sequence[int]
    ) -> "MatroidConstraint":
        if len(groups) != len(caps):
            raise ValueError("one cap per group required")
        norm = [tuple(sorted(set(int(a) for a in g))) for g in groups]
        covered = {a for g in norm for a in g}
        free = tuple(a for a in range(n) if a not in covered)
        all_groups = tuple(norm)
        all_caps = tuple(int(c) for c in caps)
        n_explicit = len(all_groups)
        if free:
            all_groups = all_groups + (free,)
            all_caps = all_caps + (len(free),)
        return MatroidConstraint(
            n=n, kind="partition", groups=all_groups, caps=all_caps, n_explicit_groups=n_explicit
        )

    # -- queries ---------------------------------------------------------

    def _as_mask(self, subset) -> np.ndarray:
        # boolean arrays are masks; anything else is a collection of atom indices
        if isinstance(subset, (set, frozenset)):
            subset = sorted(subset)
        arr = np.asarray(subset)
        if arr.dtype == bool:
            if arr.shape != (self.n,):
                raise ValueError("mask length mismatch")
            return arr
        mask = np.zeros(self.n, dtype=bool)
        for a in arr.astype(np.int64).ravel():
            if not 0 <= a < self.n:
                raise ValueError(f"atom {a} outside ground set")
            mask[a] = True
        return mask

    def is_feasible(self, subset) -> bool:
        """True iff the subset (mask or atom indices) satisfies every cap."""
        mask = self._as_mask(subset)
        for g, cap in zip(self.groups, self.caps):
            if int(mask[list(g)].sum()) > cap:
                return False
        return True

    def rank(self, subset) -> int:
        """Largest independent subset size inside the given subset."""
        mask = self._as_mask(subset)
        return sum(min(int(mask[list(g)].sum()), cap) for g, cap in zip(self.groups, self.caps))

    def max_action_size(self) -> int:
        return int(sum(self.caps))

    # -- polytope --------------------------------------------------------

    def polytope_constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """Rows (A, b) of the cap inequalities; the 0..1 box stays implicit.

        Only explicit groups emit rows (the free group's cap never binds), so
        integral points of {A x <= b, x in [0,1]^n} are exactly the feasible
        subsets.
        """
        rows = []
        rhs = []
        for g, cap in zip(self.groups[: self.n_explicit_groups], self.caps[: self.n_explicit_groups]):
            row = np.zeros(self.n)
            row[list(g)] = 1.0
            rows.append(row)
            rhs.append(float(cap))
        if not rows:
            return np.zeros((0, self.n)), np.zeros(0)
        return np.asarray(rows), np.asarray(rhs)

    # -- optimization helpers ---------------------------------------------

    def greedy_max_weight(self, weights) -> np.ndarray:
        """Greedy max-weight independent set (mask), skipping weights <= 0.

        Atoms are taken by descending weight, ties by lower index; a matroid
        makes this exact.
        """
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.n,):
            raise ValueError("weight vector length mismatch")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        order = np.lexsort((np.arange(self.n), -w))
        mask = np.zeros(self.n, dtype=bool)
        used = [0] * len(self.groups)
        group_of = {}
        for gi, g in enumerate(self.groups):
            for a in g:
                group_of[a] = gi
        for a in order:
            if w[a] <= 0.0:
                break
            gi = group_of[int(a)]
            if used[gi] < self.caps[gi]:
                used[gi] += 1
                mask[a] = True
        return mask

    def enumerate_feasible(self, limit: int | None = None) -> Iterator[tuple[int, ...]]:
        """Yield every feasible subset (as sorted atom tuples), empty set first.

        Enumeration walks per-group combinations up to each cap, so the count
        is the product over groups of sum_{i<=cap} C(|g|, i).
        """
        per_group: list[list[tuple[int, ...]]] = []
        for g, cap in zip(self.groups, self.caps):
            opts = []
            for size in range(min(cap, len(g)) + 1):
                opts.extend(combinations(g, size))
            per_group.append(opts)
        total = 1
        for opts in per_group:
            total *= len(opts)
            if limit is not None and total > limit:
                raise ValueError(f"feasible family larger than cap {limit}")

        def rec(gi: int, acc: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
            if gi == len(per_group):
                yield tuple(sorted(acc))
                return
            for opt in per_group[gi]:
                yield from rec(gi + 1, acc + opt)

        yield from rec(0, ())

    def rounding_groups(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat (member, gstart, glen) layout covering all atoms, for the kernel."""
        return self._flat
