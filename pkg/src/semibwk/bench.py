"""Experiment runner, brute-force LP oracles, timing harness and CSV emission.

Seeds are content-keyed: every stream seed is a blake2 hash of the master seed
plus the fields that identify the cell, so adding grid cells never perturbs
existing results, and all policies within a cell/run face the same instance
draw and the same outcome stream (paired comparison).

Result rows use the fixed schema
``env,mode,matroid,policy,n,T,B,run,seed,total_reward,stop_round,per_step_time_us,lp_opt``
where ``lp_opt`` is T times the optimal value of the atom-level LP on the
instance's exact means with per-round budget B/T.  Timing rows use
``policy,n,window_index,median_us``: one row per 10-step window carrying that
window's average per-step policy time; the cross-window median is the reported
statistic.
"""

from __future__ import annotations

import csv
import hashlib
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

from .algorithms import (
    POLICIES,
    OptimisticMatroidMaxPolicy,
    PrimalDualBwkPolicy,
    SemiBwkRrsPolicy,
    run_policy,
)
from .core import BudgetState, InstanceSpec, settle_round
from .environments import make_assortment, make_bidding, make_pricing
from .lp import LinearProgram, build_round_lp, solve
from .matroid import MatroidConstraint

RESULT_HEADER = "env,mode,matroid,policy,n,T,B,run,seed,total_reward,stop_round,per_step_time_us,lp_opt"
TIMING_HEADER = "policy,n,window_index,median_us"

ENV_FAMILIES = {
    "assortment": ("assortment", "standard"),
    "assortment-modified": ("assortment", "modified"),
    "pricing": ("pricing", "standard"),
    "pricing-modified": ("pricing", "modified"),
    "bidding": ("bidding", "standard"),
}


def derive_seed(master: int, *parts) -> int:
    """Stable 64-bit stream seed from the master seed and identifying fields."""
    key = "|".join([str(int(master))] + [str(p) for p in parts]).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


@dataclass(frozen=True)
class ExperimentConfig:
    envs: tuple[str, ...] = ("assortment", "pricing", "assortment-modified", "pricing-modified")
    matroids: tuple[str, ...] = ("uniform", "partition")
    n_list: tuple[int, ...] = (6, 26)
    t_list: tuple[int, ...] = (1000, 2000, 3000, 4000, 5000, 6000)
    b_rule: str = "half-t"
    runs: int = 20
    policies: tuple[str, ...] = ("semibwk-rrs", "pdbwk", "omm")
    alpha: float = 5.0
    eps: float | str = 0.0
    seed: int = 0
    k: int = 2
    jobs: int = 1

    def budget_for(self, horizon: int) -> float:
        if self.b_rule == "half-t":
            return horizon / 2.0
        if self.b_rule.startswith("fixed:"):
            return float(self.b_rule.split(":", 1)[1])
        raise ValueError(f"unknown budget rule {self.b_rule!r}")


@dataclass(frozen=True)
class RunRow:
    env: str
    mode: str
    matroid: str
    policy: str
    n: int
    T: int
    B: float
    run: int
    seed: int
    total_reward: float
    stop_round: int | None
    per_step_time_us: float
    lp_opt: float


def build_env(env_name: str, n: int, seed, matroid_kind: str, k: int = 2):
    family, mode = ENV_FAMILIES[env_name]
    if family == "assortment":
        return make_assortment(n, mode=mode, seed=seed, matroid=matroid_kind, k=k)
    if family == "pricing":
        return make_pricing(n, mode=mode, seed=seed, matroid=matroid_kind, k=k)
    if family == "bidding":
        # n atoms = auctions x bid levels; prefer 4 levels, degrade to a divisor
        levels = next(lv for lv in (4, 3, 2, 1) if n % lv == 0)
        return make_bidding(n // levels, bid_levels=levels, seed=seed)
    raise ValueError(f"unknown environment {env_name!r}")


def atoms_lp_value(mu, cost, constraint: MatroidConstraint, budget: float, horizon: int, eps: float = 0.0) -> float:
    """Optimal per-round value of the atom-level LP on exact means."""
    _, value = solve(build_round_lp(mu, cost, constraint, budget, horizon, eps))
    return value


def brute_force_action_lp(
    mu, cost, constraint: MatroidConstraint, budget: float, horizon: int, max_arms: int = 100_000
) -> float:
    """Exact action-indexed LP: one variable per feasible subset, played with
    total probability at most one, expected consumption at most B/T."""
    mu = np.asarray(mu, dtype=float)
    cost = np.asarray(cost, dtype=float)
    arms = list(constraint.enumerate_feasible(limit=max_arms))
    d = cost.shape[1]
    c = np.array([mu[list(S)].sum() for S in arms])
    A = np.zeros((1 + d, len(arms)))
    A[0, :] = 1.0
    for j, S in enumerate(arms):
        A[1:, j] = cost[list(S)].sum(axis=0)
    b = np.concatenate([[1.0], np.full(d, budget / horizon)])
    _, value = solve(LinearProgram(c=c, A=A, b=b))
    return value


@dataclass(frozen=True)
class ChainReport:
    eps: float
    action_lp_full: float  # action LP at budget B
    action_lp_eps: float  # action LP at budget (1-eps)B
    atoms_lp: float  # atom LP at budget (1-eps)B
    round_lp: float  # the per-round optimistic LP under the given bounds
    ok: bool
    gaps: tuple[float, float, float]


def verify_relaxation_chain(
    mu,
    cost,
    constraint: MatroidConstraint,
    budget: float,
    horizon: int,
    eps: float,
    tol: float = 1e-7,
    bounds=None,
) -> ChainReport:
    """Check the relaxation chain on exact means:

    action_lp((1-eps)B) >= (1-eps) * action_lp(B)
    round_lp >= atoms_lp((1-eps)B) >= action_lp((1-eps)B)

    With ``bounds=None`` the round LP runs in clean-event mode (bounds pinned
    at the exact means); passing optimistic bounds (reward upper >= mu,
    cost lower <= cost) exercises the first inequality non-trivially.
    """
    mu = np.asarray(mu, dtype=float)
    cost = np.asarray(cost, dtype=float)
    v_full = brute_force_action_lp(mu, cost, constraint, budget, horizon)
    v_eps = brute_force_action_lp(mu, cost, constraint, (1.0 - eps) * budget, horizon)
    v_atoms = atoms_lp_value(mu, cost, constraint, budget, horizon, eps)
    if bounds is None:
        ru, cl = mu, cost
    else:
        ru, cl = bounds
    _, v_round = solve(build_round_lp(ru, cl, constraint, budget, horizon, eps))
    g1 = v_eps - (1.0 - eps) * v_full
    g2 = v_round - v_atoms
    g3 = v_atoms - v_eps
    ok = g1 >= -tol and g2 >= -tol and g3 >= -tol
    return ChainReport(
        eps=eps,
        action_lp_full=v_full,
        action_lp_eps=v_eps,
        atoms_lp=v_atoms,
        round_lp=v_round,
        ok=ok,
        gaps=(g1, g2, g3),
    )


def random_chain_instances(count: int, seed: int, n_max: int = 6, d_max: int = 2, k_max: int = 2):
    """Yield (mu, cost, constraint, budget, horizon) tuples for the chain suite."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        mu = rng.random(n)
        cost = rng.random((n, d))
        if n == 1 or rng.random() < 0.5:
            constraint = MatroidConstraint.uniform(n, int(rng.integers(0, min(k_max, n) + 1)))
        else:
            half = n // 2
            caps = [
                int(rng.integers(1, min(k_max, half) + 1)),
                int(rng.integers(1, min(k_max, n - half) + 1)),
            ]
            constraint = MatroidConstraint.partition(n, [range(half), range(half, n)], caps)
        horizon = 100
        budget = float(rng.uniform(0.05, 1.0) * n * horizon)
        out.append((mu, cost, constraint, budget, horizon))
    return out


def _policy_factory(name: str, alpha: float, eps):
    if name == "semibwk-rrs":
        return lambda inst, con, rng: SemiBwkRrsPolicy(inst, con, rng, alpha=alpha, eps=eps)
    if name == "pdbwk":
        return lambda inst, con, rng: PrimalDualBwkPolicy(inst, con, rng, alpha=alpha)
    if name == "omm":
        return lambda inst, con, rng: OptimisticMatroidMaxPolicy(inst, con, rng, alpha=alpha)
    raise ValueError(f"unknown policy {name!r}; known: {sorted(POLICIES)}")


def _run_cell_once(args) -> RunRow:
    (env_name, matroid_kind, n, T, policy_name, run, cfg) = args
    family, mode = ENV_FAMILIES[env_name]
    B = cfg.budget_for(T)
    instance_seed = derive_seed(cfg.seed, "instance", env_name, n, run)
    env, constraint = build_env(env_name, n, instance_seed, matroid_kind, cfg.k)
    instance = InstanceSpec(n=env.n, d=env.d, budget=B, horizon=T)
    env_seed = derive_seed(cfg.seed, "rounds", env_name, n, T, run)
    policy_seed = derive_seed(cfg.seed, "policy", policy_name, env_name, matroid_kind, n, T, run)
    factory = _policy_factory(policy_name, cfg.alpha, cfg.eps)

    mu, cost = env.exact_means()
    lp_opt = T * atoms_lp_value(mu, cost, constraint, B, T, eps=0.0) if T > 0 else 0.0

    start = time.perf_counter()
    traj = run_policy(
        factory,
        env,
        instance,
        constraint,
        seed=None,
        env_rng=np.random.default_rng(np.random.SeedSequence(env_seed)),
        policy_rng=np.random.default_rng(np.random.SeedSequence(policy_seed)),
    )
    elapsed = time.perf_counter() - start
    steps = max(len(traj.records), 1)
    return RunRow(
        env=family,
        mode=mode,
        matroid=matroid_kind,
        policy=policy_name,
        n=env.n,
        T=T,
        B=B,
        run=run,
        seed=policy_seed,
        total_reward=traj.total_reward,
        stop_round=traj.stop_round,
        per_step_time_us=elapsed / steps * 1e6,
        lp_opt=lp_opt,
    )


def run_experiment(config: ExperimentConfig, out_path=None) -> list[RunRow]:
    """Execute the full grid; returns rows in deterministic grid order and
    optionally writes the CSV."""
    tasks = [
        (env_name, matroid_kind, n, T, policy_name, run, config)
        for env_name, matroid_kind, n, T, policy_name in product(
            config.envs, config.matroids, config.n_list, config.t_list, config.policies
        )
        for run in range(config.runs)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_run_cell_once, tasks, chunksize=1))
    else:
        rows = [_run_cell_once(t) for t in tasks]
    if out_path is not None:
        write_result_rows(rows, out_path)
    return rows


# -- CSV ---------------------------------------------------------------------


def format_result_rows(rows: list[RunRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_HEADER.split(","))
    for r in rows:
        w.writerow(
            [
                r.env,
                r.mode,
                r.matroid,
                r.policy,
                r.n,
                r.T,
                repr(r.B),
                r.run,
                r.seed,
                repr(r.total_reward),
                "" if r.stop_round is None else r.stop_round,
                repr(r.per_step_time_us),
                repr(r.lp_opt),
            ]
        )
    return buf.getvalue()


def write_result_rows(rows: list[RunRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_result_rows(rows))


def parse_result_rows(text: str) -> list[RunRow]:
    lines = text.splitlines()
    if not lines:
        return []
    header = lines[0]
    if header != RESULT_HEADER:
        raise ValueError(f"unexpected header: {header!r}")
    out = []
    for rec in csv.reader(lines[1:]):
        if not rec:
            continue
        out.append(
            RunRow(
                env=rec[0],
                mode=rec[1],
                matroid=rec[2],
                policy=rec[3],
                n=int(rec[4]),
                T=int(rec[5]),
                B=float(rec[6]),
                run=int(rec[7]),
                seed=int(rec[8]),
                total_reward=float(rec[9]),
                stop_round=None if rec[10] == "" else int(rec[10]),
                per_step_time_us=float(rec[11]),
                lp_opt=float(rec[12]),
            )
        )
    return out


def read_result_rows(path) -> list[RunRow]:
    with open(path, "r", newline="") as fh:
        return parse_result_rows(fh.read())


# -- timing -------------------------------------------------------------------


@dataclass(frozen=True)
class TimingRow:
    policy: str
    n: int
    window_index: int
    median_us: float  # this window's average per-step policy time


@dataclass(frozen=True)
class TimingSummary:
    policy: str
    n: int
    median_us: float  # median across windows


def timing_experiment(
    policies: tuple[str, ...] = ("semibwk-rrs", "pdbwk", "omm"),
    n_list: tuple[int, ...] = (6, 26, 52),
    windows: int = 50,
    window_size: int = 10,
    alpha: float = 5.0,
    seed: int = 0,
    env_name: str = "assortment",
    matroid_kind: str = "uniform",
    k: int = 2,
    policy_factories: dict | None = None,
) -> tuple[list[TimingRow], list[TimingSummary]]:
    """Per-step policy times over 10-step windows; budget is set to T so the
    run cannot stop early."""
    rows: list[TimingRow] = []
    summaries: list[TimingSummary] = []
    horizon = windows * window_size
    for policy_name in policies:
        for n in n_list:
            instance_seed = derive_seed(seed, "timing-instance", env_name, n)
            env, constraint = build_env(env_name, n, instance_seed, matroid_kind, k)
            instance = InstanceSpec(n=env.n, d=env.d, budget=float(horizon), horizon=horizon)
            if policy_factories and policy_name in policy_factories:
                factory = policy_factories[policy_name]
            else:
                factory = _policy_factory(policy_name, alpha, 0.0)
            env_rng = np.random.default_rng(derive_seed(seed, "timing-rounds", env_name, n))
            policy = factory(instance, constraint, np.random.default_rng(derive_seed(seed, "timing-policy", policy_name, n)))
            budget = BudgetState.fresh(instance)
            step_times = np.empty(horizon)
            for t in range(1, horizon + 1):
                tic = time.perf_counter()
                action = policy.select(t)
                select_s = time.perf_counter() - tic
                outcome = env.sample(t, env_rng)
                _, _, budget = settle_round(budget, action, outcome)
                atoms = np.flatnonzero(action)
                tic = time.perf_counter()
                policy.observe(t, atoms, outcome.rewards[atoms], outcome.consumption[atoms])
                observe_s = time.perf_counter() - tic
                # policy work only: selection plus the feedback update
                step_times[t - 1] = select_s + observe_s
                if budget.stopped:
                    raise RuntimeError("timing run unexpectedly exhausted its budget")
            window_means = step_times.reshape(windows, window_size).mean(axis=1) * 1e6
            for w, val in enumerate(window_means):
                rows.append(TimingRow(policy=policy_name, n=env.n, window_index=w, median_us=float(val)))
            summaries.append(
                TimingSummary(policy=policy_name, n=env.n, median_us=float(np.median(window_means)))
            )
    return rows, summaries


def format_timing_rows(rows: list[TimingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMING_HEADER.split(","))
    for r in rows:
        w.writerow([r.policy, r.n, r.window_index, repr(r.median_us)])
    return buf.getvalue()


def write_timing_rows(rows: list[TimingRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_timing_rows(rows))
