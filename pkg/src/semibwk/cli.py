"""Command-line entry point.

Subcommands: ``run`` (experiment grid from flags/config), ``verify-lp`` and
``verify-rounding`` (oracle/property suites), ``timing`` (per-step time table)
and ``reproduce-paper`` (the canonical benchmark grid).  Exit codes: 0 success,
1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .algorithms import theory_eps
from .rounding import (
    MatroidConstraint,
    estimate_tail,
    exhaustive_distribution,
    sample_actions,
    verify_negative_correlation,
    verify_recentering_transform,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON experiment config (flags override it)")
    p.add_argument("--out", type=Path, help="output CSV path (or directory for grids)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--runs", type=int, help="independent runs per cell")
    p.add_argument("--alpha", type=float, help="confidence-radius scale")
    p.add_argument("--eps", help="LP budget margin in [0,1), or 'auto'")
    p.add_argument("--policies", help="comma list: semibwk-rrs,pdbwk,omm")
    p.add_argument("--env", help="comma list: assortment[-modified],pricing[-modified],bidding")
    p.add_argument("--matroids", help="comma list: uniform,partition")
    p.add_argument("--n", type=int, help="atom count (single value)")
    p.add_argument("--t-list", help="comma list of horizons")
    p.add_argument("--b-rule", help="budget rule: half-t or fixed:REAL")
    p.add_argument("--jobs", type=int, help="parallel workers (default 1, reproducible)")


def _parse_eps(raw):
    if raw is None:
        return None
    if isinstance(raw, str) and raw.strip().lower() == "auto":
        return "auto"
    val = float(raw)
    if not 0.0 <= val < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    return val


def _config_from(args) -> bench.ExperimentConfig:
    data: dict = {}
    if args.config:
        data.update(json.loads(Path(args.config).read_text()))
    if getattr(args, "env", None):
        data["envs"] = [e.strip() for e in args.env.split(",") if e.strip()]
    if getattr(args, "matroids", None):
        data["matroids"] = [m.strip() for m in args.matroids.split(",") if m.strip()]
    if getattr(args, "n", None) is not None:
        data["n_list"] = [args.n]
    if getattr(args, "t_list", None):
        data["t_list"] = [int(t) for t in args.t_list.split(",") if t.strip()]
    if getattr(args, "b_rule", None):
        data["b_rule"] = args.b_rule
    if getattr(args, "runs", None) is not None:
        data["runs"] = args.runs
    if getattr(args, "policies", None):
        data["policies"] = [p.strip() for p in args.policies.split(",") if p.strip()]
    if getattr(args, "alpha", None) is not None:
        data["alpha"] = args.alpha
    if getattr(args, "eps", None) is not None:
        data["eps"] = _parse_eps(args.eps)
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        data["jobs"] = args.jobs

    base = bench.ExperimentConfig()
    fields = {
        "envs": tuple,
        "matroids": tuple,
        "n_list": tuple,
        "t_list": tuple,
        "b_rule": str,
        "runs": int,
        "policies": tuple,
        "alpha": float,
        "eps": lambda v: v if v == "auto" else float(v),
        "seed": int,
        "k": int,
        "jobs": int,
    }
    kwargs = {}
    for name, conv in fields.items():
        if name in data:
            kwargs[name] = conv(data[name])
    cfg = bench.ExperimentConfig(**{**base.__dict__, **kwargs})
    for e in cfg.envs:
        if e not in bench.ENV_FAMILIES:
            raise ValueError(f"unknown environment {e!r}")
    for m in cfg.matroids:
        if m not in ("uniform", "partition"):
            raise ValueError(f"unknown matroid {m!r}")
    cfg.budget_for(1000)  # validates the rule string
    return cfg


def _check_auto_eps(cfg: bench.ExperimentConfig) -> None:
    """--eps auto must satisfy the budget precondition on every grid cell."""
    if cfg.eps != "auto":
        return
    for n in cfg.n_list:
        for T in cfg.t_list:
            B = cfg.budget_for(T)
            rep = theory_eps(cfg.alpha, n, B, T)
            if not rep.precondition_ok or not rep.usable:
                raise SystemExit2(
                    f"eps=auto precondition failed for n={n}, T={T}: "
                    f"need B > 3*(alpha*n + sqrt(alpha*n*T)) = {rep.threshold:.2f}, got B = {B:.2f}"
                )


class SystemExit2(Exception):
    pass


def _cmd_run(args) -> int:
    cfg = _config_from(args)
    _check_auto_eps(cfg)
    out = args.out or Path("results.csv")
    rows = bench.run_experiment(cfg, out_path=out)
    by_cell: dict[tuple, list[float]] = {}
    for r in rows:
        by_cell.setdefault((r.env, r.mode, r.matroid, r.policy, r.n, r.T), []).append(r.total_reward)
    print(f"wrote {len(rows)} rows to {out}")
    for key in sorted(by_cell):
        vals = by_cell[key]
        print(f"  {key}: mean total reward {np.mean(vals):.2f} over {len(vals)} runs")
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    # canonical grid; only --out/--seed/--t-list/--runs/--jobs are honored
    overrides = {}
    if args.t_list:
        overrides["t_list"] = tuple(int(t) for t in args.t_list.split(","))
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    cfg = bench.ExperimentConfig(**overrides)
    outdir = Path(args.out) if args.out else Path("results")
    outdir.mkdir(parents=True, exist_ok=True)
    rows = bench.run_experiment(cfg, out_path=outdir / "rewards.csv")
    trows, summaries = bench.timing_experiment(seed=cfg.seed)
    bench.write_timing_rows(trows, outdir / "timing.csv")
    print(f"wrote {len(rows)} reward rows and {len(trows)} timing rows under {outdir}")
    for s in summaries:
        print(f"  timing {s.policy} n={s.n}: median {s.median_us:.1f} us/step")
    return EXIT_OK


def _cmd_verify_lp(args) -> int:
    seed = args.seed if args.seed is not None else 0
    count = args.runs if args.runs is not None else 50
    failures = 0
    checked = 0
    for mu, cost, constraint, budget, horizon in bench.random_chain_instances(count, seed):
        for eps in (0.0, 0.1, 0.3):
            rep = bench.verify_relaxation_chain(mu, cost, constraint, budget, horizon, eps)
            checked += 1
            if not rep.ok:
                failures += 1
                print(f"FAIL chain eps={eps}: gaps={rep.gaps}")
    print(f"relaxation chain: {checked - failures}/{checked} checks passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAILED


def _cmd_verify_rounding(args) -> int:
    seed = args.seed if args.seed is not None else 0
    rng = np.random.default_rng(seed)
    failures = []

    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    import itertools

    for n in range(1, 4):
        for x in itertools.product(grid, repeat=n):
            cap = math.ceil(sum(x)) if sum(x) > 0 else 0
            constraint = MatroidConstraint.uniform(n, max(cap, 0))
            dist = exhaustive_distribution(np.array(x), constraint)
            if not verify_negative_correlation(dist):
                failures.append(("neg-corr", x))
    print(f"exhaustive negative correlation: {'ok' if not failures else failures}")

    for _ in range(20):
        n = int(rng.integers(2, 5))
        x = rng.random(n)
        cap = int(np.ceil(x.sum()))
        constraint = MatroidConstraint.uniform(n, cap)
        dist = exhaustive_distribution(x, constraint)
        lam = rng.random(n)
        if not verify_recentering_transform(dist, lam):
            failures.append(("recentering", tuple(x)))
    print("recentering transform: ok" if not failures else f"failures: {failures}")

    n = 12
    x = rng.random(n) * 0.9
    constraint = MatroidConstraint.uniform(n, int(np.ceil(x.sum())))
    draws = sample_actions(x, constraint, rng, size=20000)
    err = np.abs(draws.mean(axis=0) - x).max()
    tol = 4 * math.sqrt(0.25 / 20000) + 1e-6
    print(f"marginal exactness: max err {err:.4f} (tol {tol:.4f})")
    if err > tol:
        failures.append(("marginals", err))

    est = estimate_tail(20000, 20, 0.25, rng)
    bound = 3 * math.exp(-2 * 20 * 0.25**2)
    print(f"tail frequency {est.frequency:.5f} <= bound {bound:.5f}")
    if est.frequency > bound:
        failures.append(("tail", est.frequency))

    return EXIT_OK if not failures else EXIT_VERIFY_FAILED


def _cmd_timing(args) -> int:
    n_list = (6, 26, 52)
    if args.n is not None:
        n_list = (args.n,)
    rows, summaries = bench.timing_experiment(
        n_list=n_list,
        seed=args.seed if args.seed is not None else 0,
        alpha=args.alpha if args.alpha is not None else 5.0,
    )
    out = args.out or Path("timing.csv")
    bench.write_timing_rows(rows, out)
    print(f"wrote {len(rows)} timing rows to {out}")
    for s in summaries:
        print(f"  {s.policy} n={s.n}: median {s.median_us:.1f} us/step")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semibwk",
        description="Combinatorial semi-bandits with knapsacks: experiments and verification suites",
    )
    sub = parser.add_subparsers(dest="command")
    for name, fn, doc in (
        ("run", _cmd_run, "run an experiment grid"),
        ("verify-lp", _cmd_verify_lp, "brute-force LP relaxation-chain suite"),
        ("verify-rounding", _cmd_verify_rounding, "rounding property suite"),
        ("timing", _cmd_timing, "per-step running-time table"),
        ("reproduce-paper", _cmd_reproduce, "canonical benchmark grid with default settings"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_common(p)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if not getattr(args, "command", None):
        parser.print_usage()
        return EXIT_CONFIG
    try:
        return args.fn(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
