"""Command-line front end.

Exit codes: 0 success, 2 usage or config error, 3 simulation rejected,
4 result does not match the expected values.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence, TextIO

from .analysis import check_invariants, consensus_time
from .config import ConfigError, RunConfig, format_config, graph_spec, parse_config, resolve_graph
from .engine import SimulationError, communication_cost, run, write_event_csv, write_trajectory_csv
from .graph import fig6_graph, random_connected_graph
from .protocol import ProtocolParams, t_star
from .worstcase import build_instance, verify_tightness

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REJECTED = 3
EXIT_MISMATCH = 4

FIG6_X0 = (7.0, 2.0, 4.0, 3.0, 1.0, 5.0)
TABLE_COSTS = [8, 9, 30, 30, 9, 9]
TABLE_TOTAL = 95
# gamma -> (expected consensus time, tolerance)
TABLE_TIMES = {1: (2.26, 0.01), 5: (11.3, 0.05), 10: (22.6, 0.1)}


def cmd_run(cfg: RunConfig, base_dir: Path | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        g = resolve_graph(cfg.graph, base_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if len(cfg.x0) != g.n:
        print(f"error: x0 has {len(cfg.x0)} entries but graph has {g.n} nodes", file=sys.stderr)
        return EXIT_USAGE
    try:
        result = run(g, cfg.x0, cfg.params, cfg.horizon)
    except SimulationError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_REJECTED

    report = consensus_time(result)
    costs, total = communication_cost(result, result.horizon)
    shown = "not_achieved" if report.consensus_time is None else f"{report.consensus_time:.6g}"
    print(f"n={g.n}", file=out)
    print(f"t_star={t_star(cfg.x0, cfg.beta):.6g}", file=out)
    print(f"horizon={result.horizon:.6g}", file=out)
    print(f"consensus_time={shown}", file=out)
    for i, c in enumerate(costs, start=1):
        print(f"C_{i}={c}", file=out)
    print(f"C_MAS={total}", file=out)
    print(f"bound_2gT={report.bound:.6g}", file=out)
    print(f"bound_satisfied={'true' if report.satisfied else 'false'}", file=out)

    if cfg.trajectories:
        write_trajectory_csv(result, cfg.trajectories)
    if cfg.events:
        write_event_csv(result, cfg.events)
    return EXIT_OK


def cmd_table(alpha: float = 0.6, out: TextIO | None = None) -> int:
    """Reproduce the six-agent reference cost/time table for gamma in {1, 5, 10}."""
    out = out or sys.stdout
    params_list = [ProtocolParams(alpha=alpha, beta=1.0, gamma=float(gm)) for gm in TABLE_TIMES]
    header = f"{'T(X0)':<8}{'consensus_time':>16}" + "".join(f"{f'C{i}':>5}" for i in range(1, 7))
    header += f"{'C_MAS':>7}"
    print(header, file=out)
    problems = []
    for (gm, (expected, tol)), params in zip(TABLE_TIMES.items(), params_list):
        result = run(fig6_graph(), FIG6_X0, params)
        report = consensus_time(result)
        costs, total = communication_cost(result, result.horizon)
        ct = report.consensus_time
        shown = "n/a" if ct is None else f"{ct:.4f}"
        row = f"{f'{2 * gm}T*':<8}{shown:>16}" + "".join(f"{c:>5}" for c in costs) + f"{total:>7}"
        print(row, file=out)
        if costs != TABLE_COSTS or total != TABLE_TOTAL:
            problems.append(f"gamma={gm}: costs {costs}/{total} != {TABLE_COSTS}/{TABLE_TOTAL}")
        if ct is None or abs(ct - expected) > tol:
            problems.append(f"gamma={gm}: consensus time {shown} != {expected} +/- {tol}")
    if problems:
        for p in problems:
            print(f"mismatch: {p}", file=out)
        return EXIT_MISMATCH
    return EXIT_OK


def verify_instance(rng: random.Random, max_n: int):
    n = rng.randint(2, max_n)
    g = random_connected_graph(n, rng)
    x0 = tuple(rng.uniform(-10.0, 10.0) for _ in range(n))
    params = ProtocolParams(
        alpha=rng.uniform(0.1, 3.0),
        beta=rng.uniform(0.5, 2.0),
        gamma=float(rng.choice([1, 2, 5])),
    )
    return g, x0, params


def cmd_verify(count: int, max_n: int, seed: int, out: TextIO | None = None) -> int:
    """Random connected instances; every run must pass the invariant suite and deadline."""
    out = out or sys.stdout
    if count < 1 or max_n < 2:
        print("error: need --count >= 1 and --max-n >= 2", file=sys.stderr)
        return EXIT_USAGE
    rng = random.Random(seed)
    worst_ratio = 0.0
    for index in range(count):
        g, x0, params = verify_instance(rng, max_n)
        result = run(g, x0, params)
        invariants = check_invariants(result)
        report = consensus_time(result)
        if report.bound > 0 and report.consensus_time is not None:
            worst_ratio = max(worst_ratio, report.consensus_time / report.bound)
        if not (invariants.all_passed and report.satisfied):
            print(f"instance {index} failed", file=out)
            for line in invariants.to_lines() + report.to_lines():
                print(line, file=out)
            cfg = RunConfig(
                graph=graph_spec(g), x0=x0, alpha=params.alpha, beta=params.beta,
                gamma=params.gamma, seed=seed,
            )
            print("# reproducer config", file=out)
            print(format_config(cfg), end="", file=out)
            return EXIT_MISMATCH
    print(f"verified={count} max_n={max_n} seed={seed} worst_time_over_bound={worst_ratio:.6f}", file=out)
    return EXIT_OK


def cmd_worstcase(epsilon: float, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        instance = build_instance(epsilon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcome = verify_tightness(instance)
    shown = "not_achieved" if outcome.consensus_time is None else f"{outcome.consensus_time:.6g}"
    print(f"epsilon={epsilon:g} n={instance.n} r={instance.r}", file=out)
    print(f"consensus_time={shown}", file=out)
    print(f"bracket=[{outcome.lower:.6g}, {outcome.upper:.6g}]", file=out)
    print(f"in_bracket={'true' if outcome.passed else 'false'}", file=out)
    return EXIT_OK if outcome.passed else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphacons", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one configuration")
    p_run.add_argument("config", help="key = value configuration file")
    p_run.add_argument("--trajectories", help="write trajectory CSV here")
    p_run.add_argument("--events", help="write event-log CSV here")

    p_table = sub.add_parser("table", help="reproduce the six-agent reference cost/time table")
    p_table.add_argument("--alpha", type=float, default=0.6, help=argparse.SUPPRESS)

    p_verify = sub.add_parser("verify", help="randomized invariant and deadline checks")
    p_verify.add_argument("--count", type=int, default=100)
    p_verify.add_argument("--max-n", type=int, default=10)
    p_verify.add_argument("--seed", type=int, default=0)

    p_worst = sub.add_parser("worstcase", help="check the near-tight hub-plus-clique instance")
    p_worst.add_argument("--epsilon", type=float, required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        path = Path(args.config)
        try:
            cfg = parse_config(path.read_text())
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ConfigError as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        overrides = {k: getattr(args, k) for k in ("trajectories", "events") if getattr(args, k)}
        if overrides:
            cfg = replace(cfg, **overrides)
        return cmd_run(cfg, base_dir=path.parent)
    if args.command == "table":
        return cmd_table(alpha=args.alpha)
    if args.command == "verify":
        return cmd_verify(args.count, args.max_n, args.seed)
    return cmd_worstcase(args.epsilon)


if __name__ == "__main__":
    sys.exit(main())
