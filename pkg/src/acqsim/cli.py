"""Command-line surface: generate graphs, run/verify schedules, invoke the
oracles and analyzers, and run scaling sweeps.

Exit codes: 0 success, 1 verified failure (e.g. a schedule that leaves pairs
unacquainted), 2 usage error.  All outputs embed the effective configuration
so any file can be regenerated from itself.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bounds import SweepConfig, pm_probability, radius_for_regime, scaling_experiment
from .errors import AcqsimError
from .geometry import GeometricGraph, build_rgg, percolate, sample_points
from .process import brute_force_ac, run_schedule, trivial_lower_bound
from .schedule import Schedule

__all__ = ["main", "run"]


def _add_graph_source(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, help="number of points")
    p.add_argument("--r", type=float, help="radius (exclusive with --regime)")
    p.add_argument("--regime", choices=["dense", "sparse", "percolated"],
                   help="radius shorthand (exclusive with --r)")
    p.add_argument("--K", type=float, default=100.0, help="regime constant")
    p.add_argument("--p", type=float, default=1.0, help="edge retention probability")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", type=str, help="read the graph from a JSON file instead")


def _resolve_graph(args) -> GeometricGraph:
    if args.graph:
        return GeometricGraph.from_json(Path(args.graph).read_text())
    if args.n is None:
        raise SystemExit2("--n (or --graph) is required")
    if (args.r is None) == (args.regime is None):
        raise SystemExit2("provide exactly one of --r / --regime")
    r = args.r if args.r is not None else radius_for_regime(
        args.regime, args.n, K=args.K, p=args.p)
    g = build_rgg(sample_points(args.n, args.seed), r)
    if args.p < 1.0:
        g = percolate(g, args.p, args.seed)
    return g


class SystemExit2(Exception):
    """Usage error: maps to exit code 2."""


def _config_echo(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func" and v is not None}


def _cmd_gen(args) -> int:
    g = _resolve_graph(args)
    text = g.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def _cmd_simulate(args) -> int:
    g = _resolve_graph(args)
    schedule = Schedule.from_json(Path(args.schedule).read_text())
    result = run_schedule(g, schedule, engine=args.engine)
    payload = result.to_dict()
    payload["config"] = _config_echo(args)
    print(json.dumps(payload, sort_keys=True))
    return 0 if result.all_acquainted else 1


def _cmd_bruteforce(args) -> int:
    g = _resolve_graph(args)
    value = brute_force_ac(g, round_cap=args.cap)
    print(value)
    return 0


def _cmd_strategy(args) -> int:
    from .strategies import dense_schedule, percolated_schedule, sparse_schedule

    g = _resolve_graph(args)
    if args.name == "dense":
        report = dense_schedule(g, c_cell=args.c_cell)
    elif args.name == "percolated":
        report = percolated_schedule(g, k=args.k, seed=args.seed, c_cell=args.c_cell)
    elif args.name == "sparse":
        report = sparse_schedule(g, eta=args.eta, delta=args.delta,
                                 separation_factor=args.separation,
                                 class_frac=args.class_frac)
    else:
        raise SystemExit2(f"unknown strategy {args.name!r}")
    payload = report.to_dict()
    payload["lower_bound"] = trivial_lower_bound(g)
    payload["config"] = _config_echo(args)
    if args.out:
        Path(args.out).write_text(report.schedule.to_json())
        payload["schedule_file"] = args.out
    print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_structure(args) -> int:
    from .structure import analyze

    g = _resolve_graph(args)
    analysis = analyze(g, eta=args.eta, delta=args.delta,
                       separation_factor=args.separation, rule=args.rule)
    payload = analysis.to_dict()
    payload["config"] = _config_echo(args)
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    ns = [int(x) for x in args.ns.split(",") if x]
    cfg = SweepConfig(regime=args.regime, ns=ns, seeds=args.seeds, K=args.K,
                      p=args.p, c_cell=args.c_cell, k=args.k)
    def progress(rec):
        status = "ok" if rec.all_acquainted else f"FAIL {rec.error}"
        print(f"n={rec.n} seed={rec.seed} rounds={rec.rounds} "
              f"ratio={rec.ratio:.3f} [{status}]", file=sys.stderr)
    records = scaling_experiment(cfg, out_path=args.out, progress=progress)
    bad = [rec for rec in records if not rec.all_acquainted]
    print(json.dumps({"rows": len(records), "failures": len(bad),
                      "out": args.out, "config": _config_echo(args)}, sort_keys=True))
    return 0 if not bad else 1


def _cmd_pmprob(args) -> int:
    est, (lo, hi), wins = pm_probability(args.t, args.p, args.trials, seed=args.seed)
    print(json.dumps({"t": args.t, "p": args.p, "trials": args.trials,
                      "estimate": est, "wilson95": [lo, hi], "successes": wins,
                      "config": _config_echo(args)}, sort_keys=True))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="acqsim",
                                  description="acquaintance-time simulation lab")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a (percolated) geometric graph as JSON")
    _add_graph_source(p)
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("simulate", help="replay a schedule against a graph")
    _add_graph_source(p)
    p.add_argument("--schedule", required=True, type=str)
    p.add_argument("--engine", default="auto", choices=["auto", "exact", "structured"])
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bruteforce", help="exact acquaintance time (n <= 7)")
    _add_graph_source(p)
    p.add_argument("--cap", type=int, default=None)
    p.set_defaults(func=_cmd_bruteforce)

    p = sub.add_parser("strategy", help="compile and verify a named strategy")
    _add_graph_source(p)
    p.add_argument("--name", required=True, choices=["dense", "percolated", "sparse"])
    p.add_argument("--c-cell", dest="c_cell", type=float, default=3.0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--class-frac", dest="class_frac", type=float, default=1.0)
    p.add_argument("--out", type=str, help="write the schedule JSON here")
    p.set_defaults(func=_cmd_strategy)

    p = sub.add_parser("structure", help="structural analysis as JSON")
    _add_graph_source(p)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--rule", default="touching8", choices=["touching8", "corner_rule"])
    p.add_argument("--out", type=str)
    p.set_defaults(func=_cmd_structure)

    p = sub.add_parser("sweep", help="scaling sweep to CSV")
    p.add_argument("--regime", required=True, choices=["dense", "percolated"])
    p.add_argument("--ns", required=True, type=str, help="comma-separated sizes")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--K", type=float, default=100.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--c-cell", dest="c_cell", type=float, default=3.0)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", required=True, type=str)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("pmprob", help="perfect-matching probability estimate")
    p.add_argument("--t", required=True, type=int)
    p.add_argument("--p", required=True, type=float)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_pmprob)
    return top


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SystemExit2 as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except AcqsimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
