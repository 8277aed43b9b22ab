"""Command line interface.

Examples
--------
```sh
ergoalloc graph --sequential 20 --agents 2
ergoalloc plan --scenario corner_joint_fixed.json --format json
ergoalloc calibrate --scenario corner_joint_fixed.json --out profile.json
ergoalloc simulate --scenario corner_joint_fixed.json --repetitions 4 --calibrate-first
ergoalloc bench --family scarce --pieces 2 20 --time-budget 30
```

Exit codes are 0 on success, 1 on parse errors or infeasible
assemblies, 2 on missing prerequisites and 3 when a calibration does
not converge.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ergoalloc.allocation import (
    BaselineRulaPolicy,
    baseline_rula_allocate,
    run_collaboration,
)
from ergoalloc.analysis import BenchConfig, run_bench, trend_report, write_bench_csv
from ergoalloc.core import (
    AndOrGraph,
    CalibrationMissingError,
    CollaborationAborted,
    InfeasibleAssemblyError,
    InsufficientExecutionsError,
    NoFeasiblePlanError,
    Scenario,
    TrajectoryError,
    build_scarce,
    build_sequential,
    load_scenario,
    resolve_scenario,
    set_cost,
)
from ergoalloc.kwear import CalibrationProfile, KWearLog
from ergoalloc.search import ao_star
from ergoalloc.sim import TrajectorySource, calibrate_scenario
from ergoalloc.utils import get_output_dir, read_json, write_csv, write_json

__all__ = ["EXIT_OK", "EXIT_INVALID", "EXIT_MISSING", "EXIT_NOT_CONVERGED", "main"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISSING = 2
EXIT_NOT_CONVERGED = 3

SCHEMA = 1


class CommandError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def cmd_plan(args: argparse.Namespace) -> int:
    """Search one plan from all pieces separated, print it."""
    try:
        graph, _ = load_scenario(resolve_scenario(args.scenario))
    except InfeasibleAssemblyError as e:
        raise NoFeasiblePlanError(str(e)) from e

    if args.costs is None:
        graph.set_costs([1.0] * graph.number_of_arcs())
    else:
        _load_costs(graph, args.costs)

    plan = ao_star(graph)
    match args.format:
        case "json":
            print(json.dumps(plan.to_dict(graph), indent=2))
        case "csv":
            df = pd.DataFrame(plan.records(graph)).drop(columns=["parts"])
            _print_csv(df)
        case _:
            print(plan.to_text(graph))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    """Run the dynamic allocation and write its trace files."""
    graph, scenario = _load(args)
    source = TrajectorySource(scenario)
    out = get_output_dir(args.out)

    if args.calibrate_first:
        profile, results = calibrate_scenario(
            scenario, args.eta0, args.eta_max, args.err_target, source=source
        )
        if not all(r.converged for r in results):
            logging.warning("simulating with non-converged calibration")
        profile.to_json(os.path.join(out, "profile.json"))
    elif args.profile is None:
        raise CommandError(
            "no calibration profile, run `ergoalloc calibrate` first "
            "or pass --calibrate-first",
            EXIT_MISSING,
        )
    elif not os.path.isfile(args.profile):
        raise CommandError(
            f"calibration profile not found: {args.profile}, "
            "run `ergoalloc calibrate` to create it",
            EXIT_MISSING,
        )
    else:
        profile = CalibrationProfile.from_json(args.profile)

    log = KWearLog()
    try:
        trace = run_collaboration(
            scenario, args.repetitions, profile, graph=graph, log=log, source=source
        )
    except CollaborationAborted as e:
        if e.trace is not None:
            e.trace.to_csv(os.path.join(out, "trace.csv"))
        raise

    trace.to_csv(os.path.join(out, "trace.csv"))
    trace.timing_to_csv(os.path.join(out, "timing.csv"))
    write_csv(log.to_data_frame(), os.path.join(out, "kwear.csv"), schema=SCHEMA)

    summary = trace.summary()
    if len(scenario.baseline_scores) > 0:
        policy = BaselineRulaPolicy.from_scenario(scenario)
        summary["baseline"] = {
            "g_th": policy.g_th,
            "allocation": baseline_rula_allocate(
                policy, scenario.action_labels, scenario.workers
            ),
        }
    write_json(summary, os.path.join(out, "summary.json"))

    logging.info("simulation written to `%s`", out)
    print(
        f"{len(trace)} action(s) over {args.repetitions} repetition(s), "
        f"robot {summary['robot_percent']:.1f}%"
    )
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    """Calibrate every human action and write the profile."""
    _, scenario = _load(args)
    try:
        profile, results = calibrate_scenario(
            scenario, args.eta0, args.eta_max, args.err_target
        )
    except InsufficientExecutionsError as e:
        raise CommandError(str(e), EXIT_MISSING) from e

    fname = args.out or os.path.join(get_output_dir(), "profile.json")
    profile.to_json(fname)

    failed = [r for r in results if not r.converged]
    for r in results:
        status = "ok" if r.converged else "NOT CONVERGED"
        print(f"{r.action:<16} eta={r.eta:<3} max error={r.max_error:.3g}  {status}")

    if len(failed) > 0:
        print(
            f"{len(failed)} action(s) did not reach error {args.err_target:g}: "
            + ", ".join(f"{r.action} ({r.max_error:.3g})" for r in failed),
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    """Sweep generated assemblies and fit complexity trends."""
    cfg = BenchConfig(
        family=args.family,
        pieces=tuple(args.pieces),
        agents=tuple(args.agents),
        sweep_agents=args.sweep_agents,
        agents_pieces=args.agents_pieces,
        seeds=args.seeds,
        time_budget=args.time_budget,
        seed=args.seed,
        jobs=args.jobs,
        sweeps=tuple(args.sweep),
    )
    df = run_bench(cfg, verbose=args.verbose > 0)
    out = get_output_dir(args.out)
    write_bench_csv(df, os.path.join(out, "bench.csv"))
    report = trend_report(df)
    write_json(report, os.path.join(out, "trends.json"))

    match args.format:
        case "json":
            print(json.dumps(report, indent=2, sort_keys=True))
        case "csv":
            _print_csv(df)
        case _:
            print(df.to_string(index=False))
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    """Print node and hyper-arc counts, optionally export DOT."""
    if args.scenario is not None:
        graph, _ = load_scenario(resolve_scenario(args.scenario))
    elif args.sequential is not None:
        graph = build_sequential(args.sequential, args.agents)
    elif args.scarce is not None:
        graph = build_scarce(args.scarce, args.agents)
    else:
        raise CommandError(
            "one of --scenario, --sequential or --scarce is required", EXIT_INVALID
        )

    if args.format == "json":
        print(json.dumps(_graph_stats(graph), indent=2))
    else:
        print(f"nodes: {graph.number_of_nodes()}, arcs: {graph.number_of_arcs()}")

    if args.dot is not None:
        graph.to_dot().write_raw(args.dot)
        logging.info("graph written to `%s`", args.dot)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergoalloc",
        description="Dynamic ergonomic role allocation for human-robot assembly",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    subparsers = parser.add_subparsers(required=True)

    sub = subparsers.add_parser("plan", help="search one allocation plan")
    _add_scenario(sub, required=True)
    sub.add_argument("--costs", type=str, default=None, help="JSON cost file")
    _add_format(sub)
    sub.set_defaults(func=cmd_plan)

    sub = subparsers.add_parser("simulate", help="simulate the collaboration")
    _add_scenario(sub, required=True)
    sub.add_argument("--repetitions", type=int, default=4)
    sub.add_argument("--profile", type=str, default=None)
    sub.add_argument("--calibrate-first", action="store_true")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", type=str, default=None)
    _add_calibration(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subparsers.add_parser("calibrate", help="calibrate the wear prediction")
    _add_scenario(sub, required=True)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", type=str, default=None, help="profile file")
    _add_calibration(sub)
    sub.set_defaults(func=cmd_calibrate)

    sub = subparsers.add_parser("bench", help="search complexity sweep")
    sub.add_argument(
        "--family", choices=["sequential", "scarce", "both"], default="both"
    )
    sub.add_argument("--pieces", type=int, nargs=2, default=[2, 20])
    sub.add_argument("--agents", type=int, nargs=2, default=[2, 30])
    sub.add_argument("--sweep-agents", type=int, default=2)
    sub.add_argument("--agents-pieces", type=int, default=10)
    sub.add_argument(
        "--sweep", choices=["pieces", "agents"], nargs="+", default=["pieces", "agents"]
    )
    sub.add_argument("--seeds", type=int, default=3)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--time-budget", type=float, default=30.0)
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--out", type=str, default=None)
    _add_format(sub)
    sub.set_defaults(func=cmd_bench)

    sub = subparsers.add_parser("graph", help="inspect an AND/OR graph")
    _add_scenario(sub, required=False)
    sub.add_argument("--sequential", type=int, default=None, metavar="N")
    sub.add_argument("--scarce", type=int, default=None, metavar="N")
    sub.add_argument("--agents", type=int, default=2, metavar="K")
    sub.add_argument("--dot", type=str, default=None, help="DOT output file")
    _add_format(sub)
    sub.set_defaults(func=cmd_graph)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    try:
        return args.func(args)
    except CommandError as e:
        return _fail(str(e), e.code)
    except (
        CalibrationMissingError,
        InsufficientExecutionsError,
        TrajectoryError,
        FileNotFoundError,
    ) as e:
        return _fail(str(e), EXIT_MISSING)
    except NoFeasiblePlanError as e:
        return _fail(f"no feasible plan: {e}", EXIT_INVALID)
    except CollaborationAborted as e:
        return _fail(f"collaboration aborted: {e}", EXIT_INVALID)
    except ValueError as e:  # scenario, assembly and profile errors
        return _fail(str(e), EXIT_INVALID)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(args: argparse.Namespace) -> tuple[AndOrGraph, Scenario]:
    graph, scenario = load_scenario(resolve_scenario(args.scenario))
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    return graph, scenario


def _load_costs(graph: AndOrGraph, fname: str) -> None:
    """Apply a cost file, `{"costs": [{"action", "agent", "cost"}, ...]}`.

    Arcs not listed keep a unit cost.
    """
    graph.set_costs([1.0] * graph.number_of_arcs())
    try:
        entries: List[Dict[str, Any]] = read_json(fname)["costs"]
        for e in entries:
            set_cost(graph, e["action"], e["agent"], float(e["cost"]))
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise ValueError(f"fails to read cost file: {fname}") from e


def _graph_stats(graph: AndOrGraph) -> Dict[str, Any]:
    return {
        "schema": SCHEMA,
        "source": graph.source,
        "pieces": graph.n_pieces,
        "agents": len(graph.workers),
        "nodes": graph.number_of_nodes(),
        "arcs": graph.number_of_arcs(),
        "pruned": int(graph.pruned.sum()),
        "topology": graph.topology_hash(),
    }


def _add_scenario(sub: argparse.ArgumentParser, *, required: bool) -> None:
    sub.add_argument(
        "--scenario", type=str, required=required, help="file or shipped scenario name"
    )


def _add_format(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=["text", "json", "csv"], default="text")


def _add_calibration(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eta0", type=int, default=3)
    sub.add_argument("--eta-max", type=int, default=10)
    sub.add_argument("--err-target", type=float, default=1e-3)


def _print_csv(df: pd.DataFrame) -> None:
    write_csv(df, sys.stdout, schema=SCHEMA, float_format="%.6g")
