"""Command-line front end: generate, solve, validate, export-lp, experiment.

Exit codes: 0 success, 1 infeasible (or a non-empty violation report),
2 usage or input error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import traceback
from pathlib import Path

from . import jsonio
from .harness import SUITES, ExperimentConfig, run_experiment, write_outputs
from .lp import export_lp
from .model import assemble_problem, check_solution, solution_from_json, solution_json
from .scenario import PROFILES, Scenario, ScenarioError, generate_scenario
from .solver import SolveStatus, SolverOptions, solve_exact

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

SEED_ENV = "ORCH_SEED"


class UsageError(Exception):
    pass


def k_paths_arg(text: str) -> int | None:
    if text.lower() in ("inf", "infinity", "all"):
        return None
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'inf', got {text!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("k-paths must be at least 1")
    return k


def positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return x


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uavorch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="write a seeded scenario JSON")
    p.add_argument("--seed", type=int, default=0, help=f"scenario seed (${SEED_ENV} overrides)")
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--uavs", type=int, default=None, help="fleet size (default: profile value)")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("solve", help="solve a scenario exactly and write a solution JSON")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--k-paths", type=k_paths_arg, default=8, help="candidate paths per pair, or 'inf'")
    p.add_argument("--time-limit", type=positive_float, default=60.0, help="seconds")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--no-timing", action="store_true", help="record wall_time_s as 0 for byte-stable output")

    p = sub.add_parser("validate", help="check a solution against every constraint")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--solution", required=True, type=Path)

    p = sub.add_parser("export-lp", help="write the full model in LP text format")
    p.add_argument("--scenario", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("experiment", help="run an evaluation sweep and write CSV tables")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--seeds", required=True, type=int, help="number of seeds, run as 0..N-1")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
    p.add_argument("--k-paths", type=k_paths_arg, default=8)
    p.add_argument("--time-limit", type=positive_float, default=60.0)
    p.add_argument("--no-timing", action="store_true")
    return parser


def _read_json(path: Path):
    try:
        return jsonio.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}")


def _load(path: Path):
    data = _read_json(path)
    try:
        return Scenario.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path} is not a valid scenario: {exc}")


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}")


def cmd_generate(args) -> int:
    seed = args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"${SEED_ENV} must be an integer, got {env!r}")
    overrides = {"seed": seed}
    if args.uavs is not None:
        overrides["uavs"] = args.uavs
    try:
        params = PROFILES[args.profile](**overrides)
        params.check()
    except (ScenarioError, ValueError) as exc:
        raise UsageError(str(exc))
    scenario = generate_scenario(params)
    _write(args.out, scenario.dumps())
    print(f"wrote {args.out}: {scenario.graph.num_nodes} nodes, {len(scenario.graph.links)} links, "
          f"{len(scenario.uavs)} uavs (seed {seed}, profile {args.profile})")
    return EXIT_OK


def cmd_solve(args) -> int:
    scenario = _load(args.scenario)
    opts = SolverOptions(time_limit=args.time_limit, k_paths=args.k_paths)
    problem = assemble_problem(scenario, opts.k_paths, strict=False)
    outcome = solve_exact(problem, opts)
    wall = 0.0 if args.no_timing else outcome.wall_time_s
    doc = solution_json(problem, outcome.solution, outcome.status.value, wall,
                        outcome.nodes_explored, outcome.witness)
    _write(args.out, jsonio.dumps(doc))
    if outcome.solution is None:
        if outcome.witness is not None:
            u, a = outcome.witness
            print(f"infeasible: uav {u} at access {a} has no QoS-feasible host (witness ({u}, {a}))")
        else:
            print(f"{outcome.status.value}: {outcome.reason}")
        return EXIT_INFEASIBLE
    print(f"{outcome.status.value}: objective {outcome.objective} "
          f"({outcome.nodes_explored} nodes, {outcome.wall_time_s:.3f} s)")
    return EXIT_OK


def cmd_validate(args) -> int:
    scenario = _load(args.scenario)
    data = _read_json(args.solution)
    try:
        solution = solution_from_json(scenario, data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.solution} is not a valid solution: {exc}")
    if solution is None:
        print(f"no solution to validate (status {data.get('status')})")
        return EXIT_INFEASIBLE
    report = check_solution(scenario, solution)
    if report:
        print(report.render())
        return EXIT_INFEASIBLE
    print("valid: no constraint violations")
    return EXIT_OK


def cmd_export_lp(args) -> int:
    scenario = _load(args.scenario)
    _write(args.out, export_lp(scenario))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    config = ExperimentConfig(
        suite=args.suite, seeds=tuple(range(args.seeds)), profile=args.profile,
        solver=SolverOptions(time_limit=args.time_limit, k_paths=args.k_paths),
        record_timing=not args.no_timing)
    rows = run_experiment(config)
    for path in write_outputs(rows, args.out_dir):
        print(f"wrote {path}")
    solved = sum(r.status == SolveStatus.OPTIMAL.value for r in rows)
    print(f"{solved}/{len(rows)} instances solved to optimality")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "validate": cmd_validate,
    "export-lp": cmd_export_lp,
    "experiment": cmd_experiment,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
