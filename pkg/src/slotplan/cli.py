"""Command-line entry points.

Five subcommands: `solve` a problem file, `generate` an instance from
parameters, `bench` a strategy sweep, `check` (and optionally repair) a
schedule against its problem, and `serve` the live session API.  Exit codes:
0 success, 1 runtime failure with a diagnostic on stderr, 2 usage.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .bench import load_bench_config, run_experiment
from .feasibility import check_schedule
from .generator import GenerationError, generate
from .model import ModelError
from .serialize import (
    FormatError,
    UnsoundScheduleError,
    load_genparams,
    load_problem,
    load_schedule,
    load_weights,
    save_problem,
    save_schedule,
)
from .session import repair_schedule
from .solver import HeuristicWeights, SolverError, SolverState, Strategy, solve


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slotplan",
        description="Interactive timetabling: sound-at-every-step forward search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="schedule a problem file")
    p_solve.add_argument("problem", type=Path)
    p_solve.add_argument("--weights", type=Path, help="weights document")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--max-iter", type=int, dest="max_iter")
    p_solve.add_argument("--strategy", choices=[s.value for s in Strategy])
    p_solve.add_argument("--out", type=Path, help="write the schedule document here")
    snap = p_solve.add_mutually_exclusive_group()
    snap.add_argument("--best", action="store_true", help="emit the best snapshot (default)")
    snap.add_argument("--latest", action="store_true", help="emit the final schedule instead")

    p_gen = sub.add_parser("generate", help="emit a random feasible instance")
    p_gen.add_argument("params", type=Path, help="generator parameter document")
    p_gen.add_argument("--out", type=Path, required=True)
    p_gen.add_argument("--witness", type=Path, help="also write the witness schedule here")

    p_bench = sub.add_parser("bench", help="run a strategy sweep")
    p_bench.add_argument("config", type=Path, help="sweep configuration document")
    p_bench.add_argument("--out", type=Path, required=True, help="write the CSV table here")
    p_bench.add_argument("--chart", type=Path, help="also render a chart image here")

    p_check = sub.add_parser("check", help="audit a schedule against its problem")
    p_check.add_argument("problem", type=Path)
    p_check.add_argument("schedule", type=Path)
    p_check.add_argument("--repair", action="store_true", help="detach offenders instead of failing")
    p_check.add_argument("--out", type=Path, help="with --repair, write the repaired schedule here")

    p_serve = sub.add_parser("serve", help="host the live session API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--port", type=int, default=int(os.environ.get("SLOTPLAN_PORT", "8000"))
    )
    p_serve.add_argument(
        "--session-ttl",
        type=float,
        default=float(os.environ.get("SLOTPLAN_SESSION_TTL", "600")),
        help="seconds an idle session survives for reattachment",
    )
    return parser


def _cmd_solve(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem.read_bytes())
    weights = load_weights(args.weights.read_bytes()) if args.weights else HeuristicWeights()
    overrides = {}
    if args.max_iter is not None:
        overrides["max_iterations"] = args.max_iter
    if args.strategy is not None:
        overrides["strategy"] = Strategy(args.strategy)
    if overrides:
        weights = replace(weights, **overrides)
    state = SolverState(problem, weights=weights, seed=args.seed)
    solve(state)
    if args.latest:
        schedule, label = state.schedule, "latest"
    else:
        schedule, label = state.best.to_schedule(), "best"
    if args.out:
        args.out.write_bytes(save_schedule(problem, schedule))
    n = len(problem.activities)
    print(
        f"{label}: {len(schedule.assignment)}/{n} activities scheduled "
        f"in {state.iteration} iteration(s)"
    )
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    params = load_genparams(args.params.read_bytes())
    problem, witness = generate(params)
    args.out.write_bytes(save_problem(problem))
    if args.witness:
        args.witness.write_bytes(save_schedule(problem, witness))
    grid = problem.grid
    print(
        f"{len(problem.activities)} activities on a "
        f"{grid.days}x{grid.slots_per_day} grid -> {args.out}"
    )
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    config = load_bench_config(args.config.read_bytes())
    result = run_experiment(config)
    with open(args.out, "w", newline="") as out:
        result.write_csv(out)
    if args.chart:
        result.render_chart(str(args.chart))
    print(f"{len(result.runs)} run(s), {len(result.aggregates)} cell(s) -> {args.out}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    problem = load_problem(args.problem.read_bytes())
    schedule = load_schedule(args.schedule.read_bytes(), problem, allow_unsound=True)
    violations = check_schedule(problem, schedule)
    if not violations:
        print(f"schedule is sound ({len(schedule.assignment)} assignment(s))")
        return 0
    for v in violations:
        print(f"violation[{v.kind}]: {v.detail}")
    if not args.repair:
        print(f"{len(violations)} violation(s)", file=sys.stderr)
        return 1
    repaired, detached = repair_schedule(problem, schedule)
    print(f"repair detached {len(detached)} activity(ies): {', '.join(sorted(detached))}")
    if args.out:
        args.out.write_bytes(save_schedule(problem, repaired))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_service

    run_service(host=args.host, port=args.port, session_ttl=args.session_ttl)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "generate": _cmd_generate,
    "bench": _cmd_bench,
    "check": _cmd_check,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, UnsoundScheduleError, ModelError, GenerationError, SolverError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
