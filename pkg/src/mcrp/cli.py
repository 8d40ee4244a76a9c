"""Command line: ``mcrp {gen,solve,evaluate,export-lp,report} ...``.

Exit status is 0 on success, 1 for invalid or infeasible input and 2 for
internal errors. Diagnostics go to stderr; results go to files only.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .errors import McrpError
from .model import (
    build_instance,
    check_feasibility,
    objective,
    plan_delta_v,
    stage_objectives,
)
from .scenario import InstanceRecipe, emit_report, generate_random_config, harvey_config
from .serialization import deserialize_instance, deserialize_plan, serialize_instance, serialize_plan
from .solvers import METHODS, SolveReport, dumps_report, export_lp, loads_report, solve, upper_bound
from .solvers.metrics import duality_gap


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mcrp", description="Multi-stage constellation reconfiguration planner.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--preset", choices=("static", "dynamic", "harvey"), required=True)
    g.add_argument("--out", required=True, help="instance file to write")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--J", type=int, default=50, help="phase slots per satellite (random presets)")
    g.add_argument("--N", "--stages", dest="N", type=int, default=None, help="number of stages")
    g.add_argument("--K", type=int, default=3, help="number of satellites (random presets)")
    g.add_argument("--T", type=int, default=4320, help="time steps (random presets)")
    g.add_argument("--P", type=int, default=10, help="targets (random presets)")
    g.add_argument("--step-seconds", type=float, default=100.0)
    g.add_argument("--plane-steps", type=int, default=4, help="plane offsets per side (harvey)")
    g.add_argument("--phase-count", type=int, default=24, help="phase slots (harvey)")

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--out", required=True, help="directory for plan.json and report.json")
    s.add_argument("--method", choices=METHODS, required=True)
    s.add_argument("--lookahead", type=int, default=None)
    s.add_argument("--time-limit", type=float, default=None, help="seconds per solve (per subproblem for mp/rhp)")
    s.add_argument("--gap-tol", type=float, default=0.0)
    s.add_argument("--threads", type=int, default=1, help="workers for visibility and cost tables")

    e = sub.add_parser("evaluate", help="evaluate a plan against an instance")
    e.add_argument("--instance", required=True)
    e.add_argument("--plan", required=True)
    e.add_argument("--out", required=True, help="report file to write")
    e.add_argument("--threads", type=int, default=1)

    x = sub.add_parser("export-lp", help="write the integer program in LP format")
    x.add_argument("--instance", required=True)
    x.add_argument("--out", required=True)
    x.add_argument("--threads", type=int, default=1)

    r = sub.add_parser("report", help="tabulate solve reports")
    r.add_argument("--instance", required=True)
    r.add_argument("--reports", nargs="+", required=True)
    r.add_argument("--out", required=True, help="directory for summary.csv and series.csv")
    r.add_argument("--intervals", type=int, default=None)
    r.add_argument("--threads", type=int, default=1)
    return p


def _load_instance(path: str, threads: int):
    return build_instance(deserialize_instance(Path(path).read_text()), workers=threads)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _gen(args):
    if args.preset == "harvey":
        config = harvey_config(
            args.N or 1,
            step_seconds=args.step_seconds,
            plane_steps=args.plane_steps,
            phase_count=args.phase_count,
        )
    else:
        recipe = InstanceRecipe(
            family=args.preset,
            J=args.J,
            N=args.N or 3,
            K=args.K,
            seed=args.seed,
            T=args.T,
            P=args.P,
            step_seconds=args.step_seconds,
        )
        config = generate_random_config(recipe)
    _write(Path(args.out), serialize_instance(config))


def _solve(args):
    if args.method == "rhp" and args.lookahead is None:
        raise UsageError("mcrp solve: --method rhp requires --lookahead")
    instance = _load_instance(args.instance, args.threads)
    report = solve(instance, args.method, args.lookahead, args.time_limit, args.gap_tol)
    out = Path(args.out)
    if report.plan is not None:
        _write(out / "plan.json", serialize_plan(report.plan, instance))
    _write(out / "report.json", dumps_report(report))
    if report.timed_out:
        print(f"time limit reached; best bound {report.best_bound}", file=sys.stderr)


def _evaluate(args):
    instance = _load_instance(args.instance, args.threads)
    plan = deserialize_plan(Path(args.plan).read_text())
    violations = check_feasibility(plan, instance)
    if any(v.kind != "budget" for v in violations):
        for v in violations:
            print(v.message, file=sys.stderr)
        return 1
    z = objective(plan, instance)
    ub = upper_bound(instance)
    report = SolveReport(
        method="evaluate",
        objective=z,
        plan=plan,
        best_bound=ub.value,
        duality_gap=duality_gap(ub.value, z),
        stage_objectives=tuple(stage_objectives(plan, instance)),
        runtime=0.0,
        upper_bound=ub,
        instance_digest=instance.digest,
        extra={"per_satellite_delta_v": plan_delta_v(plan, instance)},
    )
    _write(Path(args.out), dumps_report(report))
    for v in violations:
        print(f"infeasible: {v.message}", file=sys.stderr)
    return 1 if violations else 0


def _export(args):
    instance = _load_instance(args.instance, args.threads)
    _write(Path(args.out), export_lp(instance))


def _report(args):
    instance = _load_instance(args.instance, args.threads)
    reports = [loads_report(Path(p).read_text()) for p in args.reports]
    summary, series = emit_report(reports, instance, args.intervals)
    out = Path(args.out)
    _write(out / "summary.csv", summary)
    _write(out / "series.csv", series)


COMMANDS = {"gen": _gen, "solve": _solve, "evaluate": _evaluate, "export-lp": _export, "report": _report}


def run(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        return COMMANDS[args.command](args) or 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (McrpError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"mcrp: error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001
        traceback.print_exc(file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
