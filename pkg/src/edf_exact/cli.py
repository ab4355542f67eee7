"""``edf-exact`` command line.

Exit codes: 0 schedulable (or success), 1 deadline miss, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import analysis, gantt, model
from .engine import Policy, ScheduleTrace, simulate
from .fixtures import COUNTEREXAMPLES
from .generator import GeneratorSpec, GeneratorSpecError, generate

EXIT_OK, EXIT_MISS, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _use_color() -> bool:
    flag = os.environ.get("EDF_EXACT_COLOR")
    if flag is not None:
        return flag == "1"
    return sys.stdout.isatty()


def _paint(text: str, code: str) -> str:
    return f"\033[{code}m{text}\033[0m" if _use_color() else text


def load_system(path: str) -> model.TaskSystem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        system = model.loads(text)
    except model.TaskSetFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc
    report = model.validate(system)
    if not report.ok:
        raise InputError(f"{path}: " + "; ".join(map(str, report.violations)))
    return system


def load_trace(path: str) -> tuple[ScheduleTrace, model.TaskSystem | None]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        trace = ScheduleTrace.from_dict(doc)
        system = model.from_dict(doc["system"]) if doc.get("system") is not None else None
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{path}: malformed trace: {exc!r}") from exc
    return trace, system


def _write(text: str, target: str | None) -> None:
    if target is None or target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def format_text(doc: dict[str, Any]) -> str:
    lines = []
    if doc["verdict"] == "schedulable":
        lines.append("verdict: " + _paint("SCHEDULABLE", "32"))
        k = doc["steady_k"]
        lines.append(f"steady_k: {k} (configurations at O_max+{k - 1}P and O_max+{k}P coincide)")
    else:
        miss = doc["miss"]
        lines.append("verdict: " + _paint("DEADLINE MISS", "31"))
        lines.append(f"miss: job {miss['job']} of task {miss['task']} at t={miss['at']}")
    lines.append(
        f"P={doc['hyperperiod']} O_max={doc['o_max']} C_tau={doc['c_tau']} t_up={doc['t_up']}"
    )
    for c in doc["configurations"]:
        lines.append(f"  C({c['t']}) = ({', '.join(map(str, c['e']))})")
    return "\n".join(lines) + "\n"


def _analyze(system: model.TaskSystem, no_early_exit: bool, use_oracle: bool) -> analysis.Verdict:
    if use_oracle:
        from .oracle import oracle_exact_test

        return oracle_exact_test(system)
    return analysis.exact_test(system, early_exit=not no_early_exit)


def cmd_analyze(args: argparse.Namespace) -> int:
    system = load_system(args.input)
    verdict = _analyze(system, args.no_early_exit, args.use_oracle)
    doc = analysis.report(system, verdict)
    if args.report == "json":
        sys.stdout.write(model.canonical_json(doc))
    else:
        sys.stdout.write(format_text(doc))
    return EXIT_OK if verdict.schedulable else EXIT_MISS


def cmd_simulate(args: argparse.Namespace) -> int:
    system = load_system(args.input)
    policy = Policy(args.policy)
    if args.to_steady:
        trace, miss, _ = analysis.simulate_to_steady(system, policy)
    else:
        if args.horizon < 0:
            raise InputError("--horizon must be >= 0")
        trace, miss = simulate(system, policy, horizon=args.horizon)
    doc = trace.to_dict()
    doc["system"] = model.to_dict(system)
    _write(model.canonical_json(doc), args.trace)
    if miss is not None:
        print(
            f"deadline miss: job {miss.job.job_number} of task {miss.job.task_index + 1} at t={miss.at}",
            file=sys.stderr,
        )
        return EXIT_MISS
    return EXIT_OK


def cmd_gantt(args: argparse.Namespace) -> int:
    trace, system = load_trace(args.trace)
    try:
        if args.format == "ascii":
            text = gantt.render_ascii(trace, args.start, args.end)
        else:
            text = gantt.render_svg(trace, system, args.start, args.end)
    except gantt.WindowError as exc:
        raise InputError(str(exc)) from exc
    _write(text, args.output)
    return EXIT_OK


def _parse_periods(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad period list {text!r}") from exc


def cmd_generate(args: argparse.Namespace) -> int:
    base = GeneratorSpec(
        seed=args.seed,
        task_count=args.tasks,
        cpu_count=args.cpus,
        period_pool=args.periods,
        max_offset=args.max_offset,
        utilization_target=args.utilization,
        deadline_mode=args.deadlines,
    )
    try:
        base.check()
    except GeneratorSpecError as exc:
        raise InputError(str(exc)) from exc
    if args.count == 1:
        _write(model.dumps(generate(base)), args.output)
        return EXIT_OK
    out_dir = Path(args.output or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for offset in range(args.count):
        spec = GeneratorSpec(**{**base.__dict__, "seed": base.seed + offset})
        (out_dir / f"taskset-{spec.seed}.json").write_text(model.dumps(generate(spec)), encoding="utf-8")
    return EXIT_OK


def cmd_counterexample(args: argparse.Namespace) -> int:
    if args.name not in COUNTEREXAMPLES:
        raise InputError(f"unknown counterexample {args.name!r}; known: {', '.join(COUNTEREXAMPLES)}")
    system = COUNTEREXAMPLES[args.name]
    if args.action == "emit":
        _write(model.dumps(system), args.output)
        return EXIT_OK
    verdict = analysis.exact_test(system)
    leung = analysis.leung_test(system)
    sys.stdout.write("exact test:\n")
    sys.stdout.write(format_text(analysis.report(system, verdict)))
    sys.stdout.write("Leung test (known to be incorrect):\n")
    if isinstance(leung, analysis.RejectByConfigMismatch):
        sys.stdout.write(
            f"  reject: C({leung.at_1}) = {leung.config_1.values} != "
            f"C({leung.at_2}) = {leung.config_2.values}, diff {leung.diff}\n"
        )
    elif isinstance(leung, analysis.RejectByMiss):
        sys.stdout.write(f"  reject: miss of {leung.job} at t={leung.at}\n")
    else:
        sys.stdout.write("  accept\n")
    if verdict.schedulable and not isinstance(leung, analysis.Accept):
        sys.stdout.write("divergence: exact test says schedulable, Leung rejects\n")
    return EXIT_OK if verdict.schedulable else EXIT_MISS


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 too; keep the message terse
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edf-exact", description="Exact global-EDF schedulability analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="run the exact schedulability test")
    p.add_argument("input")
    p.add_argument("--no-early-exit", action="store_true",
                   help="simulate all of [0, t_up) instead of stopping at the steady phase")
    p.add_argument("--use-oracle", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="simulate and export a trace")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--horizon", type=int)
    group.add_argument("--to-steady", action="store_true")
    p.add_argument("--policy", choices=("edf", "llf"), default="edf")
    p.add_argument("--trace", help="output file (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gantt", help="render a trace")
    p.add_argument("trace")
    p.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p.add_argument("--from", dest="start", type=int)
    p.add_argument("--to", dest="end", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gantt)

    p = sub.add_parser("generate", help="generate random task sets")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tasks", type=int, default=3)
    p.add_argument("--cpus", type=int, default=2)
    p.add_argument("--periods", type=_parse_periods, default=(2, 3, 4, 6))
    p.add_argument("--max-offset", type=int, default=6)
    p.add_argument("--utilization", type=Fraction, default=Fraction(1))
    p.add_argument("--deadlines", choices=("implicit", "constrained"), default="implicit")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("-o", "--output", help="file (count 1) or directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("counterexample", help="built-in counterexamples to Leung's test")
    p.add_argument("name")
    p.add_argument("action", choices=("emit", "run"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"edf-exact: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (model.TickOverflowError, GeneratorSpecError) as exc:
        print(f"edf-exact: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
