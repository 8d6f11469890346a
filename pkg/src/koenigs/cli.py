"""Command line: koenigs run|validate <scenario.toml>, koenigs reproduce <example>.

Exit codes: 0 success, 2 invalid input, 3 numerical failure (residuals are
printed to stderr).
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .conformal import ConvergenceError
from .reproduction import EXAMPLES
from .runner import RunResult, TaskResult, run_scenario
from .scenario import FORMATS, Scenario, ScenarioError, Task, load_scenario

OUT_ENV = "KOENIGS_OUT"
DEFAULT_OUT = "koenigs-out"
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

_FORMAT_CHOICES = {"csv": ("csv", "json-report"), "svg": ("svg", "json-report"), "all": FORMATS}


def _positive_int(text):
    v = int(text)
    if v < 4:
        raise argparse.ArgumentTypeError("resolution must be at least 4")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--resolution", type=_positive_int, help="boundary nodes per unit length")
    common.add_argument("--tolerance", type=_positive_float, help="accepted boundary residual of the maps")
    common.add_argument("--format", choices=sorted(_FORMAT_CHOICES), help="artifact formats to write")

    p = argparse.ArgumentParser(prog="koenigs",
                                description="Boundary analysis of continuous semigroups of the disc "
                                            "through their Koenigs models.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run every task of a scenario file")
    r.add_argument("scenario", help="TOML scenario file")
    v = sub.add_parser("validate", help="parse and check a scenario file without running it")
    v.add_argument("scenario")
    x = sub.add_parser("reproduce", parents=[common], help="reproduce one of the built-in examples")
    x.add_argument("example", choices=EXAMPLES)
    return p


def _out_dir(args, sc: Scenario) -> Path:
    return Path(args.out or sc.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)


def _complain(path, exc: ScenarioError):
    where = f"{path}:{exc.line}:{exc.col}" if exc.line is not None else str(path)
    print(f"{where}: error: {exc.message}", file=sys.stderr)


def _summary(result: RunResult, out: Path):
    for t in result.tasks:
        flag = "ok  " if t.passed else "FAIL"
        print(f"{flag} {t.task}" + (f"  [{', '.join(t.artifacts)}]" if t.artifacts else ""))
    print(f"artifacts in {out}")


def _dump_failures(tasks: list[TaskResult]):
    for t in tasks:
        if t.passed:
            continue
        print(f"{t.task}: failed" + (f": {t.error}" if t.error else ""), file=sys.stderr)
        if "residual" in t.data:
            print(f"  residual = {t.data['residual']:.6g}", file=sys.stderr)
        for c in t.data.get("checks", []):
            if not c["passed"]:
                print(f"  {c['name']}: {c['value']:.6g} (need {c['relation']} {c['limit']:g})", file=sys.stderr)
        for c in t.data.get("landing_checks", []):
            if not c["passed"]:
                print(f"  {c['point']}: landing {c['landing_time']:.4g}, expected {c['expected']:.4g}",
                      file=sys.stderr)
        for key in ("equivariance_residual", "set_residual", "disc_equivariance_residual"):
            if key in t.data:
                print(f"  {key} = {t.data[key]:.6g}", file=sys.stderr)
        for m in t.data.get("mismatches", []):
            print(f"  mismatch: {m}", file=sys.stderr)


def _execute(args, sc: Scenario) -> int:
    out = _out_dir(args, sc)
    formats = _FORMAT_CHOICES[args.format] if args.format else None
    try:
        result = run_scenario(sc, out, args.resolution, args.tolerance, formats)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _summary(result, out)
    code = result.exit_code
    if code != EXIT_OK:
        _dump_failures(result.tasks)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "reproduce":
        sc = Scenario(f"reproduce-{args.example}", None, tasks=[Task("reproduce", args.example)])
        return _execute(args, sc)
    try:
        sc = load_scenario(args.scenario)
    except ScenarioError as exc:
        _complain(args.scenario, exc)
        return EXIT_INVALID
    if args.command == "validate":
        print(f"{args.scenario}: ok ({len(sc.tasks)} task{'s' if len(sc.tasks) != 1 else ''}: "
              f"{', '.join(map(str, sc.tasks))})")
        return EXIT_OK
    return _execute(args, sc)


if __name__ == "__main__":
    sys.exit(main())
