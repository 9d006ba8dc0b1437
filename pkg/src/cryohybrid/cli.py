"""Command-line entry point: ``cryohybrid <command> <scenario> [options]``.

Exit status is 0 when every check passes, 1 when the model flags a
violation and 2 for usage, parse or output errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .commands import COMMANDS, UnknownCommand, run_command
from .report import FORMATS, ReportError, emit_report
from .scenario import MissingSection, ScenarioError, load_scenario

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cryohybrid",
        description="Cryogenic hybrid-computing models driven by a scenario file.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("scenario", help="scenario file, or the name of a bundled scenario such as table1")
    ap.add_argument("--out", metavar="DIR", help="write report files here instead of stdout")
    ap.add_argument("--format", choices=FORMATS, help="report format (default: scenario [outputs] format, else csv)")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized test fixtures; model results never depend on it")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr
    try:
        scenario = load_scenario(args.scenario)
    except FileNotFoundError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except ScenarioError as e:
        print(f"error: {args.scenario}: {len(e.errors)} problem(s)", file=err)
        for msg in e.errors:
            print(f"  {msg}", file=err)
        return EXIT_USAGE
    try:
        art = run_command(scenario, args.command)
    except (MissingSection, UnknownCommand) as e:
        print(f"error: {e.args[0]}", file=err)
        return EXIT_USAGE
    fmt = args.format or scenario.outputs.get("format", "csv")
    out = args.out or scenario.outputs.get("dir")
    try:
        paths = emit_report(art, fmt, out)
    except ReportError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    for p in paths:
        print(p, file=err)
    for v in art.violations:
        print(f"violation: {v}", file=err)
    return EXIT_OK if art.ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
