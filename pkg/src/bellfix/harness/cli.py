"""Command line entry point.

    bellfix run --config scenario.cfg [--scenario S] [--trials N] [--seed K]
                [--format json|csv-summary] [--out PATH]
    bellfix list-scenarios
    bellfix self-test

Exit codes: 0 success, 2 config error, 3 model violation (an impossible
outcome was sampled), 4 numerical-invariant failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..fixed_povm import UndefinedConditionalError
from .config import SCENARIOS, ConfigError, load_config
from .report import emit_report
from .runner import InvariantError, run_scenario
from .selftest import run_self_test
from .stats import ModelViolationError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MODEL_VIOLATION = 3
EXIT_INVARIANT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bellfix", description="CHSH scenarios with and without setting choices")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and emit a report")
    run.add_argument("--config", required=True, help="flat key = value scenario file")
    run.add_argument("--scenario", choices=sorted(SCENARIOS))
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--format", choices=("json", "csv-summary"), default="json")
    run.add_argument("--out", help="write the report here instead of stdout")

    sub.add_parser("list-scenarios", help="print the available scenarios")
    sub.add_parser("self-test", help="run the fast invariant checks")
    return parser


def _run(args) -> int:
    try:
        cfg = load_config(args.config, scenario=args.scenario, trials=args.trials, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_scenario(cfg)
    except ModelViolationError as exc:
        print(f"model violation: {exc}", file=sys.stderr)
        return EXIT_MODEL_VIOLATION
    except (InvariantError, UndefinedConditionalError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    data = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _run(args)
    if args.command == "list-scenarios":
        for name, desc in SCENARIOS.items():
            print(f"{name:<18} {desc}")
        return EXIT_OK
    if args.command == "self-test":
        return EXIT_OK if run_self_test(sys.stdout) else EXIT_INVARIANT
    return EXIT_CONFIG  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
