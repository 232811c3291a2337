"""Main entry point for the MLSpin command line."""

from __future__ import annotations

import argparse
import logging
import sys

from src.cli_runner.commands import check_command, simulate_command


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override fields.seed")
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")

    parser = argparse.ArgumentParser(
        prog="mlspin",
        description="Maxwell-Lorentz simulator with a spinning extended charge",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser(
        "simulate", parents=[common], help="evolve and write invariants.csv"
    )
    simulate.add_argument("config", help="JSON configuration file")
    simulate.add_argument("--out", required=True, help="output directory")

    check = sub.add_parser(
        "check", parents=[common], help="audit the invariants of the initial state"
    )
    check.add_argument("config", help="JSON configuration file")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging and dispatch to a command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.seed is not None and args.seed < 0:
        print("--seed must be non-negative", file=sys.stderr)
        return 2
    if args.command == "simulate":
        return simulate_command(args.config, args.out, seed=args.seed)
    return check_command(args.config, seed=args.seed)


if __name__ == "__main__":
    sys.exit(main())
