"""Suite command: the acceptance battery."""

from __future__ import annotations

import argparse

from mvhvi.cli.formatters import print_csv, print_error, print_success, print_table, rows_table

SUITE_HEADER = ("check", "passed", "seconds", "detail")


def cmd_suite(args: argparse.Namespace) -> int:
    """Run every acceptance check; the exit code is that of the worst failure."""
    from mvhvi.cli.battery import run_battery
    from mvhvi.cli.context import CommandContext

    ctx = CommandContext.from_args(args)
    results = run_battery(full=args.full, seed=ctx.seed, workers=ctx.data.solver.workers)
    # seconds stay out of the CSV so reruns are byte-identical
    rows = [(r.name, r.passed, r.detail) for r in results]
    ctx.write("suite.csv", ("check", "passed", "detail"), rows)

    if ctx.csv:
        print_csv(("check", "passed", "detail"), rows)
    else:
        print_table(
            rows_table(
                "Acceptance suite" + (" (full)" if args.full else ""),
                SUITE_HEADER,
                [(r.name, r.passed, r.seconds, r.detail) for r in results],
            )
        )

    failed = [r for r in results if not r.passed]
    if failed:
        names = ", ".join(r.name for r in failed)
        print_error(f"{len(failed)} of {len(results)} checks failed: {names}")
        return max(r.exit_code for r in failed)
    print_success(f"all {len(results)} checks passed")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the suite command."""
    suite_parser = subparsers.add_parser(
        "suite",
        help="Run the acceptance battery",
    )
    suite_parser.add_argument(
        "--full",
        action="store_true",
        help="Use the full acceptance sizes (minutes instead of seconds)",
    )
    suite_parser.add_argument("--seed", type=int, help="Battery seed")
    suite_parser.add_argument("--out", metavar="DIR", help="Output directory")
    suite_parser.add_argument("--format", choices=("human", "csv"), help="Output format")
    suite_parser.set_defaults(func=cmd_suite)
