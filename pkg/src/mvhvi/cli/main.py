"""Main CLI entry point."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from mvhvi import __version__

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class MvhviArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for hypothesis violations."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser."""
    parser = MvhviArgumentParser(
        prog="mvhvi",
        description="Solve and verify mixed variational-hemivariational inequalities",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""\
Examples:
  mvhvi solve --instance kink-multiplier        Solve a gallery instance
  mvhvi solve --instance rod.json --restarts 20 Compare solutions from 20 starts
  mvhvi verify --instance kink-multiplier --u 0 --lambda 3
                                                Certify a candidate pair
  mvhvi audit --instance contact-rod-10         Check every hypothesis
  mvhvi oracle --instance scalar-lcp --r 2 --s 2 --delta 0.01
                                                Brute-force grid solution set
  mvhvi stability --instance contact-rod-10     Hoelder bound on random loads
  mvhvi suite                                   Acceptance battery
  mvhvi gallery export contact-rod-4 rod.json   Write a built-in instance

Exit codes:
  0 success, 1 usage or IO error, 2 hypothesis violation,
  3 solver failure, 4 verification anomaly

Config: ~/.mvhvi/config.json (MVHVI_SEED overrides the seed)
""",
    )

    parser.add_argument(
        "--version",
        action="version",
        version=f"mvhvi {__version__}",
    )
    parser.add_argument(
        "--config",
        metavar="PATH",
        help="Configuration file (default ~/.mvhvi/config.json)",
    )
    parser.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="Suppress tables and non-essential output",
    )
    parser.add_argument(
        "-v", "--log-level",
        metavar="LEVEL",
        type=str.upper,
        choices=LOG_LEVELS,
        help="Log level (DEBUG, INFO, WARNING, ERROR)",
    )

    # Create subcommand parsers
    subparsers = parser.add_subparsers(
        dest="command",
        metavar="<command>",
        title="Commands",
    )

    # Register all command modules
    from mvhvi.cli.commands import audit, gallery, oracle, solve, stability, suite, verify

    solve.register_commands(subparsers)
    verify.register_commands(subparsers)
    audit.register_commands(subparsers)
    oracle.register_commands(subparsers)
    stability.register_commands(subparsers)
    suite.register_commands(subparsers)
    gallery.register_commands(subparsers)

    return parser


def _setup(args: argparse.Namespace) -> None:
    """Logging and output mode from the config file and global flags."""
    from pathlib import Path

    from mvhvi.cli.formatters import configure_output
    from mvhvi.core.config import load_config
    from mvhvi.utils.logging import setup_logging

    configure_output(
        quiet=args.quiet,
        messages_to_stderr=getattr(args, "format", None) == "csv",
    )
    config_path = Path(args.config).expanduser() if args.config else None
    log = load_config(config_path).data.logging
    level = args.log_level or ("ERROR" if args.quiet else log.level)
    setup_logging(log.file, level)


def run(argv: Optional[list[str]] = None) -> int:
    """Parse argv, run the subcommand and return its exit code."""
    from mvhvi.cli.formatters import print_error
    from mvhvi.core.errors import MvhviError, exit_code_for

    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    # No command specified - show help
    if args.command is None or not hasattr(args, "func"):
        parser.print_help()
        return 0

    try:
        _setup(args)
        return int(args.func(args))
    except KeyboardInterrupt:
        print_error("Interrupted")
        return 130
    except MvhviError as e:
        print_error(str(e))
        return exit_code_for(e)
    except (OSError, ValueError) as e:
        print_error(str(e))
        return 1
    except Exception as e:
        print_error(f"unexpected error: {e!r}")
        return 1


def main() -> None:
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
