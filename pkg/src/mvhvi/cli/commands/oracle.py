"""Oracle command: brute-force grid solution set."""

from __future__ import annotations

import argparse

from mvhvi.cli.formatters import (
    format_vector,
    print_csv,
    print_info,
    print_success,
    print_table,
    print_warning,
    rows_table,
)

PREVIEW_ROWS = 12


def cmd_oracle(args: argparse.Namespace) -> int:
    """Enumerate the grid points of K(r) x Y(s) that pass the combined test."""
    from mvhvi.cli.context import CommandContext
    from mvhvi.verify.oracle import brute_force_oracle, oracle_tolerance

    ctx = CommandContext.from_args(args)
    inst = ctx.instance()
    tol = args.tol if args.tol is not None else oracle_tolerance(inst, args.r, args.s, args.delta)
    print_info(f"grid step {args.delta:g}, r = {args.r:g}, s = {args.s:g}, tolerance {tol:.4g}")
    result = brute_force_oracle(inst, args.r, args.s, args.delta, tol)

    header = (
        [f"u{i}" for i in range(inst.n)] + [f"lambda{i}" for i in range(inst.m)] + ["violation"]
    )
    rows = [
        [*u, *lam, value] for u, lam, value in zip(result.U, result.Lam, result.violations)
    ]
    ctx.write("oracle.csv", header, rows)

    if ctx.csv:
        print_csv(header, rows)
    elif not result.empty:
        order = result.violations.argsort()[:PREVIEW_ROWS]
        print_table(
            rows_table(
                f"Best {len(order)} of {len(result)} grid points",
                ("u", "lambda", "violation"),
                [(result.U[i], result.Lam[i], float(result.violations[i])) for i in order],
            )
        )

    if result.empty:
        print_warning("no grid point passes; refine the grid or raise --tol")
        return 4
    if result.touches_boundary:
        print_warning("the accepted set touches the grid boundary; enlarge --r or --s")
    lo, hi = result.U.min(axis=0), result.U.max(axis=0)
    print_success(f"{len(result)} grid points, u in {format_vector(lo)} .. {format_vector(hi)}")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the oracle command."""
    oracle_parser = subparsers.add_parser(
        "oracle",
        help="Brute-force grid search for the solution set (n_V + m_E <= 4)",
    )
    oracle_parser.add_argument("--instance", required=True, help="Instance file or gallery name")
    oracle_parser.add_argument("--r", type=float, required=True, help="State ball radius")
    oracle_parser.add_argument("--s", type=float, required=True, help="Multiplier ball radius")
    oracle_parser.add_argument("--delta", type=float, required=True, help="Grid step")
    oracle_parser.add_argument(
        "--tol",
        type=float,
        help="Acceptance tolerance (default: grid-step Lipschitz bound)",
    )
    oracle_parser.add_argument("--out", metavar="DIR", help="Output directory")
    oracle_parser.add_argument("--format", choices=("human", "csv"), help="Output format")
    oracle_parser.set_defaults(func=cmd_oracle)
