"""Solve command."""

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
    trace_table,
)

VECTOR_HEADER = ("value",)


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve an instance, certify the pair and write u, lambda and residuals."""
    from mvhvi.cli.context import CommandContext
    from mvhvi.solver.multistart import UniquenessStatus, multi_start
    from mvhvi.solver.uzawa import solve
    from mvhvi.verify.residuals import residual_report

    ctx = CommandContext.from_args(args)
    inst = ctx.audited_instance()
    restarts = args.restarts if args.restarts is not None else 1
    cfg = ctx.solver_config(
        tol_outer=args.tol, max_outer=args.max_outer, restarts=max(restarts, 1)
    )
    probes = ctx.probe_settings()
    tol = ctx.data.verify.certify_tol

    uniqueness = None
    if restarts > 1:
        uniqueness = multi_start(inst, cfg, seed=ctx.seed)
        pair = uniqueness.solutions[0]
        pair = pair.with_residuals(residual_report(inst, pair.u, pair.lam, probes))
        trace = None
    else:
        pair, trace = solve(inst, cfg, probes=probes)

    report = pair.residuals or residual_report(inst, pair.u, pair.lam, probes)
    ctx.write("u.csv", VECTOR_HEADER, [(x,) for x in pair.u])
    ctx.write("lambda.csv", VECTOR_HEADER, [(x,) for x in pair.lam])
    residual_rows = [(name, value) for name, value in report.as_dict().items()]
    ctx.write("residuals.csv", ("formulation", "violation"), residual_rows)
    if trace is not None and args.trace:
        trace.write(args.trace)
        print_info(f"Trace written to {args.trace}")

    if ctx.csv:
        print_csv(("formulation", "violation"), residual_rows)
    else:
        if trace is not None:
            print_table(trace_table(trace))
        print_table(rows_table("Residuals", ("formulation", "violation"), residual_rows))
        if uniqueness is not None:
            print_table(
                rows_table(
                    "Multi-start",
                    ("status", "u spread", "lambda spread", "runs", "failures"),
                    [
                        (
                            uniqueness.status.value,
                            uniqueness.u_spread,
                            uniqueness.lambda_spread,
                            len(uniqueness.solutions),
                            uniqueness.failures,
                        )
                    ],
                )
            )

    name = inst.name or "instance"
    summary = f"{name}: u = {format_vector(pair.u)}, lambda = {format_vector(pair.lam)}"
    if uniqueness is not None and uniqueness.status is UniquenessStatus.INCOMPLETE:
        print_warning(f"{summary}; {uniqueness.failures} restart(s) failed to converge")
        return 3
    if uniqueness is not None and uniqueness.status is UniquenessStatus.INCONSISTENT:
        print_warning(f"{summary}; restarts disagree on u (spread {uniqueness.u_spread:.3e})")
        return 4
    if not report.certified(tol):
        print_warning(f"{summary}; not certified (worst residual {report.worst:.3e} > {tol:g})")
        return 4
    print_success(f"{summary} (worst residual {report.worst:.3e})")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the solve command."""
    solve_parser = subparsers.add_parser(
        "solve",
        help="Solve an instance with the Uzawa iteration",
    )
    solve_parser.add_argument(
        "--instance",
        required=True,
        help="Instance file or gallery name",
    )
    solve_parser.add_argument(
        "--tol",
        type=float,
        help="Outer stopping tolerance",
    )
    solve_parser.add_argument(
        "--max-outer",
        type=int,
        help="Outer iteration cap",
    )
    solve_parser.add_argument(
        "--restarts",
        type=int,
        help="Solve from this many random starts and compare",
    )
    solve_parser.add_argument(
        "--trace",
        metavar="CSV",
        help="Write the iteration trace to this file",
    )
    solve_parser.add_argument("--seed", type=int, help="Seed for probes and restarts")
    solve_parser.add_argument("--out", metavar="DIR", help="Output directory")
    solve_parser.add_argument(
        "--format",
        choices=("human", "csv"),
        help="Output format on stdout",
    )
    solve_parser.set_defaults(func=cmd_solve)
