"""Stability command: Hoelder dependence of u on f."""

from __future__ import annotations

import argparse

from mvhvi.cli.formatters import print_csv, print_error, print_success, print_table, rows_table

STABILITY_HEADER = ("pair", "load_gap", "lhs", "rhs", "passed")


def cmd_stability(args: argparse.Namespace) -> int:
    """Compare |u(f1) - u(f2)| with the stability bound on one or more load pairs."""
    import numpy as np

    from mvhvi.cli.context import CommandContext
    from mvhvi.utils.csvio import parse_vector
    from mvhvi.utils.sampling import make_rng
    from mvhvi.verify.probes import stability_check

    ctx = CommandContext.from_args(args)
    inst = ctx.audited_instance()
    cfg = ctx.solver_config()
    probes = ctx.probe_settings(1000)

    if (args.f1 is None) != (args.f2 is None):
        raise ValueError("--f1 and --f2 go together")
    if args.f1 is not None:
        pairs = [(parse_vector(args.f1), parse_vector(args.f2))]
    else:
        rng = make_rng(ctx.seed)
        scale = inst.scale
        pairs = []
        for _ in range(args.pairs):
            f1 = inst.f + scale * rng.standard_normal(inst.n)
            f2 = inst.f + scale * rng.standard_normal(inst.n)
            pairs.append((f1, f2))

    rows = []
    for index, (f1, f2) in enumerate(pairs):
        result = stability_check(inst, f1, f2, cfg, probes)
        rows.append((index, float(np.linalg.norm(f1 - f2)), result.lhs, result.rhs, result.passed))
    ctx.write("stability.csv", STABILITY_HEADER, rows)

    if ctx.csv:
        print_csv(STABILITY_HEADER, rows)
    else:
        print_table(rows_table("Stability", STABILITY_HEADER, rows))

    failed = [row[0] for row in rows if not row[-1]]
    if failed:
        print_error(f"stability bound violated for pair(s) {failed}")
        return 4
    ratio = max((row[2] / row[3] for row in rows if row[3] > 0.0), default=0.0)
    print_success(f"{len(rows)} pair(s) within the bound (largest lhs/rhs {ratio:.4f})")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the stability command."""
    stability_parser = subparsers.add_parser(
        "stability",
        help="Check |u1 - u2| <= (|f1 - f2| / c_h)^(1/(tau-1))",
    )
    stability_parser.add_argument("--instance", required=True, help="Instance file or gallery name")
    stability_parser.add_argument("--f1", metavar="CSV", help="First load vector")
    stability_parser.add_argument("--f2", metavar="CSV", help="Second load vector")
    stability_parser.add_argument(
        "--pairs",
        type=int,
        default=10,
        help="Random load pairs around f when --f1/--f2 are absent (default 10)",
    )
    stability_parser.add_argument("--seed", type=int, help="Seed for the random pairs")
    stability_parser.add_argument("--out", metavar="DIR", help="Output directory")
    stability_parser.add_argument("--format", choices=("human", "csv"), help="Output format")
    stability_parser.set_defaults(func=cmd_stability)
