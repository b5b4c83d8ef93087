"""Verify command: certify a candidate pair against the four formulations."""

from __future__ import annotations

import argparse

from mvhvi.cli.formatters import (
    print_csv,
    print_info,
    print_success,
    print_table,
    print_warning,
    residual_table,
)

RESIDUAL_HEADER = ("formulation", "violation", "worst_v", "worst_rho")
FORMULATION_CHOICES = ("all", "original", "minty", "combined", "minty-combined")


def cmd_verify(args: argparse.Namespace) -> int:
    """Evaluate the residuals of (u, lambda); exit 4 unless certified."""
    from mvhvi.cli.context import CommandContext
    from mvhvi.core.errors import ShapeError
    from mvhvi.utils.csvio import parse_vector
    from mvhvi.verify.equivalence import equivalence_check
    from mvhvi.verify.landscape import write_landscape
    from mvhvi.verify.residuals import Formulation, all_residuals, residual

    ctx = CommandContext.from_args(args)
    inst = ctx.audited_instance()
    u = parse_vector(args.u)
    lam = parse_vector(args.lam)
    if u.shape != (inst.n,) or lam.shape != (inst.m,):
        raise ShapeError(
            f"expected u of length {inst.n} and lambda of length {inst.m}, "
            f"got {u.shape[0]} and {lam.shape[0]}"
        )
    probes = ctx.probe_settings(args.probes)
    tol = ctx.certify_tol

    agree = True
    if args.formulation == "all":
        equivalence = equivalence_check(inst, u, lam, tol, probes)
        agree = equivalence.agree
        results = all_residuals(inst, u, lam, probes)
        landscape_formulation = Formulation.ORIGINAL
    else:
        landscape_formulation = Formulation(args.formulation)
        results = {landscape_formulation: residual(inst, u, lam, landscape_formulation, probes)}

    rows = [(f.value, r.violation, r.worst_v, r.worst_rho) for f, r in results.items()]
    ctx.write("verify.csv", RESIDUAL_HEADER, rows)
    if args.landscape:
        path = write_landscape(
            args.landscape, inst, u, lam, landscape_formulation, capture=probes.capture
        )
        print_info(f"Landscape written to {path}")

    if ctx.csv:
        print_csv(RESIDUAL_HEADER, rows)
    else:
        print_table(residual_table(results, tol))

    worst = max(r.violation for r in results.values())
    if not agree:
        print_warning("formulations disagree on this pair")
        return 4
    if worst > tol:
        worst_formulation = max(results.values(), key=lambda r: r.violation)
        v, rho = worst_formulation.worst_witness
        print_warning(
            f"not a solution: {worst_formulation.formulation.value} violation {worst:.3e} "
            f"at v={v.tolist()}, rho={rho.tolist()}"
        )
        return 4
    print_success(f"certified: worst residual {worst:.3e} <= {tol:g}")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the verify command."""
    verify_parser = subparsers.add_parser(
        "verify",
        help="Certify a candidate (u, lambda) by sampled residuals",
    )
    verify_parser.add_argument("--instance", required=True, help="Instance file or gallery name")
    verify_parser.add_argument(
        "--u",
        required=True,
        metavar="CSV",
        help="State vector: a CSV file or a literal like 0,1",
    )
    verify_parser.add_argument(
        "--lambda",
        dest="lam",
        required=True,
        metavar="CSV",
        help="Multiplier vector: a CSV file or a literal",
    )
    verify_parser.add_argument(
        "--formulation",
        choices=FORMULATION_CHOICES,
        default="all",
        help="Formulation to evaluate (default: all four, with an agreement check)",
    )
    verify_parser.add_argument("--probes", type=int, help="Number of sampled test points")
    verify_parser.add_argument("--seed", type=int, help="Probe seed")
    verify_parser.add_argument(
        "--landscape",
        metavar="FILE",
        help="Write a gnuplot data file of the v-part violation (n_V <= 2)",
    )
    verify_parser.add_argument("--tol", type=float, help="Certification tolerance")
    verify_parser.add_argument("--out", metavar="DIR", help="Output directory")
    verify_parser.add_argument("--format", choices=("human", "csv"), help="Output format")
    verify_parser.set_defaults(func=cmd_verify)
