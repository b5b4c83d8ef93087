"""Audit command."""

from __future__ import annotations

import argparse
import json

from mvhvi.cli.formatters import audit_table, print_csv, print_error, print_success, print_table

AUDIT_HEADER = ("item", "status", "margin", "required", "samples", "seed", "note", "witness")


def cmd_audit(args: argparse.Namespace) -> int:
    """Audit every hypothesis item; exit 2 on a blocking violation."""
    from mvhvi.cli.context import CommandContext
    from mvhvi.hypotheses.audit import audit_instance

    ctx = CommandContext.from_args(args)
    inst = ctx.instance()
    samples = args.samples or 2000
    report, _ = audit_instance(inst, samples, ctx.seed, ctx.data.solver.kink_capture)

    rows = [
        (
            e.name,
            e.status.value,
            e.margin,
            e.required,
            e.samples,
            e.seed,
            e.note,
            json.dumps(e.witness, sort_keys=True, default=str) if e.witness else "",
        )
        for e in report
    ]
    ctx.write("audit.csv", AUDIT_HEADER, rows)

    if ctx.csv:
        print_csv(AUDIT_HEADER, rows)
    else:
        print_table(audit_table(report, title=f"Hypothesis audit: {inst.name or ctx.run.instance}"))

    failures = report.failures()
    if failures:
        names = ", ".join(e.name for e in failures)
        print_error(f"{len(failures)} hypothesis item(s) violated: {names}")
        return 2
    print_success(f"all {len(report)} hypothesis items hold ({report.status.value})")
    return 0


def register_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register the audit command."""
    audit_parser = subparsers.add_parser(
        "audit",
        help="Check every standing hypothesis of an instance",
    )
    audit_parser.add_argument("--instance", required=True, help="Instance file or gallery name")
    audit_parser.add_argument(
        "--samples",
        type=int,
        help="Samples per sampled audit (default 2000)",
    )
    audit_parser.add_argument("--seed", type=int, help="Sampling seed")
    audit_parser.add_argument("--out", metavar="DIR", help="Output directory")
    audit_parser.add_argument("--format", choices=("human", "csv"), help="Output format")
    audit_parser.set_defaults(func=cmd_audit)
