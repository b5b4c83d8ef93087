"""Output formatters for CLI commands."""

from __future__ import annotations

import sys
from typing import TYPE_CHECKING, Any, Iterable, Optional, Sequence

import numpy as np

from mvhvi.utils.csvio import render_csv

if TYPE_CHECKING:
    from rich.console import Console as _Console
    from rich.table import Table

    from mvhvi.hypotheses.report import AuditReport
    from mvhvi.solver.uzawa import SolveTrace
    from mvhvi.verify.residuals import Formulation, FormulationResidual


_console: Optional["_Console"] = None
_quiet = False
_to_stderr = False


def _get_console() -> "_Console":
    """Lazy-init the rich console (deferring rich import)."""
    global _console
    if _console is None:
        from rich.console import Console

        _console = Console()
    return _console


def configure_output(quiet: bool = False, messages_to_stderr: bool = False) -> None:
    """Set verbosity; CSV on stdout moves status lines to stderr."""
    global _quiet, _to_stderr
    _quiet = quiet
    _to_stderr = messages_to_stderr


def _emit(text: str, always: bool = False) -> None:
    if _quiet and not always:
        return
    print(text, file=sys.stderr if _to_stderr else sys.stdout)


def print_success(message: str) -> None:
    """Print a success message."""
    _emit(f"[+] {message}")


def print_error(message: str) -> None:
    """Print an error message."""
    print(f"[!] {message}", file=sys.stderr)


def print_info(message: str) -> None:
    """Print an info message."""
    _emit(f"[*] {message}")


def print_warning(message: str) -> None:
    """Print a warning message."""
    _emit(f"[~] {message}", always=True)


def print_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    sys.stdout.write(render_csv(header, rows))


def print_table(table: "Table") -> None:
    if not _quiet:
        _get_console().print(table)


def format_vector(x: Any, digits: int = 6) -> str:
    """Compact one-line rendering: [0, 2.5]."""
    values = np.atleast_1d(np.asarray(x, dtype=float))
    return "[" + ", ".join(f"{v:.{digits}g}" for v in values) + "]"


def audit_table(report: "AuditReport", title: str = "Hypothesis audit") -> "Table":
    from rich.table import Table

    styles = {"verified": "green", "estimated": "yellow", "violated": "red"}
    table = Table(title=title, show_header=True, header_style="bold")
    table.add_column("Item")
    table.add_column("Status")
    table.add_column("Margin", justify="right")
    table.add_column("Note")
    for entry in report:
        style = styles.get(entry.status.value, "")
        name = entry.name if entry.required else f"{entry.name} (info)"
        table.add_row(
            name,
            f"[{style}]{entry.status.value}[/{style}]",
            f"{entry.margin:.4g}",
            entry.note,
        )
    return table


def residual_table(
    residuals: "dict[Formulation, FormulationResidual]", tol: float
) -> "Table":
    from rich.table import Table

    table = Table(title="Formulation residuals", show_header=True, header_style="bold")
    table.add_column("Formulation")
    table.add_column("Violation", justify="right")
    table.add_column("Worst v")
    table.add_column("Worst rho")
    for formulation, res in residuals.items():
        mark = "green" if res.violation <= tol else "red"
        table.add_row(
            formulation.value,
            f"[{mark}]{res.violation:.3e}[/{mark}]",
            format_vector(res.worst_v, 4),
            format_vector(res.worst_rho, 4),
        )
    return table


def trace_table(trace: "SolveTrace", last: int = 10) -> "Table":
    """The final rows of a solve trace."""
    from rich.table import Table

    table = Table(
        title=f"Uzawa trace ({trace.iterations} iterations, {trace.termination.value})",
        show_header=True,
        header_style="bold",
    )
    for column in ("iter", "r", "s", "|du|", "compl"):
        table.add_column(column, justify="right")
    for row in trace.rows[-last:]:
        table.add_row(
            str(row.iter),
            f"{row.r:g}",
            f"{row.s:g}",
            f"{row.u_update_norm:.3e}",
            f"{row.compl_residual:.3e}",
        )
    return table


def rows_table(title: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> "Table":
    """Generic table; floats get four significant digits."""
    from rich.table import Table

    table = Table(title=title, show_header=True, header_style="bold")
    for column in header:
        table.add_column(column)
    for row in rows:
        cells = []
        for value in row:
            if isinstance(value, (float, np.floating)):
                cells.append(f"{float(value):.4g}")
            elif isinstance(value, np.ndarray):
                cells.append(format_vector(value, 4))
            elif isinstance(value, bool):
                cells.append("[green]yes[/green]" if value else "[red]no[/red]")
            else:
                cells.append(str(value))
        table.add_row(*cells)
    return table
