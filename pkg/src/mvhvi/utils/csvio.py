"""CSV writing with stable float formatting (byte-identical reruns)."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

from mvhvi.utils.paths import ensure_parent_exists


def format_cell(value: Any) -> str:
    """Render one CSV cell; floats keep full round-trip precision."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return ""
    if isinstance(value, np.ndarray):
        return " ".join(format_cell(v) for v in value.ravel())
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render a header and rows to a CSV string with LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(
    path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """Write a CSV file (UTF-8, LF) and return its resolved path."""
    target = ensure_parent_exists(path)
    with open(target, "w", encoding="utf-8", newline="") as f:
        f.write(render_csv(header, rows))
    return target


def parse_vector(text: str) -> np.ndarray:
    """
    Parse a vector given either as a CSV literal ("0,3") or a CSV file path.

    A file may hold the values on one line or one per line; a non-numeric
    first line is treated as a header.
    """
    candidate = Path(text).expanduser()
    if candidate.is_file():
        content = candidate.read_text(encoding="utf-8")
    else:
        content = text
    values: list[float] = []
    for line_no, line in enumerate(content.splitlines()):
        cells = [c.strip() for c in line.replace(";", ",").split(",") if c.strip()]
        try:
            values.extend(float(c) for c in cells)
        except ValueError:
            if line_no == 0:
                continue
            raise ValueError(f"Not a numeric vector: {text!r}") from None
    if not values:
        raise ValueError(f"Empty vector: {text!r}")
    return np.asarray(values, dtype=float)
