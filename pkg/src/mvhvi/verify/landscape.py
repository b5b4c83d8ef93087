"""Gnuplot-compatible data files of the v-part violation around u (n_V <= 2)."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import numpy as np

from mvhvi.core.errors import DimensionLimit
from mvhvi.core.problem import ProblemInstance
from mvhvi.core.types import FloatArray
from mvhvi.utils.csvio import format_cell
from mvhvi.utils.paths import ensure_parent_exists
from mvhvi.verify.residuals import Formulation, minty_v_part, original_v_part, probe_radius


def violation_landscape(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    formulation: Formulation = Formulation.ORIGINAL,
    points_per_axis: int = 101,
    radius: Optional[float] = None,
    capture: float = 0.0,
) -> str:
    """
    Unclamped v-part of the formulation on a square grid of test points
    around u. One dimension gives `v value` rows; two dimensions give
    `v1 v2 value` scanlines separated by blank lines, as splot expects.
    """
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if inst.n > 2:
        raise DimensionLimit(f"landscapes are drawn for n_V <= 2, got {inst.n}")
    radius = radius or probe_radius(u)
    axis = np.linspace(-radius, radius, points_per_axis)
    evaluate = minty_v_part if formulation.at_test_point else original_v_part

    lines = [
        f"# formulation={formulation.value} u={format_cell(u)} lambda={format_cell(lam)}",
    ]
    if inst.n == 1:
        D = axis[:, None]
        values = evaluate(inst, u, lam, D, capture)
        lines.append("# v violation")
        lines.extend(f"{format_cell(u[0] + d)} {format_cell(val)}" for d, val in zip(axis, values))
    else:
        lines.append("# v1 v2 violation")
        for a in axis:
            D = np.column_stack([np.full_like(axis, a), axis])
            values = evaluate(inst, u, lam, D, capture)
            lines.extend(
                f"{format_cell(u[0] + d[0])} {format_cell(u[1] + d[1])} {format_cell(val)}"
                for d, val in zip(D, values)
            )
            lines.append("")
    return "\n".join(lines) + "\n"


def write_landscape(
    path: Union[str, Path],
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    formulation: Formulation = Formulation.ORIGINAL,
    points_per_axis: int = 101,
    capture: float = 0.0,
) -> Path:
    target = ensure_parent_exists(path)
    text = violation_landscape(inst, u, lam, formulation, points_per_axis, capture=capture)
    with open(target, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return target
