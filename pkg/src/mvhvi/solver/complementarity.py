"""Residual of the multiplier inequality b(u, rho - lambda) <= 0 on Lambda."""

from __future__ import annotations

from typing import Optional

import numpy as np

from mvhvi.core.lambda_set import LambdaVariant
from mvhvi.core.problem import ProblemInstance
from mvhvi.core.types import FloatArray


def complementarity_residual(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    radius: Optional[float] = None,
) -> float:
    """
    Worst violation of b(u, rho - lambda) <= 0.

    Orthant: max(max_i (Bu)_i, |lambda^T Bu|), which vanishes exactly on
    complementary pairs. Box: the closed-form maximizer rho*_i = g_i where
    (Bu)_i > 0. Polyhedron: the linear program over Lambda cut by the cube
    of half-width `radius`, by vertex enumeration.
    """
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    w = inst.B @ u
    L = inst.Lambda
    if L.variant is LambdaVariant.ORTHANT:
        return float(max(0.0, float(np.max(w)), abs(float(lam @ w))))
    if L.variant is LambdaVariant.BOX:
        value, _ = L.support(w, np.inf)
        return max(0.0, value - float(lam @ w))
    if radius is None:
        radius = max(1.0, 2.0 * (float(np.linalg.norm(lam)) + 1.0))
    value, _ = L.support(w, radius)
    return max(0.0, value - float(lam @ w))
