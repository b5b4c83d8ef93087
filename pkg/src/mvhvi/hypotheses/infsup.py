"""Inf-sup (LBB) constant of the bilinear form."""

from __future__ import annotations

from typing import Union

import numpy as np

from mvhvi.core.operators import BilinearFormSpec
from mvhvi.core.types import FloatArray


def infsup_constant(b: Union[BilinearFormSpec, FloatArray]) -> float:
    """
    alpha_b = min over rho != 0 of |B^T rho| / |rho|, the m-th singular value
    of B. Zero when B has more rows than columns or is row-rank deficient.
    """
    B = b.B if isinstance(b, BilinearFormSpec) else np.atleast_2d(np.asarray(b, dtype=float))
    m, n = B.shape
    if m > n:
        return 0.0
    s = np.linalg.svd(B, compute_uv=False)
    cutoff = max(m, n) * np.finfo(float).eps * s[0]
    value = float(s[m - 1])
    return 0.0 if value <= cutoff else value
