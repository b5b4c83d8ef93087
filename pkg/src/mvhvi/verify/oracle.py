"""
Brute-force grid oracle on K(r) x Y(s) for desk-scale instances.

Every candidate (u, lambda) of a delta-grid is tested against the grid of
test points with the combined formulation, whose v-part and rho-part
separate:

    sup_v <f - A(u) - B^T lambda, v - u> - J0(Gu; G(v - u))  +  sup_rho (rho - lambda)^T B u
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from mvhvi.core.errors import BudgetExceeded, DimensionLimit
from mvhvi.core.lambda_set import LambdaVariant
from mvhvi.core.problem import ProblemInstance
from mvhvi.core.types import FloatArray
from mvhvi.solver.config import lipschitz_estimate
from mvhvi.utils.logging import get_logger

logger = get_logger(__name__)

MAX_GRID_POINTS = 10**8
MAX_TOTAL_DIM = 4
TEST_POINTS_PER_AXIS = 101


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Accepted grid points (rows of U and Lam) and their combined violations."""

    U: FloatArray
    Lam: FloatArray
    violations: FloatArray
    delta: float
    touches_boundary: bool

    @property
    def points(self) -> list[tuple[FloatArray, FloatArray]]:
        return list(zip(self.U, self.Lam))

    def __len__(self) -> int:
        return int(self.U.shape[0])

    @property
    def empty(self) -> bool:
        return len(self) == 0

    def distance_to(self, u: FloatArray, lam: Optional[FloatArray] = None) -> float:
        """Distance from u (or from (u, lambda)) to the nearest accepted point."""
        if self.empty:
            return float("inf")
        gap = self.U - np.asarray(u, dtype=float)
        sq = np.sum(gap**2, axis=1)
        if lam is not None:
            sq = sq + np.sum((self.Lam - np.asarray(lam, dtype=float)) ** 2, axis=1)
        return float(np.sqrt(np.min(sq)))


def _axis(lo: float, hi: float, delta: float) -> FloatArray:
    """Multiples of delta inside [lo, hi]."""
    start = int(np.ceil(lo / delta - 1e-9))
    stop = int(np.floor(hi / delta + 1e-9))
    return delta * np.arange(start, stop + 1, dtype=float)


def _product(axes: list[FloatArray]) -> FloatArray:
    if not axes:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def state_grid(n: int, r: float, delta: float) -> FloatArray:
    """Grid points of step delta inside the ball of radius r."""
    P = _product([_axis(-r, r, delta)] * n)
    return P[np.linalg.norm(P, axis=1) <= r * (1.0 + 1e-12)]


def multiplier_axes(inst: ProblemInstance, s: float, delta: float) -> list[FloatArray]:
    L = inst.Lambda
    if L.variant is LambdaVariant.ORTHANT:
        return [_axis(0.0, s, delta)] * L.dim
    if L.variant is LambdaVariant.BOX:
        return [_axis(0.0, min(g, s), delta) for g in L.upper]
    return [_axis(-s, s, delta)] * L.dim


def multiplier_grid(inst: ProblemInstance, s: float, delta: float) -> FloatArray:
    """Grid points of step delta in Lambda within the ball of radius s."""
    P = _product(multiplier_axes(inst, s, delta))
    keep = np.linalg.norm(P, axis=1) <= s * (1.0 + 1e-12)
    keep &= np.array([inst.Lambda.contains(p, 1e-12) for p in P], dtype=bool)
    return P[keep]


def oracle_tolerance(inst: ProblemInstance, r: float, s: float, delta: float) -> float:
    """
    Combined violation a grid neighbour of an exact solution can carry:
    half a diagonal step times the Lipschitz bounds of both parts on
    K(r) x Y(s).
    """
    half_step = 0.5 * delta * float(np.sqrt(inst.n + inst.m))
    b_norm = inst.b.norm
    v_lipschitz = lipschitz_estimate(inst, r) + b_norm
    return half_step * (2.0 * r * v_lipschitz + b_norm * (2.0 * s + r))


def probe_grid(n: int, r: float, delta: float, per_axis: int) -> FloatArray:
    """Test points v: the candidate grid in one dimension, a coarse grid otherwise."""
    if n == 1:
        return state_grid(1, r, delta)
    P = _product([np.linspace(-r, r, per_axis)] * n)
    return P[np.linalg.norm(P, axis=1) <= r * (1.0 + 1e-12)]


def brute_force_oracle(
    inst: ProblemInstance,
    r: float,
    s: float,
    delta: float,
    tol: float,
    test_points_per_axis: int = TEST_POINTS_PER_AXIS,
    capture: float = 0.0,
) -> OracleResult:
    """
    All grid points of K(r) x Y(s) whose combined violation against every
    grid test point is at most `tol`.

    Raises:
        DimensionLimit: n_V + m_E > 4
        BudgetExceeded: the candidate grid has more than 1e8 points
    """
    if not delta > 0.0:
        raise ValueError(f"delta must be > 0, got {delta}")
    n, m = inst.n, inst.m
    if n + m > MAX_TOTAL_DIM:
        raise DimensionLimit(f"the grid oracle needs n_V + m_E <= {MAX_TOTAL_DIM}, got {n + m}")

    u_axis = len(_axis(-r, r, delta))
    budget = float(u_axis) ** n * float(
        np.prod([len(a) for a in multiplier_axes(inst, s, delta)])
    )
    if budget > MAX_GRID_POINTS:
        raise BudgetExceeded(f"grid of {budget:.3g} points exceeds {MAX_GRID_POINTS:.0e}")

    U = state_grid(n, r, delta)
    Lam = multiplier_grid(inst, s, delta)
    V = probe_grid(n, r, delta, test_points_per_axis)
    logger.info(f"oracle: {U.shape[0]} x {Lam.shape[0]} candidates, {V.shape[0]} test points")

    G, B = inst.G, inst.B
    kept_u: list[FloatArray] = []
    kept_lam: list[FloatArray] = []
    kept_val: list[FloatArray] = []
    for u in U:
        D = V - u
        GD = D @ G.T
        j0 = inst.J.clarke_dir_batch(np.broadcast_to(G @ u, GD.shape), GD, capture)
        base = D @ (inst.f - inst.A.apply(u)) - j0
        v_part = np.max(base[None, :] - Lam @ (B @ D.T), axis=1)

        w = B @ u
        rho_part = float(np.max(Lam @ w)) - Lam @ w
        total = np.maximum(v_part, 0.0) + np.maximum(rho_part, 0.0)
        hit = total <= tol
        if np.any(hit):
            kept_u.append(np.broadcast_to(u, (int(hit.sum()), n)))
            kept_lam.append(Lam[hit])
            kept_val.append(total[hit])

    if kept_u:
        U_ok, L_ok, vals = np.vstack(kept_u), np.vstack(kept_lam), np.concatenate(kept_val)
    else:
        U_ok, L_ok, vals = np.zeros((0, n)), np.zeros((0, m)), np.zeros(0)

    touches = bool(
        U_ok.shape[0]
        and (
            np.any(np.linalg.norm(U_ok, axis=1) >= r - delta)
            or np.any(np.linalg.norm(L_ok, axis=1) >= s - delta)
        )
    )
    if touches:
        logger.warning("oracle cluster touches the grid boundary; enlarge r or s")
    if U_ok.shape[0] == 0:
        logger.warning("oracle found no grid point within tolerance")
    return OracleResult(U_ok, L_ok, vals, delta, touches)
