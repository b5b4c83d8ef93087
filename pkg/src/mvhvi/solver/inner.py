"""
Inner solve for u at fixed lambda: find u with

    f - A(u) - B^T lambda  in  G^T dJ(G u)

which is the first inequality of the problem tested against every v in V.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import lsq_linear

from mvhvi.core.errors import InnerDivergence
from mvhvi.core.problem import ProblemInstance
from mvhvi.core.types import FloatArray
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec
from mvhvi.solver.config import SolverConfig, default_steps, lipschitz_estimate
from mvhvi.utils.logging import get_logger

logger = get_logger(__name__)

ETA_FLOOR_RATIO = 1e-6
NEWTON_STEPS = 30
ACTIVE_SET_ROUNDS = 12
SNAP_REACH = 1e3


def inclusion_target(inst: ProblemInstance, u: FloatArray, lam: FloatArray) -> FloatArray:
    """f - A(u) - B^T lambda."""
    return inst.f - inst.A.apply(u) - inst.B.T @ lam


def distance_to_image(
    G: FloatArray, target: FloatArray, lo: FloatArray, hi: FloatArray
) -> tuple[float, FloatArray]:
    """
    min over xi in [lo, hi] of |G^T xi - target|, with the minimizer.
    Degenerate intervals are substituted; a single free coordinate is
    handled in closed form, more by bounded least squares.
    """
    xi = lo.copy()
    free = hi > lo
    rest = target - G[~free].T @ lo[~free]
    idx = np.flatnonzero(free)
    if idx.size == 0:
        return float(np.linalg.norm(rest)), xi
    if idx.size == 1:
        i = idx[0]
        g = G[i]
        gg = float(g @ g)
        xi[i] = np.clip(float(g @ rest) / gg, lo[i], hi[i]) if gg > 0.0 else lo[i]
        return float(np.linalg.norm(rest - xi[i] * g)), xi
    result = lsq_linear(G[idx].T, rest, bounds=(lo[idx], hi[idx]), method="bvls")
    xi[idx] = result.x
    return float(np.linalg.norm(G[idx].T @ result.x - rest)), xi


def inclusion_residual(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, capture: float = 0.0
) -> float:
    """dist(f - A(u) - B^T lambda, G^T box(G u))."""
    u = np.asarray(u, dtype=float)
    box = inst.J.box(inst.G @ u, capture)
    dist, _ = distance_to_image(inst.G, inclusion_target(inst, u, lam), box.lo, box.hi)
    return dist


def median_selection(
    inst: ProblemInstance, u: FloatArray, target: FloatArray, capture: float
) -> FloatArray:
    """Box element nearest to solving G^T xi = target, by clipping the least-squares xi."""
    box = inst.J.box(inst.G @ u, capture)
    xi, *_ = np.linalg.lstsq(inst.G.T, target, rcond=None)
    return box.nearest(xi)


def pin_widths(J: PiecewiseC1Spec, x: FloatArray, width: float, capture: float) -> FloatArray:
    """Per coordinate, how close x_i must be to its nearest kink to be pinned."""
    nearest, _ = J.nearest_breakpoints(x)
    return np.maximum(width, capture * np.maximum(1.0, np.abs(np.nan_to_num(nearest))))


@dataclass
class ActiveSet:
    """
    Which coordinates of x = G u sit at a breakpoint (pinned, with the
    breakpoint in `target`) and which piece every other coordinate is on.
    """

    pinned: np.ndarray
    target: FloatArray
    piece: np.ndarray

    @classmethod
    def around(cls, J: PiecewiseC1Spec, x: FloatArray, widths: FloatArray) -> ActiveSet:
        nearest, dist = J.nearest_breakpoints(x)
        pinned = dist <= widths
        piece = np.array([int(c.piece_index(x[i])) for i, c in enumerate(J.coordinates)])
        return cls(pinned, np.where(pinned, nearest, np.nan), piece)

    def key(self) -> tuple[bytes, bytes]:
        return self.pinned.tobytes(), np.where(self.pinned, -1, self.piece).tobytes()

    def coefficients(self, J: PiecewiseC1Spec) -> tuple[FloatArray, FloatArray]:
        q = np.array([c.quad_coef[self.piece[i]] for i, c in enumerate(J.coordinates)])
        a = np.array([c.lin_coef[self.piece[i]] for i, c in enumerate(J.coordinates)])
        return q, a

    def one_sided(self, J: PiecewiseC1Spec, i: int) -> tuple[int, float, float]:
        """Breakpoint index j that coordinate i is pinned to, with j_i' left and right of it."""
        c, t = J.coordinates[i], self.target[i]
        j = int(np.searchsorted(c.bp_array, t))
        left = float(c.derivative_on(np.array(j), t))
        right = float(c.derivative_on(np.array(j + 1), t))
        return j, left, right

    def pinned_bounds(self, J: PiecewiseC1Spec) -> tuple[FloatArray, FloatArray]:
        """Generalized gradient intervals of the pinned coordinates, in order."""
        sides = [self.one_sided(J, i)[1:] for i in np.flatnonzero(self.pinned)]
        lo = np.array([min(s) for s in sides])
        hi = np.array([max(s) for s in sides])
        return lo, hi

    def revise(self, J: PiecewiseC1Spec, x: FloatArray, mu: FloatArray, tol: float) -> bool:
        """
        Pin free coordinates that left their piece at the breakpoint they
        crossed; release pinned ones whose multiplier left the generalized
        gradient, onto the side it points to. Returns whether anything moved.
        """
        changed = False
        multipliers = iter(mu)
        for i, c in enumerate(J.coordinates):
            t = c.bp_array
            if self.pinned[i]:
                value = float(next(multipliers))
                j, dl, dr = self.one_sided(J, i)
                if value > max(dl, dr) + tol:
                    self.piece[i] = j + 1 if dr >= dl else j
                elif value < min(dl, dr) - tol:
                    self.piece[i] = j if dl <= dr else j + 1
                else:
                    continue
                self.pinned[i] = False
                self.target[i] = np.nan
                changed = True
                continue
            p = int(self.piece[i])
            if p < t.size and x[i] > t[p]:
                self.pinned[i], self.target[i] = True, t[p]
                changed = True
            elif p > 0 and x[i] < t[p - 1]:
                self.pinned[i], self.target[i] = True, t[p - 1]
                changed = True
        return changed


def smooth_solve(
    inst: ProblemInstance, u: FloatArray, c: FloatArray, active: ActiveSet
) -> Optional[tuple[FloatArray, FloatArray]]:
    """
    Newton on the inclusion with the active set frozen, which makes it the
    smooth system

        A(u) + G_F^T (q_F * G_F u + a_F) + G_P^T mu = c,   G_P u = t_P

    Returns (u, mu), or None when the iterates blow up.
    """
    pinned = active.pinned
    q, a = active.coefficients(inst.J)
    G_F, G_P = inst.G[~pinned], inst.G[pinned]
    q_F, a_F = q[~pinned], a[~pinned]
    t_P = active.target[pinned]
    n, p = inst.n, int(pinned.sum())
    deficient = p > 0 and int(np.linalg.matrix_rank(G_P)) < p

    z = np.concatenate([u, np.zeros(p)])
    for _ in range(NEWTON_STEPS):
        uu, mu = z[:n], z[n:]
        F = np.concatenate(
            [
                inst.A.apply(uu) + G_F.T @ (q_F * (G_F @ uu) + a_F) + G_P.T @ mu - c,
                G_P @ uu - t_P,
            ]
        )
        if np.linalg.norm(F) <= 1e-15 * max(1.0, float(np.linalg.norm(c))):
            break
        K = np.zeros((n + p, n + p))
        K[:n, :n] = inst.A.jacobian(uu) + G_F.T @ (q_F[:, None] * G_F)
        K[:n, n:] = G_P.T
        K[n:, :n] = G_P
        step = None
        if not deficient:
            try:
                step = np.linalg.solve(K, -F)
            except np.linalg.LinAlgError:
                pass
        if step is None:
            step, *_ = np.linalg.lstsq(K, -F, rcond=None)
        z = z + step
        if not np.all(np.isfinite(z)):
            return None
        if np.linalg.norm(step) <= 1e-15 * max(1.0, float(np.linalg.norm(z))):
            break
    return z[:n], z[n:]


def _fitted_multipliers(
    inst: ProblemInstance,
    u: FloatArray,
    c: FloatArray,
    active: ActiveSet,
    mu: FloatArray,
    tol: float,
) -> FloatArray:
    pinned = active.pinned
    q, a = active.coefficients(inst.J)
    G_F, G_P = inst.G[~pinned], inst.G[pinned]
    rest = c - inst.A.apply(u) - G_F.T @ (q[~pinned] * (G_F @ u) + a[~pinned])
    lo, hi = active.pinned_bounds(inst.J)
    dist, xi = distance_to_image(G_P, rest, lo, hi)
    return xi if dist <= tol else mu


def polish(
    inst: ProblemInstance,
    u: FloatArray,
    c: FloatArray,
    width: float,
    capture: float,
    tol: float,
) -> Optional[FloatArray]:
    """
    Primal-dual active-set search started from the coordinates within
    `width` of a kink. Each round solves the frozen smooth system and
    revises the set; it stops on a fixed point or a repeated set. When more
    coordinates are pinned than G_P has rank, the multipliers are taken
    from the bounded least-squares fit inside their intervals.
    """
    x = inst.G @ u
    active = ActiveSet.around(inst.J, x, pin_widths(inst.J, x, width, capture))
    seen: set[tuple[bytes, bytes]] = set()
    for _ in range(ACTIVE_SET_ROUNDS):
        seen.add(active.key())
        solved = smooth_solve(inst, u, c, active)
        if solved is None:
            return None
        u, mu = solved
        if mu.size:
            mu = _fitted_multipliers(inst, u, c, active, mu, tol)
        if not active.revise(inst.J, inst.G @ u, mu, tol) or active.key() in seen:
            break
    return u


def snap_to_kinks(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    c: FloatArray,
    cfg: SolverConfig,
) -> FloatArray:
    """
    Move coordinates of G u that lie inside the capture window exactly onto
    their breakpoint. The snapped point is kept when its inclusion residual
    exceeds tol_u by no more than the Lipschitz bound times the move.
    """
    x = inst.G @ u
    widths = pin_widths(inst.J, x, 0.0, cfg.kink_capture)
    active = ActiveSet.around(inst.J, x, widths)
    if not active.pinned.any():
        return u
    solved = smooth_solve(inst, u, c, active)
    if solved is None:
        return u
    snapped = solved[0]
    move = float(np.linalg.norm(snapped - u))
    scale = max(1.0, float(np.linalg.norm(u)))
    if move > SNAP_REACH * cfg.kink_capture * scale:
        return u
    slack = cfg.tol_u + lipschitz_estimate(inst, scale + move) * move
    if inclusion_residual(inst, snapped, lam, cfg.kink_capture) > slack:
        return u
    return snapped


def inner_solve_u(
    inst: ProblemInstance,
    lam: FloatArray,
    u0: FloatArray,
    cfg: SolverConfig,
    eta: Optional[float] = None,
) -> FloatArray:
    """
    Damped fixed point u <- u - eta (A(u) + G^T xi(u) + B^T lambda - f) with
    the median selection xi(u), halving eta whenever the inclusion residual
    grows, and an active-set polish tried on every sweep. The accepted u is
    snapped onto kinks inside the capture window.

    Raises InnerDivergence after cfg.max_inner sweeps.
    """
    lam = np.asarray(lam, dtype=float)
    u = np.array(u0, dtype=float)
    c = inst.f - inst.B.T @ lam
    capture = cfg.kink_capture
    if eta is None:
        eta = cfg.inner_step or default_steps(inst, max(1.0, float(np.linalg.norm(u))))[1]
    eta_floor = ETA_FLOOR_RATIO * eta
    row_norm = float(np.max(np.linalg.norm(inst.G, axis=1))) if inst.k else 0.0
    mu_tol = cfg.tol_u / max(row_norm, 1.0)

    res = inclusion_residual(inst, u, lam, capture)
    first = res
    last_move = 0.0
    for sweep in range(cfg.max_inner):
        if res <= cfg.tol_u:
            return snap_to_kinks(inst, u, lam, c, cfg)

        candidate = polish(inst, u, c, 10.0 * last_move * row_norm, capture, mu_tol)
        if candidate is not None:
            cand_res = inclusion_residual(inst, candidate, lam, capture)
            if cand_res <= cfg.tol_u:
                logger.debug(f"inner solve polished after {sweep} sweeps")
                return snap_to_kinks(inst, candidate, lam, c, cfg)

        target = c - inst.A.apply(u)
        xi = median_selection(inst, u, target, capture)
        step = inst.A.apply(u) + inst.G.T @ xi - c
        trial = u - eta * step
        trial_res = inclusion_residual(inst, trial, lam, capture)
        if trial_res > res and eta > eta_floor:
            eta = max(0.5 * eta, eta_floor)
            continue
        last_move = float(np.linalg.norm(trial - u))
        u, res = trial, trial_res

    if res <= cfg.tol_u:
        return snap_to_kinks(inst, u, lam, c, cfg)
    raise InnerDivergence(
        f"inner solve stopped after {cfg.max_inner} sweeps at residual {res:.3e}",
        residual=res,
        growing=res > first,
    )
