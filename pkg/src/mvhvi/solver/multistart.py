"""Repeated solves from random starting points, reporting solution spreads."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from mvhvi.core.errors import SolverError
from mvhvi.core.problem import ProblemInstance, SolutionPair
from mvhvi.core.types import FloatArray
from mvhvi.solver.config import SolverConfig
from mvhvi.solver.uzawa import check_gate, solve
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng, uniform_ball

logger = get_logger(__name__)

SPREAD_FACTOR = 10.0


class UniquenessStatus(str, Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    INCOMPLETE = "Incomplete"
    NOT_APPLICABLE = "NotApplicable"


@dataclass
class UniquenessReport:
    status: UniquenessStatus
    u_spread: float
    lambda_spread: float
    solutions: list[SolutionPair] = field(default_factory=list)
    failures: int = 0
    seed: int = 0

    @property
    def consistent(self) -> bool:
        return self.status is UniquenessStatus.CONSISTENT


def pairwise_spread(points: FloatArray) -> float:
    """Largest pairwise Euclidean distance between the rows."""
    if points.shape[0] < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    return float(np.max(np.linalg.norm(diff, axis=-1)))


def starting_points(
    inst: ProblemInstance, count: int, seed: int
) -> list[tuple[FloatArray, FloatArray]]:
    """Random (u0, lambda0) pairs; lambda0 is projected onto Lambda."""
    rng = make_rng(seed)
    radius = 2.0 * inst.scale
    U = uniform_ball(rng, count, inst.n, radius)
    R = uniform_ball(rng, count, inst.m, radius) if inst.m else np.zeros((count, 0))
    return [(U[i], inst.Lambda.project(R[i])) for i in range(count)]


def schedule_index_for(cfg: SolverConfig, u0: FloatArray, lam0: FloatArray) -> int:
    """First schedule entry whose balls hold the start strictly inside."""
    nu, nl = float(np.linalg.norm(u0)), float(np.linalg.norm(lam0))
    for index, (r, s) in enumerate(cfg.radii_schedule):
        if nu < r and nl < s:
            return index
    return len(cfg.radii_schedule) - 1


def multi_start(
    inst: ProblemInstance, cfg: Optional[SolverConfig] = None, seed: int = 0
) -> UniquenessReport:
    """
    Run cfg.restarts solves from random starts. The u-components must agree
    (Consistent when their spread is at most 10 * tol_outer); multipliers
    may legitimately differ and are only reported. Agreeing survivors with
    failed runs beside them are Incomplete. With h = 0 uniqueness is not
    claimed and the report is NotApplicable.
    """
    cfg = cfg or SolverConfig()
    starts = starting_points(inst, cfg.restarts, seed)

    def run(start: tuple[FloatArray, FloatArray]) -> Optional[SolutionPair]:
        try:
            index = schedule_index_for(cfg, *start)
            pair, _ = solve(
                inst, cfg.starting_at(index), u0=start[0], lam0=start[1], certify=False
            )
            return pair
        except SolverError as e:
            logger.warning(f"multi-start run failed: {e}")
            return None

    if cfg.gate:
        check_gate(inst, cfg)
        cfg = dataclasses.replace(cfg, gate=False)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(start) for start in starts]

    solutions = [p for p in results if p is not None]
    failures = len(results) - len(solutions)
    if not solutions:
        raise SolverError(f"all {len(results)} multi-start runs failed")

    u_spread = pairwise_spread(np.array([p.u for p in solutions]))
    lam_spread = pairwise_spread(np.array([p.lam for p in solutions]))
    if not inst.h.is_power:
        status = UniquenessStatus.NOT_APPLICABLE
    elif u_spread > SPREAD_FACTOR * cfg.tol_outer:
        status = UniquenessStatus.INCONSISTENT
        logger.warning(f"u-spread {u_spread:.3e} across {len(solutions)} restarts")
    elif failures:
        status = UniquenessStatus.INCOMPLETE
        logger.warning(f"{failures} of {len(results)} restarts failed; uniqueness not established")
    else:
        status = UniquenessStatus.CONSISTENT
    return UniquenessReport(status, u_spread, lam_spread, solutions, failures, seed)
