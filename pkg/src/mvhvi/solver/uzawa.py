"""
Uzawa-type outer iteration on the multiplier with ball continuation.

Iterates stay inside K(r) x Y(s) (balls of the current schedule radii). Two
consecutive boundary contacts advance the schedule; a solve is accepted
only from the interior, where the ball constraints are inactive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Optional, Union

import numpy as np

from mvhvi.core.errors import HypothesisError, OuterNonConvergence, ScheduleExhausted
from mvhvi.core.problem import ProblemInstance, SolutionPair
from mvhvi.core.types import FloatArray
from mvhvi.hypotheses.monotonicity import audit_relaxed_monotonicity
from mvhvi.solver.complementarity import complementarity_residual
from mvhvi.solver.config import SolverConfig, default_steps
from mvhvi.solver.inner import inner_solve_u
from mvhvi.utils.csvio import render_csv, write_csv
from mvhvi.utils.logging import get_logger

if TYPE_CHECKING:
    from mvhvi.verify.residuals import ProbeSettings

logger = get_logger(__name__)

TRACE_HEADER = ("iter", "r", "s", "u_update_norm", "compl_residual")
CONTACTS_TO_ADVANCE = 2
CONTACT_TOL = 1e-12


class Termination(str, Enum):
    CONVERGED = "converged"
    RUNNING = "running"


@dataclass(frozen=True)
class TraceRow:
    iter: int
    r: float
    s: float
    u_update_norm: float
    compl_residual: float


@dataclass
class SolveTrace:
    """Per-iterate record of one solve."""

    rows: list[TraceRow] = field(default_factory=list)
    termination: Termination = Termination.RUNNING
    schedule_index: int = 0
    outer_step: float = 0.0

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    @property
    def iterations(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        return render_csv(TRACE_HEADER, self._cells())

    def write(self, path: Union[str, Path]) -> Path:
        return write_csv(path, TRACE_HEADER, self._cells())

    def _cells(self) -> list[tuple[object, ...]]:
        return [(r.iter, r.r, r.s, r.u_update_norm, r.compl_residual) for r in self.rows]


def check_gate(inst: ProblemInstance, cfg: SolverConfig) -> None:
    report = audit_relaxed_monotonicity(inst, cfg.gate_samples, seed=0, capture=cfg.kink_capture)
    if not report.passed:
        entry = report.entry("H(A)(ii)")
        raise HypothesisError(
            f"relaxed monotonicity fails (margin {entry.margin:.3e}); "
            "the inner solve has no contraction guarantee"
        )


def _into_ball(u: FloatArray, radius: float) -> tuple[FloatArray, bool]:
    norm = float(np.linalg.norm(u))
    if norm >= radius * (1.0 - CONTACT_TOL):
        if norm > radius:
            u = u * (radius / norm)
        return u, True
    return u, False


def solve(
    inst: ProblemInstance,
    cfg: Optional[SolverConfig] = None,
    u0: Optional[FloatArray] = None,
    lam0: Optional[FloatArray] = None,
    certify: bool = True,
    probes: Optional[ProbeSettings] = None,
) -> tuple[SolutionPair, SolveTrace]:
    """
    Solve the instance by alternating

        lambda <- P_Y(s)(P_Lambda(lambda + t B u)),   u <- inner_solve_u(lambda)

    with u kept in the ball of radius r. Stops when no ball is touched and
    both the u-update and the complementarity residual are below
    cfg.tol_outer. With `certify` the returned pair carries a full
    residual report.

    Raises:
        HypothesisError: relaxed monotonicity fails and cfg.gate is set
        ScheduleExhausted: the largest ball is still touched
        OuterNonConvergence: cfg.max_outer iterations without convergence
        InnerDivergence: propagated from the inner solve
    """
    cfg = cfg or SolverConfig()
    if cfg.gate:
        check_gate(inst, cfg)

    schedule = cfg.radii_schedule
    index = 0
    r, s = schedule[index]
    t, eta = default_steps(inst, r)
    t = cfg.outer_step or t
    eta = cfg.inner_step or eta

    u = np.zeros(inst.n) if u0 is None else np.array(u0, dtype=float)
    lam = np.zeros(inst.m) if lam0 is None else np.array(lam0, dtype=float)
    lam = inst.Lambda.project(lam)
    u, _ = _into_ball(u, r)
    lam, _ = inst.Lambda.retract(lam, s)

    trace = SolveTrace(outer_step=t)
    contacts = 0
    logger.debug(f"solve '{inst.name}': t={t:.3e}, eta={eta:.3e}, r={r:g}, s={s:g}")

    for it in range(1, cfg.max_outer + 1):
        lam_new = inst.Lambda.project(lam + t * (inst.B @ u))
        lam_new, touched_s = inst.Lambda.retract(lam_new, s)
        u_new = inner_solve_u(inst, lam_new, u, cfg, eta)
        u_new, touched_r = _into_ball(u_new, r)

        du = float(np.linalg.norm(u_new - u))
        compl = complementarity_residual(inst, u_new, lam_new)
        trace.append(TraceRow(it, r, s, du, compl))
        u, lam = u_new, lam_new

        if touched_r or touched_s:
            contacts += 1
            if contacts >= CONTACTS_TO_ADVANCE:
                index += 1
                if index >= len(schedule):
                    raise ScheduleExhausted(
                        f"iterates still touch the largest ball (r={r:g}, s={s:g}) "
                        f"after {it} iterations; coercivity is likely violated"
                    )
                r, s = schedule[index]
                eta = cfg.inner_step or default_steps(inst, r)[1]
                contacts = 0
                logger.info(f"schedule advanced to index {index}: r={r:g}, s={s:g}")
            continue
        contacts = 0

        if du <= cfg.tol_outer and compl <= cfg.tol_outer:
            trace.termination = Termination.CONVERGED
            trace.schedule_index = index
            logger.info(
                f"solve '{inst.name}' converged in {it} iterations "
                f"(|du|={du:.2e}, compl={compl:.2e})"
            )
            pair = SolutionPair(u, lam)
            if certify:
                from mvhvi.verify.residuals import ProbeSettings, residual_report

                pair = pair.with_residuals(
                    residual_report(inst, u, lam, probes or ProbeSettings())
                )
            return pair, trace

    raise OuterNonConvergence(
        f"no convergence in {cfg.max_outer} outer iterations "
        f"(last |du|={trace.rows[-1].u_update_norm:.3e}, "
        f"compl={trace.rows[-1].compl_residual:.3e})"
    )
