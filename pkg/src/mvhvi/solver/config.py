"""Solver settings and the default step-size heuristics."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mvhvi.core.config import SolverSettings
from mvhvi.core.problem import ProblemInstance
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.hypotheses.monotonicity import exact_m_A

MAX_SCHEDULE_INDEX = 20
FALLBACK_OUTER_STEP = 0.1


def default_schedule(last: int = MAX_SCHEDULE_INDEX) -> tuple[tuple[float, float], ...]:
    """Radii (r_j, s_j) = (2^j, 2^j) for j = 0..last."""
    return tuple((2.0**j, 2.0**j) for j in range(last + 1))


@dataclass(frozen=True)
class SolverConfig:
    """
    Settings of one Uzawa solve. outer_step (t) and inner_step (eta) default
    to the heuristics in default_steps() when left as None.
    """

    outer_step: Optional[float] = None
    inner_step: Optional[float] = None
    tol_u: float = 1e-10
    tol_outer: float = 1e-10
    max_outer: int = 20000
    max_inner: int = 5000
    radii_schedule: tuple[tuple[float, float], ...] = default_schedule()
    restarts: int = 20
    kink_capture: float = 1e-10
    workers: int = 1
    gate: bool = True
    gate_samples: int = 2000

    def __post_init__(self) -> None:
        for name in ("outer_step", "inner_step"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise ValueError(f"{name} must be > 0, got {value}")
        if not (self.tol_u > 0.0 and self.tol_outer > 0.0):
            raise ValueError("tolerances must be > 0")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.kink_capture < 0.0:
            raise ValueError("kink_capture must be >= 0")
        schedule = tuple((float(r), float(s)) for r, s in self.radii_schedule)
        if not schedule:
            raise ValueError("radii_schedule must be nonempty")
        for (r0, s0), (r1, s1) in zip(schedule, schedule[1:]):
            if not (r1 > r0 and s1 > s0):
                raise ValueError("radii_schedule must be strictly increasing")
        if schedule[0][0] <= 0.0 or schedule[0][1] <= 0.0:
            raise ValueError("radii must be > 0")
        object.__setattr__(self, "radii_schedule", schedule)

    @classmethod
    def from_settings(cls, settings: SolverSettings, **overrides: object) -> SolverConfig:
        base = cls(
            tol_u=settings.tol_u,
            tol_outer=settings.tol_outer,
            max_outer=settings.max_outer,
            max_inner=settings.max_inner,
            restarts=settings.restarts,
            kink_capture=settings.kink_capture,
            workers=settings.workers,
        )
        return dataclasses.replace(base, **overrides) if overrides else base

    def starting_at(self, index: int) -> SolverConfig:
        """Same settings with the schedule truncated to start at `index`."""
        return dataclasses.replace(self, radii_schedule=self.radii_schedule[index:])


def monotonicity_modulus(inst: ProblemInstance) -> float:
    """
    Strong monotonicity constant c of A + G^T dJ(G .): c_h for a quadratic
    h, otherwise m_A - m_J |gamma|^2 clamped at 0.
    """
    if inst.h.is_power and inst.h.tau == 2.0:
        return inst.h.c_h
    m_J = inst.J.relaxed_monotonicity_constant
    if not np.isfinite(m_J):
        return 0.0
    return max(exact_m_A(inst.A) - m_J * inst.gamma.operator_norm**2, 0.0)


def lipschitz_estimate(inst: ProblemInstance, radius: float) -> float:
    """|P| + power-term bound on the ball + |gamma|^2 * max |q|."""
    return inst.A.lipschitz_bound(radius) + inst.gamma.operator_norm**2 * inst.J.max_curvature


def default_steps(inst: ProblemInstance, radius: float) -> tuple[float, float]:
    """
    (t, eta) with eta = c/(2 L^2) and t = min(alpha_b^2/(2c), c/|B|^2),
    falling back to t = 0.1 when alpha_b = 0.
    """
    L = lipschitz_estimate(inst, radius)
    c = monotonicity_modulus(inst)
    if c <= 0.0:
        c = 0.1 * max(L, 1.0)
    eta = 0.5 * c / L**2 if L > 0.0 else 1.0
    alpha_b = infsup_constant(inst.b)
    if alpha_b > 0.0:
        t = min(alpha_b**2 / (2.0 * c), c / inst.b.norm**2)
    else:
        t = FALLBACK_OUTER_STEP
    return t, eta
