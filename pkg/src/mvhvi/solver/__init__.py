"""Uzawa outer iteration, inner inclusion solve and multi-start."""

from mvhvi.solver.complementarity import complementarity_residual
from mvhvi.solver.config import SolverConfig, default_schedule, default_steps
from mvhvi.solver.inner import inclusion_residual, inner_solve_u
from mvhvi.solver.multistart import UniquenessReport, UniquenessStatus, multi_start
from mvhvi.solver.uzawa import SolveTrace, Termination, TraceRow, solve

__all__ = [
    "SolveTrace",
    "SolverConfig",
    "Termination",
    "TraceRow",
    "UniquenessReport",
    "UniquenessStatus",
    "complementarity_residual",
    "default_schedule",
    "default_steps",
    "inclusion_residual",
    "inner_solve_u",
    "multi_start",
    "solve",
]
