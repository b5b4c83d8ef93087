"""
Cross-checks against the two classical special cases:

  mixed-vi  J = 0: with symmetric positive definite P and Lambda = R+^m the
            problem is the KKT system of min u^T P u / 2 - f^T u s.t. Bu <= 0,
            solved here by active-set enumeration.
  pure-hvi  B = 0: the multiplier drops out, so u must not depend on it and
            must solve the hemivariational inequality alone.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from mvhvi.core.errors import DimensionLimit, HypothesisGate
from mvhvi.core.lambda_set import MAX_ENUM_DIM, LambdaVariant
from mvhvi.core.problem import ProblemInstance, SolutionPair
from mvhvi.core.types import FloatArray
from mvhvi.solver.config import SolverConfig
from mvhvi.solver.inner import inclusion_residual, inner_solve_u
from mvhvi.solver.uzawa import solve
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng

logger = get_logger(__name__)

KKT_TOL = 1e-10
LAMBDA_TRIALS = 5


class SpecialCase(str, Enum):
    MIXED_VI = "mixed-vi"
    PURE_HVI = "pure-hvi"


@dataclass(frozen=True, eq=False)
class SpecialCaseReport:
    case: SpecialCase
    deviation: float
    reference_u: FloatArray
    reference_lam: FloatArray
    solver_u: FloatArray
    inclusion_residual: float = 0.0

    def passed(self, tol: float = 1e-8) -> bool:
        return self.deviation <= tol and self.inclusion_residual <= tol


def lcp_active_set(
    P: FloatArray, B: FloatArray, f: FloatArray, tol: float = KKT_TOL
) -> tuple[FloatArray, FloatArray]:
    """
    Solve P u + B^T lambda = f, lambda >= 0, B u <= 0, lambda^T B u = 0 by
    trying every active set, smallest first.

    Raises:
        DimensionLimit: more than 8 constraints
    """
    n, m = P.shape[0], B.shape[0]
    if m > MAX_ENUM_DIM:
        raise DimensionLimit(f"active-set enumeration is limited to m_E <= {MAX_ENUM_DIM}")
    scale = max(1.0, float(np.linalg.norm(f)))
    for size in range(m + 1):
        for active in itertools.combinations(range(m), size):
            idx = list(active)
            Ba = B[idx]
            K = np.block([[P, Ba.T], [Ba, np.zeros((size, size))]])
            rhs = np.concatenate([f, np.zeros(size)])
            z, *_ = np.linalg.lstsq(K, rhs, rcond=None)
            if np.linalg.norm(K @ z - rhs) > tol * scale:
                continue
            u = z[:n]
            lam = np.zeros(m)
            lam[idx] = z[n:]
            if np.all(lam >= -tol * scale) and np.all(B @ u <= tol * scale):
                return u, np.maximum(lam, 0.0)
    raise HypothesisGate("no active set satisfies the KKT conditions")


def _mixed_vi(inst: ProblemInstance, pair: SolutionPair) -> SpecialCaseReport:
    P = inst.A.linear_part
    if not inst.A.is_linear or not np.allclose(P, P.T, atol=1e-12):
        raise HypothesisGate("the mixed-vi crosscheck needs a symmetric linear operator")
    if inst.A.sym_min_eigenvalue <= 0.0:
        raise HypothesisGate("the mixed-vi crosscheck needs a positive definite operator")
    u_ref, lam_ref = lcp_active_set(P, inst.B, inst.f)
    deviation = float(np.linalg.norm(pair.u - u_ref))
    return SpecialCaseReport(SpecialCase.MIXED_VI, deviation, u_ref, lam_ref, np.array(pair.u))


def _pure_hvi(
    inst: ProblemInstance, pair: SolutionPair, cfg: SolverConfig, seed: int
) -> SpecialCaseReport:
    rng = make_rng(seed)
    trials = [np.zeros(inst.m)] + [
        inst.Lambda.project(2.0 * inst.scale * rng.standard_normal(inst.m))
        for _ in range(LAMBDA_TRIALS)
    ]
    u_ref = np.array(pair.u)
    deviation = 0.0
    for lam in trials:
        u = inner_solve_u(inst, lam, np.zeros(inst.n), cfg)
        deviation = max(deviation, float(np.linalg.norm(u - u_ref)))
    if inst.J.is_zero:
        u_lin = np.linalg.solve(inst.A.linear_part, inst.f) if inst.A.is_linear else u_ref
        deviation = max(deviation, float(np.linalg.norm(u_lin - u_ref)))
    res = inclusion_residual(inst, u_ref, np.zeros(inst.m), cfg.kink_capture)
    return SpecialCaseReport(
        SpecialCase.PURE_HVI, deviation, u_ref, np.zeros(inst.m), np.array(pair.u), res
    )


def special_case_crosscheck(
    inst: ProblemInstance,
    cfg: Optional[SolverConfig] = None,
    pair: Optional[SolutionPair] = None,
    seed: int = 0,
) -> SpecialCaseReport:
    """
    Compare the main solver with the special-case reference. J = 0 with
    Lambda = R+^m is checked as mixed-vi, otherwise B = 0 as pure-hvi.

    Raises:
        HypothesisGate: neither case applies, or its extra assumptions fail
        DimensionLimit: mixed-vi with more than 8 constraints
    """
    cfg = cfg or SolverConfig()
    mixed = inst.J.is_zero and inst.Lambda.variant is LambdaVariant.ORTHANT
    if not mixed and not inst.b.is_zero:
        raise HypothesisGate("special-case crosscheck needs J = 0 (with Lambda = R+^m) or B = 0")
    if pair is None:
        pair, _ = solve(inst, cfg, certify=False)
    if mixed:
        report = _mixed_vi(inst, pair)
    else:
        report = _pure_hvi(inst, pair, cfg, seed)
    logger.info(f"{report.case.value} crosscheck: deviation {report.deviation:.3e}")
    return report
