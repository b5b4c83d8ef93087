"""
Finite-dimensional probes of the solution set and the solution map f -> S(f):
convexity of S(f), boundedness on bounded sets of loads, Hoelder stability
of the u-component and sequential closedness (upper semicontinuity).
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from mvhvi.core.errors import HypothesisGate, SolverError, VerificationAnomaly
from mvhvi.core.problem import ProblemInstance, SolutionPair
from mvhvi.core.types import FloatArray
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.solver.config import SolverConfig
from mvhvi.solver.uzawa import check_gate, solve
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng, uniform_ball
from mvhvi.verify.oracle import OracleResult
from mvhvi.verify.residuals import Formulation, ProbeSettings, residual

logger = get_logger(__name__)

CERTIFY_TOL = 1e-8
DEFAULT_T_GRID = tuple(np.linspace(0.1, 0.9, 9))
MAX_BOX_VERTICES_DIM = 12
USC_DECAY_SLACK = 2.0


def _gated(inst: ProblemInstance, cfg: Optional[SolverConfig]) -> SolverConfig:
    """Run the monotonicity gate once and return a config that skips it."""
    cfg = cfg or SolverConfig()
    if cfg.gate:
        check_gate(inst, cfg)
    return dataclasses.replace(cfg, gate=False)


def _combined(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, probes: ProbeSettings
) -> float:
    return residual(inst, u, lam, Formulation.COMBINED, probes).violation


def convexity_probe(
    inst: ProblemInstance,
    sol1: SolutionPair,
    sol2: SolutionPair,
    t_grid: Sequence[float] = DEFAULT_T_GRID,
    probes: Optional[ProbeSettings] = None,
    tol: float = CERTIFY_TOL,
) -> float:
    """
    Largest combined violation along the segment between two solutions.
    For convex h the solution set is convex, so this stays within the
    certification tolerance.

    Raises:
        HypothesisGate: h is not convex
        VerificationAnomaly: an endpoint is not a certified solution
    """
    if not inst.h.convex:
        raise HypothesisGate("convexity of the solution set needs a convex h")
    probes = probes or ProbeSettings()
    for name, sol in (("sol1", sol1), ("sol2", sol2)):
        value = _combined(inst, sol.u, sol.lam, probes)
        if value > tol:
            raise VerificationAnomaly(
                f"{name} is not a certified solution (combined residual {value:.3e} > {tol:g})"
            )

    worst = 0.0
    for t in t_grid:
        u = t * sol1.u + (1.0 - t) * sol2.u
        lam = t * sol1.lam + (1.0 - t) * sol2.lam
        worst = max(worst, _combined(inst, u, lam, probes))
    return worst


def subgradient_image_bound(inst: ProblemInstance, u: FloatArray, capture: float = 0.0) -> float:
    """sup over the subgradient box at Gu of |G^T xi|."""
    box = inst.J.box(inst.G @ u, capture)
    if inst.k <= MAX_BOX_VERTICES_DIM:
        return float(np.max(np.linalg.norm(box.vertices() @ inst.G, axis=1)))
    reach = np.maximum(np.abs(box.lo), np.abs(box.hi))
    return inst.gamma.operator_norm * float(np.linalg.norm(reach))


def coercivity_chain_gap(inst: ProblemInstance, u: FloatArray) -> float:
    """
    <A(u), u> - (alpha_J + beta_J |gamma|^theta |u|^theta + |f| |u|), which is
    <= 0 at every solution (test the first inequality with v = 0 and the
    second with rho = 0).
    """
    prof = inst.profile
    norm = float(np.linalg.norm(u))
    bound = (
        prof.alpha_J
        + prof.beta_J * (inst.gamma.operator_norm * norm) ** prof.theta
        + float(np.linalg.norm(inst.f)) * norm
    )
    return float(inst.A.apply(u) @ u) - bound


def multiplier_bound_gap(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, capture: float = 0.0
) -> float:
    """alpha_b |lambda| - (|A(u)| + sup |G^T dJ(Gu)| + |f|), <= 0 at solutions."""
    alpha_b = infsup_constant(inst.b)
    rhs = (
        float(np.linalg.norm(inst.A.apply(u)))
        + subgradient_image_bound(inst, u, capture)
        + float(np.linalg.norm(inst.f))
    )
    return alpha_b * float(np.linalg.norm(lam)) - rhs


@dataclass
class SolutionSetProbe:
    solutions: list[SolutionPair] = field(default_factory=list)
    loads: list[FloatArray] = field(default_factory=list)
    diameter_u: float = 0.0
    diameter_lambda: float = 0.0
    sup_u: float = 0.0
    sup_lambda: float = 0.0
    convexity_worst: float = 0.0
    chain_worst: float = float("-inf")
    multiplier_worst: float = float("-inf")
    uncertified: int = 0
    failures: int = 0

    @property
    def bounds_hold(self) -> bool:
        return self.chain_worst <= 1e-8 and self.multiplier_worst <= 1e-8


def _diameter(points: list[FloatArray]) -> float:
    if len(points) < 2:
        return 0.0
    return max(float(np.linalg.norm(a - b)) for a, b in itertools.combinations(points, 2))


def boundedness_probe(
    inst: ProblemInstance,
    f_ball_radius: float,
    samples: int,
    seed: int = 0,
    cfg: Optional[SolverConfig] = None,
    probes: Optional[ProbeSettings] = None,
    tol: float = CERTIFY_TOL,
) -> SolutionSetProbe:
    """
    Solve for loads f in the ball of radius `f_ball_radius` (the axis points
    +-radius e_i first, then `samples` uniform draws) and report sup-norms
    together with the a-priori estimates every solution must satisfy. A
    second solve of the instance's own load from a different start measures
    the segment between two of its solutions.
    """
    cfg = _gated(inst, cfg)
    probes = probes or ProbeSettings(samples=1000, seed=seed)
    rng = make_rng(seed)
    eye = np.eye(inst.n)
    loads = np.vstack(
        [
            f_ball_radius * eye,
            -f_ball_radius * eye,
            uniform_ball(rng, samples, inst.n, f_ball_radius),
        ]
    )

    report = SolutionSetProbe()
    for f in loads:
        variant = inst.with_f(f)
        try:
            pair, _ = solve(variant, cfg, probes=probes)
        except SolverError as e:
            logger.warning(f"boundedness probe: solve failed for f={f.tolist()}: {e}")
            report.failures += 1
            continue
        if pair.residuals is not None and not pair.residuals.certified(tol):
            report.uncertified += 1
        report.solutions.append(pair)
        report.loads.append(f)
        slack = tol * max(1.0, float(np.linalg.norm(f)))
        report.chain_worst = max(report.chain_worst, coercivity_chain_gap(variant, pair.u) - slack)
        report.multiplier_worst = max(
            report.multiplier_worst,
            multiplier_bound_gap(variant, pair.u, pair.lam, cfg.kink_capture) - slack,
        )

    us = [p.u for p in report.solutions]
    lams = [p.lam for p in report.solutions]
    report.diameter_u = _diameter(us)
    report.diameter_lambda = _diameter(lams)
    report.sup_u = max((float(np.linalg.norm(u)) for u in us), default=0.0)
    report.sup_lambda = max((float(np.linalg.norm(x)) for x in lams), default=0.0)

    try:
        first, _ = solve(inst, cfg, certify=False)
        lam0 = inst.Lambda.project(rng.standard_normal(inst.m) * 2.0 * inst.scale)
        second, _ = solve(inst, cfg, u0=-first.u, lam0=lam0, certify=False)
        report.convexity_worst = convexity_probe(inst, first, second, probes=probes, tol=tol)
    except (SolverError, VerificationAnomaly) as e:
        logger.warning(f"boundedness probe: convexity segment skipped: {e}")
        report.convexity_worst = float("nan")
    return report


class StabilityResult(NamedTuple):
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-8) + 1e-14


def stability_bound(inst: ProblemInstance, f1: FloatArray, f2: FloatArray) -> float:
    """(|f1 - f2| / c_h)^(1/(tau - 1))."""
    gap = float(np.linalg.norm(np.asarray(f1, dtype=float) - np.asarray(f2, dtype=float)))
    return (gap / inst.h.c_h) ** (1.0 / (inst.h.tau - 1.0))


def stability_check(
    inst: ProblemInstance,
    f1: FloatArray,
    f2: FloatArray,
    cfg: Optional[SolverConfig] = None,
    probes: Optional[ProbeSettings] = None,
    tol: float = CERTIFY_TOL,
) -> StabilityResult:
    """
    |u(f1) - u(f2)| against (|f1 - f2| / c_h)^(1/(tau - 1)).

    The bound places c_h in the denominator: c_h |u1 - u2|^tau is at most
    |f1 - f2| |u1 - u2|, and dividing through gives this form.

    Raises:
        HypothesisGate: h is not of power form
    """
    if not inst.h.is_power:
        raise HypothesisGate("stability needs h(v) = c_h |v|^tau with c_h > 0")
    cfg = _gated(inst, cfg)
    probes = probes or ProbeSettings(samples=1000)
    sol1, _ = solve(inst.with_f(f1), cfg, probes=probes)
    sol2, _ = solve(inst.with_f(f2), cfg, probes=probes)
    for sol in (sol1, sol2):
        if sol.residuals is not None and not sol.residuals.certified(tol):
            logger.warning(f"stability solve not certified (worst {sol.residuals.worst:.3e})")
    return StabilityResult(float(np.linalg.norm(sol1.u - sol2.u)), stability_bound(inst, f1, f2))


@dataclass
class UscReport:
    perturbations: list[float] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    multipliers: list[FloatArray] = field(default_factory=list)
    set_distances: Optional[list[float]] = None
    tol: float = CERTIFY_TOL

    @property
    def final(self) -> float:
        return self.residuals[-1] if self.residuals else float("nan")

    @property
    def passed(self) -> bool:
        """The last residual is within tol, or shrank in proportion to the perturbation."""
        if not self.residuals:
            return False
        if self.final <= self.tol:
            return True
        rate = self.residuals[0] / self.perturbations[0]
        return self.final <= USC_DECAY_SLACK * rate * self.perturbations[-1] + self.tol


def usc_probe(
    inst: ProblemInstance,
    f: Optional[FloatArray] = None,
    perturbation_scale: float = 1.0,
    steps: int = 10,
    direction: Optional[FloatArray] = None,
    cfg: Optional[SolverConfig] = None,
    probes: Optional[ProbeSettings] = None,
    tol: float = CERTIFY_TOL,
    oracle: Optional[OracleResult] = None,
) -> UscReport:
    """
    Solve for f_n = f + scale 2^-n e and measure how far (u_n, lambda_n) is
    from solving the limit problem: by its combined residual, and by the
    distance to the oracle's grid solution set when an oracle is given.
    """
    f = inst.f if f is None else np.asarray(f, dtype=float)
    target = inst.with_f(f)
    if direction is None:
        direction = np.eye(inst.n)[0]
    direction = np.asarray(direction, dtype=float)
    cfg = _gated(target, cfg)
    probes = probes or ProbeSettings(samples=1000)

    report = UscReport(tol=tol, set_distances=[] if oracle is not None else None)
    for step in range(1, steps + 1):
        eps = perturbation_scale * 2.0**-step
        pair, _ = solve(target.with_f(f + eps * direction), cfg, certify=False)
        report.perturbations.append(eps)
        report.residuals.append(_combined(target, pair.u, pair.lam, probes))
        report.multipliers.append(pair.lam)
        if report.set_distances is not None and oracle is not None:
            report.set_distances.append(oracle.distance_to(pair.u, pair.lam))
    return report
