"""
Violation of the four equivalent formulations at a candidate pair (u, lambda).

With d = v - u and g = f - A(u) - B^T lambda the formulations split into a
v-part and a rho-part:

    original        max(  <g, d> - J0(Gu; Gd),                 (rho - lambda)^T B u )
    minty           max(  <f - A(v) - B^T lambda, d> + h(d)
                          - J0(Gv; Gd),                        (rho - lambda)^T B u )
    combined        sum of the original parts
    minty-combined  sum of the minty parts

Test points v range over the ball of radius 2(|u| + 1) around u, multipliers
over Lambda cut by the ball of radius 2(|lambda| + 1). The original v-part
is positively homogeneous in d, so its supremum over the ball is exactly
radius * dist(g, G^T box(Gu)); refinement uses that value, and a local
derivative-free search for the Minty v-part.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from mvhvi.core.problem import ProblemInstance, ResidualReport, SamplingInfo
from mvhvi.core.types import FloatArray
from mvhvi.solver.inner import distance_to_image, inclusion_target
from mvhvi.utils.sampling import make_rng, uniform_ball

RHO_DRAWS = 64


class Formulation(str, Enum):
    ORIGINAL = "original"
    MINTY = "minty"
    COMBINED = "combined"
    MINTY_COMBINED = "minty-combined"

    @property
    def at_test_point(self) -> bool:
        return self in (Formulation.MINTY, Formulation.MINTY_COMBINED)

    @property
    def summed(self) -> bool:
        return self in (Formulation.COMBINED, Formulation.MINTY_COMBINED)


@dataclass(frozen=True)
class ProbeSettings:
    samples: int = 10000
    seed: int = 0
    refine: bool = True
    capture: float = 1e-10

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.capture < 0.0:
            raise ValueError("capture must be >= 0")

    @property
    def info(self) -> SamplingInfo:
        return SamplingInfo(self.samples, self.seed, self.refine)


@dataclass(frozen=True, eq=False)
class FormulationResidual:
    formulation: Formulation
    violation: float
    worst_v: FloatArray
    worst_rho: FloatArray

    @property
    def worst_witness(self) -> tuple[FloatArray, FloatArray]:
        return self.worst_v, self.worst_rho


@dataclass(frozen=True, eq=False)
class _Part:
    """Largest value of one part and the point attaining it."""

    value: float
    point: FloatArray


def probe_radius(u: FloatArray) -> float:
    return 2.0 * (float(np.linalg.norm(u)) + 1.0)


def probe_directions(n: int, radius: float, settings: ProbeSettings) -> FloatArray:
    """
    Directions d = v - u: uniform in the ball, coordinate directions at the
    full radius and at 1e-3 of it, and the reflection -d of every ball draw.
    """
    rng = make_rng(settings.seed)
    ball = uniform_ball(rng, settings.samples, n, radius)
    eye = np.eye(n)
    coord = np.vstack([eye, -eye])
    return np.vstack([ball, -ball, radius * coord, 1e-3 * radius * coord])


def original_v_part(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, D: FloatArray, capture: float
) -> FloatArray:
    g = inclusion_target(inst, u, lam)
    GU = np.broadcast_to(inst.G @ u, (D.shape[0], inst.k))
    return D @ g - inst.J.clarke_dir_batch(GU, D @ inst.G.T, capture)


def minty_v_part(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, D: FloatArray, capture: float
) -> FloatArray:
    V = u + D
    rhs = D @ inst.f + inst.h.batch(D)
    lhs = (
        np.sum(inst.A.apply_batch(V) * D, axis=1)
        + D @ (inst.B.T @ lam)
        + inst.J.clarke_dir_batch(V @ inst.G.T, D @ inst.G.T, capture)
    )
    return rhs - lhs


def _best(values: FloatArray, points: FloatArray, fallback: FloatArray) -> _Part:
    """Max over samples; the unperturbed point (value 0) competes too."""
    if values.size == 0:
        return _Part(0.0, fallback)
    i = int(np.argmax(values))
    if values[i] <= 0.0:
        return _Part(0.0, fallback)
    return _Part(float(values[i]), points[i])


def _exact_original(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, radius: float, capture: float
) -> _Part:
    box = inst.J.box(inst.G @ u, capture)
    dist, xi = distance_to_image(inst.G, inclusion_target(inst, u, lam), box.lo, box.hi)
    if dist <= 0.0:
        return _Part(0.0, u.copy())
    r = inclusion_target(inst, u, lam) - inst.G.T @ xi
    return _Part(radius * dist, u + radius * r / np.linalg.norm(r))


def _refine_minty(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    radius: float,
    start: FloatArray,
    capture: float,
) -> _Part:
    def point(z: FloatArray) -> FloatArray:
        return radius * z / max(1.0, float(np.linalg.norm(z)))

    def objective(z: FloatArray) -> float:
        return -float(minty_v_part(inst, u, lam, point(z)[None, :], capture)[0])

    result = minimize(
        objective,
        (start - u) / radius,
        method="Powell",
        options={"maxfev": 400 * inst.n, "xtol": 1e-10, "ftol": 1e-14},
    )
    d = point(result.x)
    return _Part(max(0.0, -float(result.fun)), u + d)


def v_part(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    at_test_point: bool,
    settings: ProbeSettings,
) -> _Part:
    radius = probe_radius(u)
    D = probe_directions(inst.n, radius, settings)
    evaluate = minty_v_part if at_test_point else original_v_part
    best = _best(evaluate(inst, u, lam, D, settings.capture), u + D, u.copy())
    if not settings.refine:
        return best
    if at_test_point:
        refined = _refine_minty(inst, u, lam, radius, best.point, settings.capture)
    else:
        refined = _exact_original(inst, u, lam, radius, settings.capture)
    return refined if refined.value > best.value else best


def rho_part(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, settings: ProbeSettings
) -> _Part:
    """max over rho of (rho - lambda)^T B u on Lambda within radius 2(|lambda| + 1)."""
    w = inst.B @ u
    L = inst.Lambda
    radius = probe_radius(lam)
    rng = make_rng(settings.seed + 1)
    scale = max(1.0, float(np.linalg.norm(lam)))
    draws = lam + scale * rng.standard_normal((RHO_DRAWS, inst.m))
    rhos = [np.zeros(inst.m)]
    for x in draws:
        rho, _ = L.retract(L.project(x), radius)
        rhos.append(rho)
    R = np.array(rhos)
    best = _best((R - lam) @ w, R, lam.copy())
    if settings.refine:
        value, rho = L.support(w, radius)
        exact = value - float(lam @ w)
        if exact > best.value:
            best = _Part(exact, rho)
    return best


def _combine(
    formulation: Formulation, v: _Part, rho: _Part, u: FloatArray, lam: FloatArray
) -> FormulationResidual:
    if formulation.summed:
        return FormulationResidual(formulation, v.value + rho.value, v.point, rho.point)
    if v.value >= rho.value:
        return FormulationResidual(formulation, v.value, v.point, lam.copy())
    return FormulationResidual(formulation, rho.value, u.copy(), rho.point)


def residual(
    inst: ProblemInstance,
    u: FloatArray,
    lam: FloatArray,
    formulation: Formulation,
    probes: Optional[ProbeSettings] = None,
) -> FormulationResidual:
    """Worst clamped violation of one formulation, with the (v, rho) attaining it."""
    probes = probes or ProbeSettings()
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    v = v_part(inst, u, lam, formulation.at_test_point, probes)
    return _combine(formulation, v, rho_part(inst, u, lam, probes), u, lam)


def all_residuals(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, probes: Optional[ProbeSettings] = None
) -> dict[Formulation, FormulationResidual]:
    """All four formulations, sharing probe sets."""
    probes = probes or ProbeSettings()
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    rho = rho_part(inst, u, lam, probes)
    at_u = v_part(inst, u, lam, False, probes)
    at_v = v_part(inst, u, lam, True, probes)
    return {
        f: _combine(f, at_v if f.at_test_point else at_u, rho, u, lam) for f in Formulation
    }


def residual_report(
    inst: ProblemInstance, u: FloatArray, lam: FloatArray, probes: Optional[ProbeSettings] = None
) -> ResidualReport:
    probes = probes or ProbeSettings()
    res = all_residuals(inst, u, lam, probes)
    return ResidualReport(
        r_original=res[Formulation.ORIGINAL].violation,
        r_minty=res[Formulation.MINTY].violation,
        r_combined=res[Formulation.COMBINED].violation,
        r_minty_combined=res[Formulation.MINTY_COMBINED].violation,
        sampling=probes.info,
    )
