"""Full hypothesis audit of an instance, with re-profiling of declared constants."""

from __future__ import annotations

import numpy as np

from mvhvi.core.errors import GrowthFitError
from mvhvi.core.operators import HForm
from mvhvi.core.problem import ProblemInstance, Provenance
from mvhvi.hypotheses.coercivity import audit_coercivity
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.hypotheses.monotonicity import (
    audit_m_A,
    audit_m_J,
    audit_relaxed_monotonicity,
    exact_m_A,
)
from mvhvi.hypotheses.report import AuditEntry, AuditReport, AuditStatus
from mvhvi.nonsmooth.growth import estimate_growth, growth_samples, tail_growth
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng, uniform_ball

logger = get_logger(__name__)


def _verified(name: str, note: str, margin: float = 0.0, required: bool = True) -> AuditEntry:
    return AuditEntry(name, AuditStatus.VERIFIED, margin, required=required, note=note)


def _h_entries(inst: ProblemInstance) -> list[AuditEntry]:
    h = inst.h
    positive = h.form is HForm.POWER
    return [
        _verified("H(h)(i)", "h(0)=0 and h(tv)/t -> 0 for tau > 1"),
        _verified("H(h)(ii)", "h is continuous; automatic in finite dimension"),
        AuditEntry(
            "H(h)(iii)",
            AuditStatus.VERIFIED if positive else AuditStatus.VIOLATED,
            h.c_h if positive else 0.0,
            witness=None if positive else {"v": "any nonzero v", "h(v)": 0.0},
            required=False,
            note="h(v) > 0 off 0; needed only for uniqueness and stability",
        ),
    ]


def audit_growth(inst: ProblemInstance, samples: int, seed: int) -> AuditEntry:
    """Check the declared growth constants on samples and against the tail growth."""
    prof = inst.profile
    J = inst.J
    radius = 2.0 * inst.scale
    rng = make_rng(seed)
    points = np.vstack([uniform_ball(rng, samples, J.dim, radius), np.zeros((1, J.dim))])
    norms = np.linalg.norm(points, axis=1)
    excess = growth_samples(J, points) - (prof.alpha_J + prof.beta_J * norms**prof.theta)
    worst = int(np.argmax(excess))

    exponent, coefficient = tail_growth(J)
    tail_ok = exponent < prof.theta or (
        exponent == prof.theta and prof.beta_J >= coefficient - 1e-12
    )
    ok = excess[worst] <= 1e-10 * max(1.0, norms[worst] ** prof.theta) and tail_ok
    witness = None
    if not ok:
        witness = (
            {"sample": worst, "v": points[worst].tolist()}
            if excess[worst] > 0.0
            else {"tail_exponent": exponent, "tail_coefficient": coefficient}
        )
    return AuditEntry(
        "H(J)(ii)",
        AuditStatus.VERIFIED if ok else AuditStatus.VIOLATED,
        float(-excess[worst]),
        witness=witness,
        seed=seed,
        samples=samples,
        note=f"theta={prof.theta:g}, alpha_J={prof.alpha_J:g}, beta_J={prof.beta_J:g}",
    )


def audit_instance(
    inst: ProblemInstance,
    samples: int = 2000,
    seed: int = 0,
    capture: float = 0.0,
) -> tuple[AuditReport, ProblemInstance]:
    """
    Audit every hypothesis item and return the report together with a copy
    of the instance whose profile has contradicted or missing constants
    replaced by computed values (provenance Estimated).
    """
    report = AuditReport(_h_entries(inst))
    profile = inst.profile

    growth = audit_growth(inst, samples, seed)
    report.add(_verified("H(J)(i)", "piecewise quadratic and continuous, hence locally Lipschitz"))
    report.add(growth)
    report.add(_verified("H(J)(iii)", "box endpoints are bounded on bounded sets"))
    if growth.violated:
        try:
            alpha, beta = estimate_growth(inst.J, profile.theta, 2.0 * inst.scale, samples, seed)
        except GrowthFitError as e:
            logger.warning(f"growth constants cannot be re-estimated: {e}")
        else:
            logger.warning(
                f"declared growth constants contradicted; using alpha_J={alpha:.6g}, "
                f"beta_J={beta:.6g}"
            )
            profile = profile.estimated("alpha_J", alpha, samples).estimated(
                "beta_J", beta, samples
            )

    report.add(_verified("H(A)(i)", "A is continuous, which implies the limsup condition"))
    report.extend(audit_relaxed_monotonicity(inst, samples, seed, capture))
    report.extend(audit_coercivity(inst, seed=seed))
    report.add(_verified("H(A)(iv)", "polynomial operator, bounded on bounded sets"))

    alpha_b = infsup_constant(inst.b)
    report.add(
        AuditEntry(
            "H(b)",
            AuditStatus.VERIFIED if alpha_b > 0.0 else AuditStatus.VIOLATED,
            alpha_b,
            witness=None if alpha_b > 0.0 else {"alpha_b": alpha_b},
            note=f"|B|={inst.b.norm:.6g}, inf-sup constant {alpha_b:.6g}",
        )
    )
    declared_b = profile.alpha_b
    if declared_b is None or profile.provenance_of("alpha_b") is not Provenance.DECLARED:
        profile = profile.estimated("alpha_b", alpha_b, 0)
    elif abs(declared_b - alpha_b) > 1e-10 * max(1.0, alpha_b):
        logger.warning(f"declared alpha_b={declared_b:g} differs from computed {alpha_b:.6g}")
        profile = profile.estimated("alpha_b", alpha_b, 0)

    report.add(_verified("H(gamma)", f"linear map, |gamma|={inst.gamma.operator_norm:.6g}"))

    m_A = audit_m_A(inst.A, profile.m_A, samples, seed)
    report.add(m_A)
    if m_A.violated:
        actual = exact_m_A(inst.A)
        logger.warning(f"declared m_A={profile.m_A:g} exceeds computed {actual:.6g}")
        profile = profile.estimated("m_A", actual, samples)

    m_J = audit_m_J(inst.J, profile.m_J, samples, seed)
    report.add(m_J)
    if m_J.violated:
        actual = inst.J.relaxed_monotonicity_constant
        logger.warning(f"declared m_J={profile.m_J:g} below computed {actual:.6g}")
        if np.isfinite(actual):
            profile = profile.estimated("m_J", actual, samples)

    for entry in report.failures():
        logger.warning(f"hypothesis {entry.name} violated (margin {entry.margin:.6g})")
    return report, inst.with_profile(profile)
