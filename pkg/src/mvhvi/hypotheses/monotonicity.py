"""Audits of h-relaxed monotonicity and of the declared m_A, m_J constants."""

from __future__ import annotations

from typing import Optional

import numpy as np

from mvhvi.core.errors import ConstantGapError
from mvhvi.core.operators import HFunctionSpec, OperatorSpec
from mvhvi.core.problem import ProblemInstance
from mvhvi.core.types import FloatArray
from mvhvi.hypotheses.report import AuditEntry, AuditReport, AuditStatus
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng, uniform_ball, unit_sphere

logger = get_logger(__name__)

MARGIN_TOL = 1e-10
CONSTANT_TOL = 1e-10


def _snap_to_kinks(
    inst: ProblemInstance, rng: np.random.Generator, U: FloatArray
) -> FloatArray:
    """Move each row so that one coordinate of gamma u lands on a breakpoint."""
    bps = inst.J.breakpoint_set()
    coords = [i for i, t in enumerate(bps) if t.size]
    if not coords:
        return U
    G = inst.G
    pinv = np.linalg.pinv(G)
    out = U.copy()
    for row in range(U.shape[0]):
        i = coords[rng.integers(len(coords))]
        target = rng.choice(bps[i])
        shift = np.zeros(inst.k)
        shift[i] = target - (G @ U[row])[i]
        out[row] = U[row] + pinv @ shift
    return out


def monotonicity_pairs(
    inst: ProblemInstance, samples: int, seed: int, radius: Optional[float] = None
) -> tuple[FloatArray, FloatArray]:
    """
    Sample pairs (u, v): far pairs in a ball, pairs against v = 0, near
    pairs, and pairs with gamma u pinned on a breakpoint.
    """
    rng = make_rng(seed)
    n = inst.n
    R = radius if radius is not None else 2.0 * inst.scale
    quarter = max(1, samples // 4)

    U1 = uniform_ball(rng, quarter, n, R)
    V1 = uniform_ball(rng, quarter, n, R)

    U2 = uniform_ball(rng, quarter, n, R)
    V2 = np.zeros_like(U2)

    U3 = uniform_ball(rng, quarter, n, R)
    steps = 10.0 ** rng.uniform(-6.0, 0.0, size=quarter)
    V3 = U3 + steps[:, None] * unit_sphere(rng, quarter, n)

    rest = max(1, samples - 3 * quarter)
    U4 = _snap_to_kinks(inst, rng, uniform_ball(rng, rest, n, R))
    V4 = np.where(rng.random((rest, 1)) < 0.5, -U4, uniform_ball(rng, rest, n, R))
    V4 = _snap_to_kinks(inst, rng, V4)

    return np.vstack([U1, U2, U3, U4]), np.vstack([V1, V2, V3, V4])


def relaxed_monotonicity_margins(
    inst: ProblemInstance, U: FloatArray, V: FloatArray, capture: float = 0.0
) -> FloatArray:
    """
    Per pair, the minimum over box selections xi_u, xi_v of
    <A(u) + G^T xi_u - A(v) - G^T xi_v, u - v> - h(u - v).
    """
    D = U - V
    GD = D @ inst.G.T
    operator_part = np.einsum("ij,ij->i", inst.A.apply_batch(U) - inst.A.apply_batch(V), D)
    worst_u = inst.J.clarke_dir_batch(U @ inst.G.T, -GD, capture)
    worst_v = inst.J.clarke_dir_batch(V @ inst.G.T, GD, capture)
    return operator_part - worst_u - worst_v - inst.h.batch(D)


def audit_relaxed_monotonicity(
    inst: ProblemInstance,
    samples: int,
    seed: int,
    capture: float = 0.0,
    radius: Optional[float] = None,
) -> AuditReport:
    """
    Check <A(u) + G^T xi_u - A(v) - G^T xi_v, u - v> >= h(u - v) with the
    subgradients chosen adversarially at box vertices.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    U, V = monotonicity_pairs(inst, samples, seed, radius)
    margins = relaxed_monotonicity_margins(inst, U, V, capture)
    scale = np.maximum(1.0, np.sum((U - V) ** 2, axis=1))
    worst = int(np.argmin(margins / scale))
    ok = bool(np.all(margins >= -MARGIN_TOL * scale))

    witness = None
    if not ok:
        witness = {"sample": worst, "u": U[worst].tolist(), "v": V[worst].tolist()}
        logger.warning(
            f"relaxed monotonicity fails at sample {worst} (seed {seed}): "
            f"margin {margins[worst]:.6g}"
        )
    entry = AuditEntry(
        name="H(A)(ii)",
        status=AuditStatus.VERIFIED if ok else AuditStatus.VIOLATED,
        margin=float(np.min(margins)),
        witness=witness,
        seed=seed,
        samples=int(U.shape[0]),
        note=f"h-relaxed monotonicity of A + G^T dJ(G .), h={inst.h.form.value}",
    )
    return AuditReport([entry])


def derive_h_from_constants(m_A: float, m_J: float, gamma_norm: float) -> HFunctionSpec:
    """h(u) = (m_A - m_J |gamma|^2) |u|^2 when that constant is positive."""
    gap = m_A - m_J * gamma_norm**2
    if not gap > 0.0:
        raise ConstantGapError(
            f"m_J*|gamma|^2 = {m_J * gamma_norm**2:.6g} >= m_A = {m_A:.6g}; "
            "no strongly monotone h can be derived"
        )
    return HFunctionSpec.power(gap, 2.0)


def exact_m_A(A: OperatorSpec) -> float:
    """Strong monotonicity modulus of P u (a power term with p >= 2 only adds to it)."""
    return max(0.0, A.sym_min_eigenvalue)


def audit_m_A(A: OperatorSpec, declared: float, samples: int = 0, seed: int = 0) -> AuditEntry:
    """
    Compare the declared m_A with the symmetric-part eigenvalue, and probe
    <A(u) - A(v), u - v> >= m_A |u - v|^2 on random pairs when samples > 0.
    """
    actual = exact_m_A(A)
    margin = actual - declared
    witness = None
    if samples > 0 and declared > 0.0:
        rng = make_rng(seed)
        U = rng.normal(size=(samples, A.n))
        V = rng.normal(size=(samples, A.n))
        D = U - V
        gaps = np.einsum("ij,ij->i", A.apply_batch(U) - A.apply_batch(V), D)
        sampled = gaps - declared * np.sum(D**2, axis=1)
        worst = int(np.argmin(sampled))
        if sampled[worst] < -CONSTANT_TOL * max(1.0, float(np.sum(D[worst] ** 2))):
            witness = {"sample": worst, "u": U[worst].tolist(), "v": V[worst].tolist()}
    ok = margin >= -CONSTANT_TOL * max(1.0, declared) and witness is None
    if not ok and witness is None:
        witness = {"declared": declared, "eigenvalue": actual}
    return AuditEntry(
        name="m_A",
        status=AuditStatus.VERIFIED if ok else AuditStatus.VIOLATED,
        margin=margin,
        witness=witness,
        seed=seed,
        samples=samples,
        required=False,
        note=f"smallest symmetric eigenvalue {actual:.6g}",
    )


def audit_m_J(J: PiecewiseC1Spec, declared: float, samples: int = 0, seed: int = 0) -> AuditEntry:
    """
    Compare the declared m_J with the exact relaxed-monotonicity constant of
    the piecewise J, and probe <xi_w - xi_x, w - x> >= -m_J |w - x|^2 at box
    vertices when samples > 0.
    """
    actual = J.relaxed_monotonicity_constant
    margin = declared - actual
    witness = None
    if samples > 0:
        rng = make_rng(seed)
        W = rng.normal(scale=2.0, size=(samples, J.dim))
        X = rng.normal(scale=2.0, size=(samples, J.dim))
        for i, bps in enumerate(J.breakpoint_set()):
            if bps.size:
                pinned = rng.random(samples) < 0.5
                X[pinned, i] = rng.choice(bps, size=int(pinned.sum()))
        D = W - X
        pairing = -J.clarke_dir_batch(W, -D) - J.clarke_dir_batch(X, D)
        sampled = pairing + declared * np.sum(D**2, axis=1)
        worst = int(np.argmin(sampled))
        if sampled[worst] < -CONSTANT_TOL * max(1.0, float(np.sum(D[worst] ** 2))):
            witness = {"sample": worst, "w": W[worst].tolist(), "x": X[worst].tolist()}
    ok = margin >= -CONSTANT_TOL * max(1.0, declared) and witness is None
    if not ok and witness is None:
        witness = {"declared": declared, "exact": actual}
    return AuditEntry(
        name="m_J",
        status=AuditStatus.VERIFIED if ok else AuditStatus.VIOLATED,
        margin=margin,
        witness=witness,
        seed=seed,
        samples=samples,
        required=False,
        note=f"exact relaxed-monotonicity constant {actual:.6g}",
    )
