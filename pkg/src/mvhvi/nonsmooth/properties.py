"""Sampled checks of the calculus rules every Clarke derivative must obey."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from mvhvi.core.errors import PropertyViolation
from mvhvi.core.types import FloatArray
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec, local_lipschitz
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng

logger = get_logger(__name__)

BatchOracle = Callable[[FloatArray, FloatArray], FloatArray]

SUBGRADIENT_DRAWS = 100
LIPSCHITZ_RADIUS = 1e-6


@dataclass(frozen=True)
class PropertyReport:
    """Worst margin per checked property (>= 0 means the rule held)."""

    samples: int
    seed: int
    margins: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(m >= 0.0 for m in self.margins.values())


def _sample_points(J: PiecewiseC1Spec, rng: np.random.Generator, count: int) -> FloatArray:
    """Random points with a quarter of the coordinates sitting exactly on breakpoints."""
    scale = 1.0
    for bps in J.breakpoint_set():
        if bps.size:
            scale = max(scale, float(np.max(np.abs(bps))) + 1.0)
    X = rng.normal(scale=scale, size=(count, J.dim))
    for i, bps in enumerate(J.breakpoint_set()):
        if bps.size == 0:
            continue
        on_kink = rng.random(count) < 0.25
        X[on_kink, i] = rng.choice(bps, size=int(on_kink.sum()))
    return X


def _tol(*values: FloatArray) -> FloatArray:
    return 1e-9 * (1.0 + sum(np.abs(v) for v in values))


def check_clarke_calculus(
    J: PiecewiseC1Spec,
    samples: int,
    seed: int,
    oracle: Optional[BatchOracle] = None,
    capture: float = 0.0,
) -> PropertyReport:
    """
    Check positive homogeneity, subadditivity, the max formula (with vertex
    attainment), the local Lipschitz bound and smooth-point consistency of the
    directional-derivative oracle on random samples.

    `oracle` replaces J.clarke_dir_batch, which is how faulty oracles are tested.
    Raises PropertyViolation with the first offending sample.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = make_rng(seed)
    J0: BatchOracle = oracle or (lambda X, D: J.clarke_dir_batch(X, D, capture))

    X = _sample_points(J, rng, samples)
    D = rng.normal(size=X.shape)
    D2 = rng.normal(size=X.shape)
    t = rng.exponential(scale=2.0, size=samples)
    lo, hi = J.box_batch(X, capture)

    base = J0(X, D)
    margins: dict[str, float] = {}

    def record(name: str, margin: FloatArray, extra: dict[str, FloatArray]) -> None:
        worst = int(np.argmin(margin))
        margins[name] = float(margin[worst])
        if margin[worst] < 0.0:
            witness = {"sample": worst, "x": X[worst].tolist(), "d": D[worst].tolist()}
            witness.update({k: np.asarray(v)[worst].tolist() for k, v in extra.items()})
            logger.warning(f"{name} failed at sample {worst} (seed {seed})")
            raise PropertyViolation(name, witness, seed)

    # Max formula: J0(x; d) dominates <xi, d> on the box and equals it at the
    # vertex picked by the sign of d.
    xi = lo[:, None, :] + rng.random((samples, SUBGRADIENT_DRAWS, J.dim)) * (hi - lo)[:, None, :]
    pairings = np.einsum("nsk,nk->ns", xi, D)
    dominance = base - pairings.max(axis=1) + _tol(base)
    vertex = np.where(D > 0.0, hi, lo)
    attained = np.einsum("nk,nk->n", vertex, D)
    gap = _tol(base) - np.abs(base - attained)
    record("max-formula", np.minimum(dominance, gap), {"J0": base, "vertex_value": attained})

    scaled = J0(X, t[:, None] * D)
    record(
        "positive-homogeneity",
        _tol(scaled, t * base) - np.abs(scaled - t * base),
        {"t": t, "J0": base, "J0_scaled": scaled},
    )

    other = J0(X, D2)
    joint = J0(X, D + D2)
    record(
        "subadditivity",
        base + other - joint + _tol(base, other),
        {"d2": D2, "J0_sum": joint},
    )

    lips = np.array(
        [
            local_lipschitz(
                J, x, max(LIPSCHITZ_RADIUS, capture * max(1.0, float(np.max(np.abs(x)))))
            )
            for x in X
        ]
    )
    bound = lips * np.linalg.norm(D, axis=1)
    record("lipschitz-bound", bound - np.abs(base) + _tol(bound), {"L": lips})

    smooth = np.all(lo == hi, axis=1)
    if np.any(smooth):
        grad_pair = np.einsum("nk,nk->n", lo, D)
        margin = np.where(smooth, _tol(base) - np.abs(base - grad_pair), np.inf)
        record("smooth-consistency", margin, {"gradient_pairing": grad_pair})

    logger.debug(f"Clarke calculus checks passed on {samples} samples (seed {seed})")
    return PropertyReport(samples=samples, seed=seed, margins=margins)
