"""Fit of the growth bound J0(v; -v) <= alpha_J + beta_J |v|^theta."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from mvhvi.core.errors import GrowthFitError
from mvhvi.core.types import FloatArray
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec
from mvhvi.utils.logging import get_logger
from mvhvi.utils.sampling import make_rng, sphere, uniform_ball

logger = get_logger(__name__)

BETA_FLOOR = 1e-12
SHELL_SLACK = 0.05
LP_TIE_TOL = 1e-9


def growth_samples(J: PiecewiseC1Spec, points: FloatArray) -> FloatArray:
    """J0(v; -v) for each row v."""
    return J.clarke_dir_batch(points, -points)


def tail_growth(J: PiecewiseC1Spec) -> tuple[int, float]:
    """
    Exponent e and leading coefficient c with J0(v; -v) ~ c |v|^e as |v| grows.

    On the outer pieces J0(x; -x) = -q x^2 - a x per coordinate, so e is 2
    when an outer piece is concave, 1 when an outer slope points inward,
    and 0 otherwise.
    """
    quad: list[float] = []
    lin: list[float] = []
    for c in J.coordinates:
        right_q, right_a = float(c.quad_coef[-1]), float(c.lin_coef[-1])
        left_q, left_a = float(c.quad_coef[0]), float(c.lin_coef[0])
        quad.append(max(-right_q, -left_q, 0.0))
        lin_right = -right_a if right_q == 0.0 else 0.0
        lin_left = left_a if left_q == 0.0 else 0.0
        lin.append(max(lin_right, lin_left, 0.0))
    if max(quad) > 0.0:
        return 2, max(quad)
    if max(lin) > 0.0:
        return 1, float(np.linalg.norm(lin))
    return 0, 0.0


def _probe_points(
    J: PiecewiseC1Spec, rng: np.random.Generator, radius: float, samples: int
) -> FloatArray:
    k = J.dim
    parts = [
        uniform_ball(rng, samples, k, radius),
        sphere(rng, max(1, samples // 4), k, radius),
        np.zeros((1, k)),
    ]
    # Coordinate rays through every breakpoint inside the ball.
    for i, bps in enumerate(J.breakpoint_set()):
        inside = bps[np.abs(bps) <= radius]
        if inside.size:
            ray = np.zeros((inside.size, k))
            ray[:, i] = inside
            parts.append(ray)
    for i in range(k):
        ray = np.zeros((2, k))
        ray[:, i] = (radius, -radius)
        parts.append(ray)
    return np.vstack(parts)


def estimate_growth(
    J: PiecewiseC1Spec,
    theta: float,
    radius: float,
    samples: int,
    seed: int = 0,
) -> tuple[float, float]:
    """
    Smallest two-term cover alpha + beta * |v|^theta of the sampled
    J0(v; -v) over the ball of the given radius.

    The cover minimizes its value alpha + beta * radius^theta at the edge of
    the ball by linear programming, with beta held at or above the leading
    tail coefficient when the tail grows exactly like |v|^theta. Among
    optimal covers the one with the smallest alpha is kept. It is then
    checked on a shell reaching out to twice the radius (5% slack).

    Raises GrowthFitError when J0(v; -v) outgrows |v|^theta or the cover
    does not extend to the shell.
    """
    if radius <= 0.0:
        raise ValueError(f"radius must be > 0, got {radius}")
    if theta < 0.0:
        raise ValueError(f"theta must be >= 0, got {theta}")

    exponent, coefficient = tail_growth(J)
    if exponent > theta:
        raise GrowthFitError(
            f"J0(v;-v) grows like {coefficient:.6g}*|v|^{exponent}, "
            f"faster than |v|^{theta}"
        )
    beta_min = max(BETA_FLOOR, coefficient if exponent == theta else 0.0)

    rng = make_rng(seed)
    points = _probe_points(J, rng, radius, samples)
    values = growth_samples(J, points)
    powers = np.linalg.norm(points, axis=1) ** theta

    # Variables (alpha, beta): -alpha - beta * |v|^theta <= -J0(v; -v).
    A_ub = -np.column_stack([np.ones_like(powers), powers])
    bounds = [(0.0, None), (beta_min, None)]
    edge = [1.0, radius**theta]
    result = linprog(c=edge, A_ub=A_ub, b_ub=-values, bounds=bounds, method="highs")
    if result.status != 0:
        raise GrowthFitError(f"no finite growth cover at theta={theta}: {result.message}")
    # the optimal face can be an edge; take its steepest end
    ceiling = result.fun + LP_TIE_TOL * max(1.0, abs(result.fun))
    steepest = linprog(
        c=[1.0, 0.0],
        A_ub=np.vstack([A_ub, edge]),
        b_ub=np.append(-values, ceiling),
        bounds=bounds,
        method="highs",
    )
    if steepest.status == 0:
        result = steepest
    beta = max(float(result.x[1]), beta_min)
    # tightest alpha for this beta; the LP solution is only feasible to solver tolerance
    alpha = max(0.0, float(np.max(values - beta * powers)))

    shell_radii = radius * (1.0 + rng.random(samples))
    shell = shell_radii[:, None] * sphere(rng, samples, J.dim, 1.0)
    shell_values = growth_samples(J, shell)
    cover = alpha + beta * shell_radii**theta
    excess = shell_values - (cover + SHELL_SLACK * np.abs(cover) + 1e-12)
    worst = int(np.argmax(excess))
    if excess[worst] > 0.0:
        raise GrowthFitError(
            f"growth cover ({alpha:.6g}, {beta:.6g}) at theta={theta} fails at "
            f"|v|={shell_radii[worst]:.6g}: J0(v;-v)={shell_values[worst]:.6g} "
            f"> {cover[worst]:.6g}"
        )

    logger.debug(f"growth fit theta={theta}: alpha_J={alpha:.6g}, beta_J={beta:.6g}")
    return alpha, beta
