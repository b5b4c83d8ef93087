"""Seeded random sampling helpers shared by audits, probes and multi-start."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]


def make_rng(seed: int) -> np.random.Generator:
    """Create the generator every stochastic routine draws from."""
    return np.random.default_rng(seed)


def unit_sphere(rng: np.random.Generator, count: int, dim: int) -> FloatArray:
    """Uniform directions on the unit sphere in R^dim, shape (count, dim)."""
    x = rng.standard_normal((count, dim))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return x / norms


def uniform_ball(
    rng: np.random.Generator, count: int, dim: int, radius: float
) -> FloatArray:
    """Uniform points in the closed Euclidean ball of the given radius."""
    directions = unit_sphere(rng, count, dim)
    radii = radius * rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def sphere(
    rng: np.random.Generator, count: int, dim: int, radius: float
) -> FloatArray:
    """Uniform points on the sphere of the given radius."""
    return radius * unit_sphere(rng, count, dim)
