"""Closed convex multiplier sets with exact Euclidean projections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import nnls

from mvhvi.core.errors import (
    DimensionLimit,
    HypothesisError,
    InfeasiblePolyhedron,
    ShapeError,
)
from mvhvi.core.types import FloatArray, frozen_array

FEAS_TOL = 1e-12
MAX_ENUM_DIM = 8


class LambdaVariant(str, Enum):
    ORTHANT = "orthant"
    BOX = "box"
    POLYHEDRON = "polyhedron"


@dataclass(frozen=True, eq=False)
class LambdaSet:
    """
    Multiplier set Lambda in R^m. Every variant contains 0 and is closed
    and convex:

        ORTHANT     {rho >= 0}
        BOX         {0 <= rho <= upper}, upper >= 0
        POLYHEDRON  {C rho <= d}, d >= 0
    """

    variant: LambdaVariant
    dim: int
    upper: Optional[FloatArray] = None
    C: Optional[FloatArray] = None
    d: Optional[FloatArray] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", LambdaVariant(self.variant))
        if self.dim < 1:
            raise ShapeError(f"multiplier dimension must be >= 1, got {self.dim}")

        if self.variant is LambdaVariant.BOX:
            if self.upper is None:
                raise ShapeError("box multiplier set needs an upper bound vector")
            upper = frozen_array(self.upper, 1, "lambda_set.upper")
            if upper.shape != (self.dim,):
                raise ShapeError(f"box upper bound must have length {self.dim}")
            if np.any(upper < 0.0):
                raise HypothesisError(
                    f"box upper bound must be >= 0 so that 0 is in Lambda, got {upper}"
                )
            object.__setattr__(self, "upper", upper)

        elif self.variant is LambdaVariant.POLYHEDRON:
            if self.C is None or self.d is None:
                raise ShapeError("polyhedral multiplier set needs C and d")
            C = frozen_array(self.C, 2, "lambda_set.C")
            d = frozen_array(self.d, 1, "lambda_set.d")
            if C.shape[1] != self.dim or C.shape[0] != d.shape[0]:
                raise ShapeError(
                    f"polyhedron C must be (p, {self.dim}) with d of length p, "
                    f"got C{C.shape}, d{d.shape}"
                )
            if np.any(d < 0.0):
                raise HypothesisError("polyhedron must contain 0 (all d_i >= 0)")
            object.__setattr__(self, "C", C)
            object.__setattr__(self, "d", d)

    @classmethod
    def orthant(cls, m: int) -> LambdaSet:
        return cls(LambdaVariant.ORTHANT, m)

    @classmethod
    def box(cls, upper: FloatArray) -> LambdaSet:
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        return cls(LambdaVariant.BOX, int(upper.shape[0]), upper=upper)

    @classmethod
    def polyhedron(cls, C: FloatArray, d: FloatArray) -> LambdaSet:
        C = np.atleast_2d(np.asarray(C, dtype=float))
        return cls(LambdaVariant.POLYHEDRON, int(C.shape[1]), C=C, d=d)

    @property
    def is_cone(self) -> bool:
        """True when Lambda is a closed convex cone."""
        if self.variant is LambdaVariant.ORTHANT:
            return True
        if self.variant is LambdaVariant.BOX:
            return not np.any(self.upper)
        return not np.any(self.d)

    def contains(self, rho: FloatArray, tol: float = 0.0) -> bool:
        rho = np.asarray(rho, dtype=float)
        if self.variant is LambdaVariant.ORTHANT:
            return bool(np.all(rho >= -tol))
        if self.variant is LambdaVariant.BOX:
            return bool(np.all(rho >= -tol) and np.all(rho <= self.upper + tol))
        return bool(np.all(self.C @ rho <= self.d + max(tol, FEAS_TOL)))

    def project(self, rho: FloatArray) -> FloatArray:
        """Euclidean projection onto Lambda; idempotent and nonexpansive."""
        rho = np.asarray(rho, dtype=float)
        if self.variant is LambdaVariant.ORTHANT:
            return np.maximum(rho, 0.0)
        if self.variant is LambdaVariant.BOX:
            return np.clip(rho, 0.0, self.upper)
        return self._project_polyhedron(rho)

    def _project_polyhedron(self, x: FloatArray) -> FloatArray:
        if self.contains(x):
            return x.copy()

        C, d = self.C, self.d
        # Least-distance program min ||z|| s.t. -C z >= C x - d, solved as an
        # NNLS problem (Lawson-Hanson).
        G = -C
        h = C @ x - d
        E = np.vstack([G.T, h[None, :]])
        target = np.zeros(self.dim + 1)
        target[-1] = 1.0
        coef, _ = nnls(E, target)
        r = E @ coef - target
        if np.linalg.norm(r) <= 1e-14:
            raise InfeasiblePolyhedron("polyhedral multiplier set is empty")
        rho = x - r[: self.dim] / r[-1]

        # Equality correction on the active rows removes NNLS round-off.
        scale = 1.0 + float(np.max(np.abs(d)))
        active = C @ rho >= d - 1e-9 * scale
        if np.any(active):
            CA, dA = C[active], d[active]
            y, *_ = np.linalg.lstsq(CA @ CA.T, CA @ x - dA, rcond=None)
            corrected = x - CA.T @ y
            close = np.linalg.norm(corrected - rho) <= 1e-8 * (1.0 + np.linalg.norm(rho))
            if close and self.contains(corrected):
                rho = corrected
        return rho

    def retract(self, rho: FloatArray, radius: float) -> tuple[FloatArray, bool]:
        """
        Pull rho (already in Lambda) into Lambda intersected with the ball of
        the given radius by radial scaling, which stays in Lambda since 0 is.
        Returns the point and whether it touched the sphere.
        """
        norm = float(np.linalg.norm(rho))
        if norm >= radius * (1.0 - 1e-12):
            if norm > radius:
                rho = rho * (radius / norm)
            return rho, True
        return rho, False

    def support(self, w: FloatArray, radius: float) -> tuple[float, FloatArray]:
        """
        max rho^T w over the bounded part of Lambda used by residuals:
        Lambda within the ball of `radius` (orthant), the box itself, or the
        polyhedron within the cube [-radius, radius]^m (vertex enumeration).
        """
        w = np.asarray(w, dtype=float)
        if self.variant is LambdaVariant.ORTHANT:
            wp = np.maximum(w, 0.0)
            norm = float(np.linalg.norm(wp))
            if norm == 0.0:
                return 0.0, np.zeros(self.dim)
            rho = radius * wp / norm
            return float(radius * norm), rho
        if self.variant is LambdaVariant.BOX:
            rho = np.where(w > 0.0, self.upper, 0.0)
            return float(rho @ w), rho
        vertices = self.vertices(radius)
        values = vertices @ w
        best = int(np.argmax(values))
        return float(values[best]), vertices[best]

    def vertices(self, radius: float) -> FloatArray:
        """Vertices of the polyhedron cut by the cube [-radius, radius]^m."""
        if self.variant is not LambdaVariant.POLYHEDRON:
            raise ShapeError("vertex enumeration is only defined for polyhedra")
        m = self.dim
        if m > MAX_ENUM_DIM:
            raise DimensionLimit(
                f"vertex enumeration is limited to m_E <= {MAX_ENUM_DIM}, got {m}"
            )
        eye = np.eye(m)
        rows = np.vstack([self.C, eye, -eye])
        rhs = np.concatenate([self.d, np.full(2 * m, radius)])
        tol = 1e-9 * (1.0 + radius)

        found: list[FloatArray] = []
        for combo in itertools.combinations(range(rows.shape[0]), m):
            sub = rows[list(combo)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            point = np.linalg.solve(sub, rhs[list(combo)])
            if np.all(rows @ point <= rhs + tol):
                found.append(point)
        if not found:
            raise InfeasiblePolyhedron("polyhedral multiplier set has no vertices")
        return np.unique(np.round(np.array(found), 14), axis=0)


def project_Lambda(L: LambdaSet, rho: FloatArray) -> FloatArray:
    """Euclidean projection of rho onto the multiplier set."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (L.dim,):
        raise ShapeError(f"rho must have length {L.dim}, got shape {rho.shape}")
    return L.project(rho)
