"""
Separable piecewise-smooth functions J(x) = sum_i j_i(x_i) with exact Clarke
oracles.

Every piece of a coordinate function has the form

    q x^2/2 + a x + b + w |x - c|

where the kink c is one of the coordinate's breakpoints and does not lie
inside the piece, so each piece is a quadratic on its interval. At a
breakpoint the generalized gradient of j_i is the interval spanned by the
two one-sided derivatives; away from breakpoints it is the derivative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Optional

import numpy as np

from mvhvi.core.errors import HypothesisError, ParseError, ShapeError
from mvhvi.core.types import FloatArray

CONTINUITY_TOL = 1e-9
JUMP_TOL = 1e-12


class PieceKind(str, Enum):
    AFFINE = "affine"
    QUAD = "quad"
    ABS = "abs"


_PIECE_KEYS = {
    PieceKind.AFFINE: {"a", "b"},
    PieceKind.QUAD: {"q", "a", "b"},
    PieceKind.ABS: {"w", "c", "q", "a", "b"},
}


@dataclass(frozen=True)
class Piece:
    kind: PieceKind
    q: float = 0.0
    a: float = 0.0
    b: float = 0.0
    w: float = 0.0
    c: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PieceKind(self.kind))
        if self.kind is PieceKind.AFFINE and (self.q or self.w):
            raise ParseError("affine piece cannot carry q or w")
        if self.kind is PieceKind.QUAD and self.w:
            raise ParseError("quad piece cannot carry w; use kind 'abs'")

    @classmethod
    def affine(cls, a: float = 0.0, b: float = 0.0) -> Piece:
        return cls(PieceKind.AFFINE, a=a, b=b)

    @classmethod
    def quad(cls, q: float, a: float = 0.0, b: float = 0.0) -> Piece:
        return cls(PieceKind.QUAD, q=q, a=a, b=b)

    @classmethod
    def abs_kink(
        cls, w: float, c: float = 0.0, q: float = 0.0, a: float = 0.0, b: float = 0.0
    ) -> Piece:
        return cls(PieceKind.ABS, q=q, a=a, b=b, w=w, c=c)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Piece:
        if not isinstance(data, dict) or "kind" not in data:
            raise ParseError(f"piece must be an object with a 'kind', got {data!r}")
        try:
            kind = PieceKind(data["kind"])
        except ValueError:
            raise ParseError(f"unknown piece kind {data['kind']!r}") from None
        params = {k: v for k, v in data.items() if k != "kind"}
        unknown = set(params) - _PIECE_KEYS[kind]
        if unknown:
            raise ParseError(f"unknown keys for {kind.value} piece: {sorted(unknown)}")
        try:
            values = {k: float(v) for k, v in params.items()}
        except (TypeError, ValueError):
            raise ParseError(f"non-numeric piece parameter in {data!r}") from None
        if kind is PieceKind.ABS and "w" not in values:
            raise ParseError("abs piece needs a coefficient 'w'")
        return cls(kind, **values)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value}
        for key in sorted(_PIECE_KEYS[self.kind]):
            data[key] = getattr(self, key)
        return data

    def effective(self, side: float) -> tuple[float, float, float]:
        """(q, a, b) of the quadratic this piece equals where sign(x-c) = side."""
        return (
            self.q,
            self.a + self.w * side,
            self.b - self.w * side * self.c,
        )


@dataclass(frozen=True, eq=False)
class CoordinateFunction:
    """One j_i: breakpoints t_1 < ... < t_p and p+1 pieces."""

    breakpoints: tuple[float, ...]
    pieces: tuple[Piece, ...]
    quad_coef: FloatArray = field(init=False, repr=False)
    lin_coef: FloatArray = field(init=False, repr=False)
    const_coef: FloatArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        bps = tuple(float(t) for t in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not all(np.isfinite(bps)):
            raise ParseError("breakpoints must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ParseError(f"breakpoints must be strictly increasing, got {bps}")
        if len(self.pieces) != len(bps) + 1:
            raise ParseError(
                f"{len(bps)} breakpoints need {len(bps) + 1} pieces, got {len(self.pieces)}"
            )

        Q, A, C = [], [], []
        for idx, piece in enumerate(self.pieces):
            side = self._kink_side(idx, piece)
            q, a, b = piece.effective(side)
            Q.append(q)
            A.append(a)
            C.append(b)
        for name, values in (("quad_coef", Q), ("lin_coef", A), ("const_coef", C)):
            arr = np.array(values, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        self._check_continuity()

    def _kink_side(self, idx: int, piece: Piece) -> float:
        if piece.kind is not PieceKind.ABS or piece.w == 0.0:
            return 0.0
        if piece.c not in self.breakpoints:
            raise ParseError(f"abs kink at {piece.c} is not a breakpoint {self.breakpoints}")
        left = self.breakpoints[idx - 1] if idx > 0 else -np.inf
        right = self.breakpoints[idx] if idx < len(self.breakpoints) else np.inf
        if piece.c <= left:
            return 1.0
        if piece.c >= right:
            return -1.0
        raise ParseError(f"abs kink at {piece.c} lies inside piece {idx}")

    def _check_continuity(self) -> None:
        for j, t in enumerate(self.breakpoints):
            left = self._piece_value(j, t)
            right = self._piece_value(j + 1, t)
            if abs(left - right) > CONTINUITY_TOL * max(1.0, abs(left)):
                raise HypothesisError(
                    f"coordinate function jumps at breakpoint {t}: {left} vs {right}"
                )

    def _piece_value(self, idx: int, x: float) -> float:
        return float(
            0.5 * self.quad_coef[idx] * x * x + self.lin_coef[idx] * x + self.const_coef[idx]
        )

    @property
    def bp_array(self) -> FloatArray:
        return np.asarray(self.breakpoints, dtype=float)

    def piece_index(self, x: FloatArray, side: str = "right") -> np.ndarray:
        """Index of the piece holding x; at a breakpoint 'left'/'right' choose the side."""
        return np.searchsorted(self.bp_array, x, side=side)

    def value(self, x: FloatArray) -> FloatArray:
        idx = self.piece_index(x)
        return 0.5 * self.quad_coef[idx] * x * x + self.lin_coef[idx] * x + self.const_coef[idx]

    def derivative_on(self, idx: np.ndarray, x: FloatArray) -> FloatArray:
        return self.quad_coef[idx] * x + self.lin_coef[idx]

    def interval(self, x: FloatArray, capture: float = 0.0) -> tuple[FloatArray, FloatArray]:
        """Hull of the one-sided derivatives at x (widened by the capture radius)."""
        x = np.asarray(x, dtype=float)
        if capture > 0.0:
            eps = capture * np.maximum(1.0, np.abs(x))
            il = self.piece_index(x - eps, side="left")
            ir = self.piece_index(x + eps, side="right")
        else:
            il = self.piece_index(x, side="left")
            ir = self.piece_index(x, side="right")
        dl = self.derivative_on(il, x)
        dr = self.derivative_on(ir, x)
        return np.minimum(dl, dr), np.maximum(dl, dr)

    def jumps(self) -> FloatArray:
        """Derivative jump (right minus left) at each breakpoint."""
        t = self.bp_array
        if t.size == 0:
            return np.zeros(0)
        idx = np.arange(t.size)
        return self.derivative_on(idx + 1, t) - self.derivative_on(idx, t)

    def slope_bound(self, lo: float, hi: float) -> float:
        """max |j_i'| over [lo, hi]."""
        best = 0.0
        edges = [-np.inf, *self.breakpoints, np.inf]
        for idx in range(len(self.pieces)):
            a, b = max(lo, edges[idx]), min(hi, edges[idx + 1])
            if a > b:
                continue
            ends = self.derivative_on(np.array([idx, idx]), np.array([a, b]))
            best = max(best, float(np.max(np.abs(ends))))
        return best

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.quad_coef) or np.any(self.lin_coef) or np.any(self.const_coef))

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CoordinateFunction:
        if not isinstance(data, dict):
            raise ParseError(f"coordinate function must be an object, got {data!r}")
        unknown = set(data) - {"breakpoints", "pieces"}
        if unknown:
            raise ParseError(f"unknown keys in J coordinate: {sorted(unknown)}")
        if "pieces" not in data:
            raise ParseError("J coordinate needs 'pieces'")
        try:
            bps = tuple(float(t) for t in data.get("breakpoints", []))
        except (TypeError, ValueError):
            raise ParseError("breakpoints must be numbers") from None
        return cls(bps, tuple(Piece.from_dict(p) for p in data["pieces"]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "breakpoints": list(self.breakpoints),
            "pieces": [p.to_dict() for p in self.pieces],
        }


@dataclass(frozen=True)
class SubgradientBox:
    """The product of intervals [lo_i, hi_i] containing the Clarke gradient."""

    lo: FloatArray
    hi: FloatArray

    def support(self, d: FloatArray) -> float:
        return float(np.sum(np.maximum(self.lo * d, self.hi * d)))

    def vertices(self) -> FloatArray:
        """All 2^k corners, shape (2^k, k)."""
        k = self.lo.shape[0]
        mask = ((np.arange(2**k)[:, None] >> np.arange(k)) & 1).astype(bool)
        return np.where(mask, self.hi, self.lo)

    def nearest(self, target: FloatArray) -> FloatArray:
        return np.clip(target, self.lo, self.hi)

    def contains(self, xi: FloatArray, tol: float = 0.0) -> bool:
        return bool(np.all(xi >= self.lo - tol) and np.all(xi <= self.hi + tol))


@dataclass(frozen=True, eq=False)
class PiecewiseC1Spec:
    coordinates: tuple[CoordinateFunction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        if not self.coordinates:
            raise ShapeError("J needs at least one coordinate")

    @classmethod
    def zero(cls, k: int) -> PiecewiseC1Spec:
        return cls(tuple(CoordinateFunction((), (Piece.affine(),)) for _ in range(k)))

    @classmethod
    def uniform(cls, coordinate: CoordinateFunction, k: int) -> PiecewiseC1Spec:
        return cls(tuple(coordinate for _ in range(k)))

    @classmethod
    def from_dict(cls, data: Any) -> PiecewiseC1Spec:
        if not isinstance(data, list):
            raise ParseError("J must be a list of coordinate functions")
        return cls(tuple(CoordinateFunction.from_dict(c) for c in data))

    def to_dict(self) -> list[dict[str, Any]]:
        return [c.to_dict() for c in self.coordinates]

    @property
    def dim(self) -> int:
        return len(self.coordinates)

    @cached_property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coordinates)

    def _check(self, x: FloatArray, name: str = "x") -> FloatArray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dim,):
            raise ShapeError(f"{name} must have trailing length {self.dim}, got {x.shape}")
        return x

    def value(self, x: FloatArray) -> float:
        x = self._check(x)
        return float(sum(c.value(x[i]) for i, c in enumerate(self.coordinates)))

    def value_batch(self, X: FloatArray) -> FloatArray:
        X = self._check(X)
        return sum(c.value(X[:, i]) for i, c in enumerate(self.coordinates))

    def box(self, x: FloatArray, capture: float = 0.0) -> SubgradientBox:
        x = self._check(x)
        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        for i, c in enumerate(self.coordinates):
            lo[i], hi[i] = c.interval(x[i], capture)
        return SubgradientBox(lo, hi)

    def box_batch(self, X: FloatArray, capture: float = 0.0) -> tuple[FloatArray, FloatArray]:
        """Row-wise box bounds for a (N, k) batch."""
        X = self._check(X)
        lo = np.empty_like(X)
        hi = np.empty_like(X)
        for i, c in enumerate(self.coordinates):
            lo[:, i], hi[:, i] = c.interval(X[:, i], capture)
        return lo, hi

    def clarke_dir(self, x: FloatArray, d: FloatArray, capture: float = 0.0) -> float:
        return self.box(x, capture).support(self._check(d, "d"))

    def clarke_dir_batch(self, X: FloatArray, D: FloatArray, capture: float = 0.0) -> FloatArray:
        lo, hi = self.box_batch(X, capture)
        D = self._check(D, "d")
        return np.sum(np.maximum(lo * D, hi * D), axis=1)

    def gradient(self, x: FloatArray) -> FloatArray:
        """Derivative where every coordinate is smooth (right-derivative at breakpoints)."""
        x = self._check(x)
        return np.array(
            [c.derivative_on(c.piece_index(x[i]), x[i]) for i, c in enumerate(self.coordinates)]
        )

    def piece_coefficients(self, x: FloatArray) -> tuple[FloatArray, FloatArray]:
        """(q, a) of the piece holding each x_i, so j_i'(x_i) = q_i x_i + a_i."""
        x = self._check(x)
        q = np.empty(self.dim)
        a = np.empty(self.dim)
        for i, c in enumerate(self.coordinates):
            idx = c.piece_index(x[i])
            q[i], a[i] = c.quad_coef[idx], c.lin_coef[idx]
        return q, a

    def nearest_breakpoints(self, x: FloatArray) -> tuple[FloatArray, FloatArray]:
        """Per coordinate, the closest breakpoint and its distance (inf if none)."""
        x = self._check(x)
        nearest = np.full(self.dim, np.nan)
        dist = np.full(self.dim, np.inf)
        for i, c in enumerate(self.coordinates):
            if not c.breakpoints:
                continue
            t = c.bp_array
            j = int(np.argmin(np.abs(t - x[i])))
            nearest[i], dist[i] = t[j], abs(t[j] - x[i])
        return nearest, dist

    def breakpoint_set(self) -> list[FloatArray]:
        return [c.bp_array for c in self.coordinates]

    @cached_property
    def max_curvature(self) -> float:
        """max |q| over all pieces, a Lipschitz bound for the smooth parts of dJ."""
        return float(max(np.max(np.abs(c.quad_coef)) for c in self.coordinates))

    @cached_property
    def relaxed_monotonicity_constant(self) -> float:
        """
        Smallest m >= 0 with <xi_w - xi_x, w - x> >= -m |w - x|^2 for all
        selections of the box; inf if some breakpoint has a downward jump.
        """
        worst = 0.0
        for c in self.coordinates:
            if c.breakpoints and np.any(c.jumps() < -JUMP_TOL):
                return float("inf")
            worst = max(worst, float(np.max(-c.quad_coef)))
        return worst


def eval_J(J: PiecewiseC1Spec, x: FloatArray) -> float:
    """J(x) = sum of the coordinate functions."""
    return J.value(x)


def subgradient_box(J: PiecewiseC1Spec, x: FloatArray, capture: float = 0.0) -> SubgradientBox:
    """Interval hull of the one-sided derivatives, coordinate by coordinate."""
    return J.box(x, capture)


def clarke_dir(
    J: PiecewiseC1Spec, x: FloatArray, d: FloatArray, capture: float = 0.0
) -> float:
    """Generalized directional derivative J0(x; d) as the support of the box."""
    return J.clarke_dir(x, d, capture)


def local_lipschitz(J: PiecewiseC1Spec, x: FloatArray, radius: float = 1e-6) -> float:
    """
    Lipschitz constant of J on the cube of half-width `radius` around x:
    the Euclidean norm of the per-coordinate maximal |derivative|.
    """
    x = np.asarray(x, dtype=float)
    slopes = [
        c.slope_bound(x[i] - radius, x[i] + radius) for i, c in enumerate(J.coordinates)
    ]
    return float(np.linalg.norm(slopes))


def parse_J(data: Any, k: Optional[int] = None) -> PiecewiseC1Spec:
    J = PiecewiseC1Spec.from_dict(data)
    if k is not None and J.dim != k:
        raise ShapeError(f"J has {J.dim} coordinates, expected k={k}")
    return J
