"""Data of one mixed inequality: dimensions, A, b, gamma and the h function."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from mvhvi.core.errors import HypothesisError, ShapeError
from mvhvi.core.types import FloatArray, frozen_array


@dataclass(frozen=True)
class SpaceDims:
    """Dimensions of V (state), E (multipliers) and X (where J lives)."""

    n_V: int
    m_E: int
    k_X: int

    def __post_init__(self) -> None:
        for name in ("n_V", "m_E", "k_X"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ShapeError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class PowerTerm:
    """Componentwise c * |u_i|^(p-2) * u_i with p >= 2."""

    exponent: float
    coefficient: float

    def __post_init__(self) -> None:
        if self.exponent < 2.0:
            raise HypothesisError(f"power exponent must be >= 2, got {self.exponent}")
        if self.coefficient < 0.0:
            raise HypothesisError(
                f"power coefficient must be >= 0, got {self.coefficient}"
            )


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """A(u) = P u + power_term(u)."""

    linear_part: FloatArray
    power_term: Optional[PowerTerm] = None
    declared_m_A: float = 0.0

    def __post_init__(self) -> None:
        P = frozen_array(self.linear_part, 2, "A.P")
        if P.shape[0] != P.shape[1]:
            raise ShapeError(f"A.P must be square, got shape {P.shape}")
        if self.declared_m_A < 0.0:
            raise HypothesisError(f"m_A must be >= 0, got {self.declared_m_A}")
        object.__setattr__(self, "linear_part", P)

    @property
    def n(self) -> int:
        return int(self.linear_part.shape[0])

    def apply(self, u: FloatArray) -> FloatArray:
        out = self.linear_part @ u
        if self.power_term is not None and self.power_term.coefficient > 0.0:
            p, c = self.power_term.exponent, self.power_term.coefficient
            out = out + c * np.abs(u) ** (p - 2.0) * u
        return out

    def apply_batch(self, U: FloatArray) -> FloatArray:
        """Row-wise A for a (N, n) batch."""
        out = U @ self.linear_part.T
        if self.power_term is not None and self.power_term.coefficient > 0.0:
            p, c = self.power_term.exponent, self.power_term.coefficient
            out = out + c * np.abs(U) ** (p - 2.0) * U
        return out

    def jacobian(self, u: FloatArray) -> FloatArray:
        J = np.array(self.linear_part, dtype=float)
        if self.power_term is not None and self.power_term.coefficient > 0.0:
            p, c = self.power_term.exponent, self.power_term.coefficient
            J = J + np.diag(c * (p - 1.0) * np.abs(u) ** (p - 2.0))
        return J

    def lipschitz_bound(self, radius: float) -> float:
        """Lipschitz constant of A on the ball of the given radius."""
        bound = self.linear_norm
        if self.power_term is not None and self.power_term.coefficient > 0.0:
            p, c = self.power_term.exponent, self.power_term.coefficient
            bound += c * (p - 1.0) * max(radius, 0.0) ** (p - 2.0)
        return bound

    @cached_property
    def linear_norm(self) -> float:
        return float(np.linalg.norm(self.linear_part, 2))

    @cached_property
    def sym_min_eigenvalue(self) -> float:
        """Smallest eigenvalue of (P + P^T)/2, the monotonicity modulus of P."""
        sym = 0.5 * (self.linear_part + self.linear_part.T)
        return float(np.linalg.eigvalsh(sym)[0])

    @property
    def is_linear(self) -> bool:
        return self.power_term is None or self.power_term.coefficient == 0.0


def apply_A(A: OperatorSpec, u: FloatArray) -> FloatArray:
    """Evaluate the operator A at u."""
    return A.apply(np.asarray(u, dtype=float))


@dataclass(frozen=True, eq=False)
class BilinearFormSpec:
    """b(v, rho) = rho^T B v with B of shape (m_E, n_V)."""

    B: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "B", frozen_array(self.B, 2, "b.B"))

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.B.shape[0]), int(self.B.shape[1]))

    @cached_property
    def norm(self) -> float:
        """Boundedness constant of b: the spectral norm of B."""
        return float(np.linalg.norm(self.B, 2))

    def __call__(self, v: FloatArray, rho: FloatArray) -> float:
        return float(rho @ (self.B @ v))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.B)


def eval_b(b: BilinearFormSpec, v: FloatArray, rho: FloatArray) -> float:
    """Evaluate b(v, rho)."""
    return b(np.asarray(v, dtype=float), np.asarray(rho, dtype=float))


@dataclass(frozen=True, eq=False)
class GammaSpec:
    """The linear map gamma: V -> X as a (k_X, n_V) matrix."""

    G: FloatArray
    operator_norm: float = field(init=False)

    def __post_init__(self) -> None:
        G = frozen_array(self.G, 2, "gamma.G")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "operator_norm", float(np.linalg.norm(G, 2)))

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.G.shape[0]), int(self.G.shape[1]))

    def __call__(self, v: FloatArray) -> FloatArray:
        return self.G @ v

    def adjoint(self, xi: FloatArray) -> FloatArray:
        return self.G.T @ xi


class HForm(str, Enum):
    POWER = "power"
    ZERO = "zero"


@dataclass(frozen=True)
class HFunctionSpec:
    """
    The relaxation function h of the monotonicity hypothesis.

    POWER: h(v) = c_h * ||v||^tau with c_h > 0, tau > 1 (convex, positive off 0).
    ZERO:  h = 0, which satisfies H(h)(i)-(ii) but not H(h)(iii).
    """

    form: HForm = HForm.ZERO
    c_h: float = 0.0
    tau: float = 2.0
    convex: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "form", HForm(self.form))
        if self.form is HForm.POWER:
            if not self.c_h > 0.0:
                raise HypothesisError(f"power-form h needs c_h > 0, got {self.c_h}")
            if not self.tau > 1.0:
                raise HypothesisError(f"power-form h needs tau > 1, got {self.tau}")

    @classmethod
    def power(cls, c_h: float, tau: float = 2.0) -> HFunctionSpec:
        return cls(form=HForm.POWER, c_h=float(c_h), tau=float(tau))

    @classmethod
    def zero(cls) -> HFunctionSpec:
        return cls(form=HForm.ZERO)

    @property
    def is_power(self) -> bool:
        return self.form is HForm.POWER

    def __call__(self, v: FloatArray) -> float:
        if self.form is HForm.ZERO:
            return 0.0
        return self.c_h * float(np.linalg.norm(v)) ** self.tau

    def batch(self, V: FloatArray) -> FloatArray:
        """Row-wise h for a (N, n) batch."""
        if self.form is HForm.ZERO:
            return np.zeros(V.shape[0])
        return self.c_h * np.linalg.norm(V, axis=1) ** self.tau
