"""Problem instances, hypothesis constants and candidate solutions."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

from mvhvi.core.errors import HypothesisError, ShapeError
from mvhvi.core.lambda_set import LambdaSet
from mvhvi.core.operators import (
    BilinearFormSpec,
    GammaSpec,
    HFunctionSpec,
    OperatorSpec,
    SpaceDims,
)
from mvhvi.core.types import FloatArray, frozen_array

if TYPE_CHECKING:
    from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec


class Provenance(str, Enum):
    DECLARED = "declared"
    ESTIMATED = "estimated"


PROFILE_CONSTANTS = ("theta", "alpha_J", "beta_J", "m_A", "m_J", "alpha_b")


@dataclass(frozen=True)
class HypothesisProfile:
    """
    The constants the theory is conditional on, each tagged with where it
    came from. Estimated constants record the number of samples behind them.

    alpha_b is None until it is declared or computed.
    """

    theta: float = 1.0
    alpha_J: float = 0.0
    beta_J: float = 1.0
    m_A: float = 0.0
    m_J: float = 0.0
    alpha_b: Optional[float] = None
    provenance: dict[str, Provenance] = field(default_factory=dict)
    samples: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.theta < 0.0:
            raise HypothesisError(f"theta must be >= 0, got {self.theta}")
        if self.alpha_J < 0.0:
            raise HypothesisError(f"alpha_J must be >= 0, got {self.alpha_J}")
        if not self.beta_J > 0.0:
            raise HypothesisError(f"beta_J must be > 0, got {self.beta_J}")
        if self.m_A < 0.0 or self.m_J < 0.0:
            raise HypothesisError("m_A and m_J must be >= 0")
        if self.alpha_b is not None and self.alpha_b < 0.0:
            raise HypothesisError(f"alpha_b must be >= 0, got {self.alpha_b}")

        prov = {name: Provenance.DECLARED for name in PROFILE_CONSTANTS}
        prov.update({k: Provenance(v) for k, v in self.provenance.items()})
        object.__setattr__(self, "provenance", prov)

    def provenance_of(self, name: str) -> Provenance:
        return self.provenance[name]

    def estimated(self, name: str, value: float, samples: int) -> HypothesisProfile:
        """Copy with one constant replaced by an estimate."""
        if name not in PROFILE_CONSTANTS:
            raise KeyError(name)
        provenance = dict(self.provenance)
        provenance[name] = Provenance.ESTIMATED
        counts = dict(self.samples)
        counts[name] = int(samples)
        return dataclasses.replace(
            self, **{name: value}, provenance=provenance, samples=counts
        )

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "theta": self.theta,
            "alpha_J": self.alpha_J,
            "beta_J": self.beta_J,
            "m_J": self.m_J,
        }
        if self.alpha_b is not None:
            data["alpha_b"] = self.alpha_b
        return data


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """
    One mixed variational-hemivariational inequality: find (u, lambda) in
    V x Lambda with

        <A(u), v-u> + b(v-u, lambda) + J0(gamma u; gamma(v-u)) >= <f, v-u>
        b(u, rho - lambda) <= 0

    for all v in V and rho in Lambda.
    """

    dims: SpaceDims
    A: OperatorSpec
    J: PiecewiseC1Spec
    gamma: GammaSpec
    b: BilinearFormSpec
    Lambda: LambdaSet
    f: FloatArray
    h: HFunctionSpec = field(default_factory=HFunctionSpec.zero)
    profile: HypothesisProfile = field(default_factory=HypothesisProfile)
    name: str = ""

    def __post_init__(self) -> None:
        n, m, k = self.dims.n_V, self.dims.m_E, self.dims.k_X
        f = frozen_array(np.atleast_1d(np.asarray(self.f, dtype=float)), 1, "f")
        object.__setattr__(self, "f", f)

        checks = [
            ("A.P", self.A.linear_part.shape, (n, n)),
            ("gamma.G", self.gamma.shape, (k, n)),
            ("b.B", self.b.shape, (m, n)),
            ("f", f.shape, (n,)),
            ("J", (self.J.dim,), (k,)),
            ("lambda_set", (self.Lambda.dim,), (m,)),
        ]
        for name, got, expected in checks:
            if tuple(got) != expected:
                raise ShapeError(
                    f"{name} has shape {tuple(got)}, expected {expected} "
                    f"for dims n={n}, m={m}, k={k}"
                )
        if (
            self.profile.m_A == 0.0
            and self.A.declared_m_A > 0.0
            and self.profile.provenance_of("m_A") is Provenance.DECLARED
        ):
            object.__setattr__(
                self, "profile", dataclasses.replace(self.profile, m_A=self.A.declared_m_A)
            )

    @property
    def n(self) -> int:
        return self.dims.n_V

    @property
    def m(self) -> int:
        return self.dims.m_E

    @property
    def k(self) -> int:
        return self.dims.k_X

    @property
    def scale(self) -> float:
        """Typical magnitude of the data, used to size sampling balls."""
        bps = [float(np.max(np.abs(t))) for t in self.J.breakpoint_set() if t.size]
        return max(1.0, float(np.linalg.norm(self.f)), *bps)

    @property
    def B(self) -> FloatArray:
        return self.b.B

    @property
    def G(self) -> FloatArray:
        return self.gamma.G

    def with_f(self, f: FloatArray) -> ProblemInstance:
        return dataclasses.replace(self, f=np.asarray(f, dtype=float))

    def with_h(self, h: HFunctionSpec) -> ProblemInstance:
        return dataclasses.replace(self, h=h)

    def with_profile(self, profile: HypothesisProfile) -> ProblemInstance:
        return dataclasses.replace(self, profile=profile)

    def with_b(self, B: FloatArray) -> ProblemInstance:
        B = np.atleast_2d(np.asarray(B, dtype=float))
        return dataclasses.replace(self, b=BilinearFormSpec(B))

    def with_name(self, name: str) -> ProblemInstance:
        return dataclasses.replace(self, name=name)


@dataclass(frozen=True)
class SamplingInfo:
    directions: int
    seed: int
    refine: bool


@dataclass(frozen=True)
class ResidualReport:
    """Worst clamped violation of each of the four equivalent formulations."""

    r_original: float
    r_minty: float
    r_combined: float
    r_minty_combined: float
    sampling: SamplingInfo

    def as_dict(self) -> dict[str, float]:
        return {
            "original": self.r_original,
            "minty": self.r_minty,
            "combined": self.r_combined,
            "minty-combined": self.r_minty_combined,
        }

    @property
    def worst(self) -> float:
        return max(self.as_dict().values())

    def certified(self, tol: float) -> bool:
        return self.worst <= tol


@dataclass(frozen=True, eq=False)
class SolutionPair:
    u: FloatArray
    lam: FloatArray
    residuals: Optional[ResidualReport] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", frozen_array(self.u, 1, "u"))
        object.__setattr__(self, "lam", frozen_array(self.lam, 1, "lambda"))

    def with_residuals(self, report: ResidualReport) -> SolutionPair:
        return dataclasses.replace(self, residuals=report)
