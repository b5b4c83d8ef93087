"""Built-in example instances, addressable by name from every command."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Any, Callable, Optional, Union

import numpy as np

from mvhvi.core.errors import ParseError
from mvhvi.core.lambda_set import LambdaSet
from mvhvi.core.loader import load_instance
from mvhvi.core.operators import BilinearFormSpec, GammaSpec, HFunctionSpec, OperatorSpec, SpaceDims
from mvhvi.core.problem import HypothesisProfile, ProblemInstance
from mvhvi.core.types import FloatArray
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.hypotheses.monotonicity import derive_h_from_constants
from mvhvi.nonsmooth.growth import estimate_growth
from mvhvi.nonsmooth.piecewise import CoordinateFunction, Piece, PiecewiseC1Spec

ROD_PATTERN = re.compile(r"^contact-rod-(\d+)$")
DEFAULT_ROD_NODES = 10


def kink_kernel(weight: float = 1.0, curvature: float = -0.5) -> CoordinateFunction:
    """j(x) = weight |x| + curvature x^2 / 2; the default is |x| - x^2/4."""
    piece = Piece.abs_kink(w=weight, c=0.0, q=curvature)
    return CoordinateFunction((0.0,), (piece, piece))


def scalar_lcp(f: float = 1.0) -> ProblemInstance:
    """2u + lambda = f with u <= 0, lambda >= 0, u * lambda = 0."""
    A = OperatorSpec(np.array([[2.0]]), declared_m_A=2.0)
    return ProblemInstance(
        dims=SpaceDims(1, 1, 1),
        A=A,
        J=PiecewiseC1Spec.zero(1),
        gamma=GammaSpec(np.array([[1.0]])),
        b=BilinearFormSpec(np.array([[1.0]])),
        Lambda=LambdaSet.orthant(1),
        f=np.array([f]),
        h=HFunctionSpec.power(2.0),
        profile=HypothesisProfile(theta=1.0, alpha_J=0.0, beta_J=1.0, m_J=0.0, alpha_b=1.0),
        name="scalar-lcp",
    )


def kink_multiplier(f: float = 3.0) -> ProblemInstance:
    """
    A(u) = 2u with j(x) = |x| - x^2/4. For f = 3 the solution set is
    {0} x [2, 4]; for f = -2 it is the single pair (-2/3, 0).
    """
    return build_contact_rod(2, stiffness=2.0, load=f).with_name("kink-multiplier")


def build_contact_rod(
    N: int,
    friction: Union[CoordinateFunction, dict[str, Any], None] = None,
    stiffness: float = 2.0,
    load: float = 3.0,
) -> ProblemInstance:
    """
    Rod on [0, 1] fixed at x = 0 and discretized with N nodes; the N-1 free
    nodes carry the unknowns. The operator is the finite-difference
    stiffness k_e * tridiag(-1, 2, -1) with k_e = stiffness * (N-1)^2 and a
    natural end row. The free end meets an obstacle (B = trace, Lambda = R+)
    and a nonmonotone friction law j (default |x| - x^2/4), and carries the
    point load.

    Raises:
        ConstantGapError: m_J |gamma|^2 >= m_A, so no strongly monotone h exists
    """
    if N < 2:
        raise ValueError(f"a rod needs N >= 2 nodes, got {N}")
    if isinstance(friction, dict):
        friction = CoordinateFunction.from_dict(friction)
    kernel = friction or kink_kernel()

    n = N - 1
    k_e = stiffness * (N - 1) ** 2
    K = k_e * (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))
    K[-1, -1] = k_e
    m_A = float(np.linalg.eigvalsh(K)[0])

    trace = np.zeros((1, n))
    trace[0, -1] = 1.0
    gamma = GammaSpec(trace)
    J = PiecewiseC1Spec((kernel,))
    m_J = J.relaxed_monotonicity_constant
    h = derive_h_from_constants(m_A, m_J, gamma.operator_norm)

    f = np.zeros(n)
    f[-1] = load
    alpha_J, beta_J = estimate_growth(J, 2.0, 2.0 * max(1.0, abs(load)), 2000)
    b = BilinearFormSpec(trace.copy())
    profile = HypothesisProfile(
        theta=2.0,
        alpha_J=alpha_J,
        beta_J=beta_J,
        m_J=m_J,
        alpha_b=infsup_constant(b),
    )
    return ProblemInstance(
        dims=SpaceDims(n, 1, 1),
        A=OperatorSpec(K, declared_m_A=m_A),
        J=J,
        gamma=gamma,
        b=b,
        Lambda=LambdaSet.orthant(1),
        f=f,
        h=h,
        profile=profile,
        name=f"contact-rod-{N}",
    )


def random_instance(
    seed: int,
    n: int,
    m: int,
    k: Optional[int] = None,
    box: bool = False,
) -> ProblemInstance:
    """
    Random instance inside the theory: SPD operator with spectrum in [1, 3],
    |gamma| = 1, kink kernels with m_J = m_A / 4 and a full-row-rank B
    (m <= n). Lambda is R+^m, or a box when `box` is set.
    """
    if m > n:
        raise ValueError(f"the inf-sup condition needs m <= n, got m={m}, n={n}")
    k = k or n
    rng = np.random.default_rng(seed)

    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    P = Q @ np.diag(rng.uniform(1.0, 3.0, n)) @ Q.T
    P = 0.5 * (P + P.T)
    m_A = float(np.linalg.eigvalsh(P)[0])

    G = rng.standard_normal((k, n))
    G /= np.linalg.norm(G, 2)
    m_J = 0.25 * m_A
    J = PiecewiseC1Spec(
        tuple(kink_kernel(float(w), -m_J) for w in rng.uniform(0.2, 1.0, k))
    )
    b = BilinearFormSpec(rng.standard_normal((m, n)))
    Lambda = LambdaSet.box(rng.uniform(1.0, 3.0, m)) if box else LambdaSet.orthant(m)
    f = 2.0 * rng.standard_normal(n)

    alpha_J, beta_J = estimate_growth(J, 2.0, 2.0 * max(1.0, float(np.linalg.norm(f))), 2000, seed)
    return ProblemInstance(
        dims=SpaceDims(n, m, k),
        A=OperatorSpec(P, declared_m_A=m_A),
        J=J,
        gamma=GammaSpec(G),
        b=b,
        Lambda=Lambda,
        f=f,
        h=derive_h_from_constants(m_A, m_J, 1.0),
        profile=HypothesisProfile(
            theta=2.0, alpha_J=alpha_J, beta_J=beta_J, m_J=m_J, alpha_b=infsup_constant(b)
        ),
        name=f"random-{n}-{m}-{k}-{seed}",
    )


def equality_case(n: int = 2, m_A: float = 2.0, f: Optional[FloatArray] = None) -> ProblemInstance:
    """A = m_A I, J = 0, Lambda = {0}: u = f / m_A attains the stability bound."""
    load = np.ones(n) if f is None else np.asarray(f, dtype=float)
    b = BilinearFormSpec(np.eye(1, n))
    return ProblemInstance(
        dims=SpaceDims(n, 1, 1),
        A=OperatorSpec(m_A * np.eye(n), declared_m_A=m_A),
        J=PiecewiseC1Spec.zero(1),
        gamma=GammaSpec(np.eye(1, n)),
        b=b,
        Lambda=LambdaSet.box(np.zeros(1)),
        f=load,
        h=HFunctionSpec.power(m_A, 2.0),
        profile=HypothesisProfile(theta=1.0, alpha_J=0.0, beta_J=1.0, m_J=0.0, alpha_b=1.0),
        name="equality-case",
    )


class ExampleGallery:
    """Named instances; `contact-rod-N` accepts any N >= 2."""

    def __init__(self) -> None:
        self._builders: dict[str, Callable[[], ProblemInstance]] = {
            "scalar-lcp": scalar_lcp,
            "kink-multiplier": kink_multiplier,
            f"contact-rod-{DEFAULT_ROD_NODES}": lambda: build_contact_rod(DEFAULT_ROD_NODES),
        }

    def names(self) -> list[str]:
        return list(self._builders)

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and (name in self._builders or bool(ROD_PATTERN.match(name)))

    def get(self, name: str) -> ProblemInstance:
        if name in self._builders:
            return self._builders[name]()
        match = ROD_PATTERN.match(name)
        if match:
            return build_contact_rod(int(match.group(1)))
        raise ParseError(f"unknown gallery instance {name!r}; known: {', '.join(self.names())}")


def resolve_instance(source: str, gallery: Optional[ExampleGallery] = None) -> ProblemInstance:
    """A gallery name or a path to an instance file."""
    gallery = gallery or ExampleGallery()
    if source in gallery and not Path(source).exists():
        return gallery.get(source)
    return load_instance(source)
