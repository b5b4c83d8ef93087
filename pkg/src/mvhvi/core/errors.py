"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations

from typing import Any, Optional


class MvhviError(Exception):
    """Base class for all mvhvi errors."""

    exit_code = 1


# Usage / IO (exit 1)


class ParseError(MvhviError):
    """Instance document is malformed or does not match the schema."""


class ShapeError(MvhviError, ValueError):
    """Matrix or vector shapes disagree with the declared dimensions."""


class DimensionLimit(MvhviError):
    """An enumeration routine was asked to run above its dimension cap."""


class BudgetExceeded(MvhviError):
    """A brute-force grid would exceed the point budget."""


class InfeasiblePolyhedron(MvhviError):
    """A polyhedral multiplier set turned out to be empty."""


# Hypothesis violations (exit 2)


class HypothesisError(MvhviError):
    """The data violate a standing hypothesis of the theory."""

    exit_code = 2


class ConstantGapError(HypothesisError):
    """m_J * ||gamma||^2 >= m_A, so no strongly monotone h can be derived."""


class HypothesisGate(HypothesisError):
    """A probe was called on data outside the hypotheses it relies on."""


class GrowthFitError(HypothesisError):
    """No finite (alpha_J, beta_J) covers the sampled growth at this theta."""


# Solver failures (exit 3)


class SolverError(MvhviError):
    """Numerical failure of the saddle iteration."""

    exit_code = 3


class InnerDivergence(SolverError):
    """The inner inclusion solve hit max_inner without reaching tol_u."""

    def __init__(self, message: str, residual: float, growing: bool) -> None:
        super().__init__(message)
        self.residual = residual
        self.growing = growing


class ScheduleExhausted(SolverError):
    """Iterates kept touching the largest ball of the radii schedule."""


class OuterNonConvergence(SolverError):
    """The Uzawa loop hit max_outer without meeting tol_outer."""


# Verification anomalies (exit 4)


class VerificationAnomaly(MvhviError):
    """Formulations or probes disagree where the theory says they cannot."""

    exit_code = 4


class PropertyViolation(VerificationAnomaly):
    """A calculus property failed on a concrete, reproducible sample."""

    def __init__(self, prop: str, witness: dict[str, Any], seed: Optional[int] = None) -> None:
        super().__init__(f"{prop} violated (seed={seed}): {witness}")
        self.prop = prop
        self.witness = witness
        self.seed = seed


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit-code taxonomy."""
    if isinstance(exc, MvhviError):
        return exc.exit_code
    return 1
