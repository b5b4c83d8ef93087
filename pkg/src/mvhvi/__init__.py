"""
mvhvi - mixed variational-hemivariational inequalities

Finite-dimensional instances of a hemivariational inequality in the state u
coupled with a variational inequality in a Lagrange multiplier lambda: a
hypothesis auditor, a Uzawa-type solver and a sampling verifier that
certifies candidate pairs against four equivalent formulations.
"""

__version__ = "0.3.0"

from mvhvi.core.config import Config
from mvhvi.core.loader import load_instance
from mvhvi.core.problem import ProblemInstance, SolutionPair
from mvhvi.hypotheses.audit import audit_instance
from mvhvi.solver.uzawa import solve
from mvhvi.verify.residuals import residual_report

__all__ = [
    "Config",
    "ProblemInstance",
    "SolutionPair",
    "__version__",
    "audit_instance",
    "load_instance",
    "residual_report",
    "solve",
]
