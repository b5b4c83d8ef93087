"""Domain model: instances, operators, multiplier sets, errors and config."""

from mvhvi.core.errors import (
    BudgetExceeded,
    ConstantGapError,
    DimensionLimit,
    GrowthFitError,
    HypothesisError,
    HypothesisGate,
    InfeasiblePolyhedron,
    InnerDivergence,
    MvhviError,
    OuterNonConvergence,
    ParseError,
    PropertyViolation,
    ScheduleExhausted,
    ShapeError,
    SolverError,
    VerificationAnomaly,
    exit_code_for,
)
from mvhvi.core.lambda_set import LambdaSet, LambdaVariant, project_Lambda
from mvhvi.core.loader import dump_instance, instance_from_dict, instance_to_dict, load_instance
from mvhvi.core.operators import (
    BilinearFormSpec,
    GammaSpec,
    HForm,
    HFunctionSpec,
    OperatorSpec,
    PowerTerm,
    SpaceDims,
    apply_A,
    eval_b,
)
from mvhvi.core.problem import (
    HypothesisProfile,
    ProblemInstance,
    Provenance,
    ResidualReport,
    SamplingInfo,
    SolutionPair,
)

__all__ = [
    "BilinearFormSpec",
    "BudgetExceeded",
    "ConstantGapError",
    "DimensionLimit",
    "GammaSpec",
    "GrowthFitError",
    "HForm",
    "HFunctionSpec",
    "HypothesisError",
    "HypothesisGate",
    "HypothesisProfile",
    "InfeasiblePolyhedron",
    "InnerDivergence",
    "LambdaSet",
    "LambdaVariant",
    "MvhviError",
    "OperatorSpec",
    "OuterNonConvergence",
    "ParseError",
    "PowerTerm",
    "ProblemInstance",
    "PropertyViolation",
    "Provenance",
    "ResidualReport",
    "SamplingInfo",
    "ScheduleExhausted",
    "ShapeError",
    "SolutionPair",
    "SolverError",
    "SpaceDims",
    "VerificationAnomaly",
    "apply_A",
    "dump_instance",
    "eval_b",
    "exit_code_for",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "project_Lambda",
]
