"""Residual certification, formulation equivalence, oracle and solution-map probes."""

from mvhvi.verify.equivalence import EquivalenceResult, equivalence_check
from mvhvi.verify.landscape import violation_landscape, write_landscape
from mvhvi.verify.oracle import OracleResult, brute_force_oracle
from mvhvi.verify.probes import (
    SolutionSetProbe,
    StabilityResult,
    UscReport,
    boundedness_probe,
    convexity_probe,
    stability_check,
    usc_probe,
)
from mvhvi.verify.residuals import (
    Formulation,
    FormulationResidual,
    ProbeSettings,
    residual,
    residual_report,
)
from mvhvi.verify.special_cases import SpecialCase, SpecialCaseReport, special_case_crosscheck

__all__ = [
    "EquivalenceResult",
    "Formulation",
    "FormulationResidual",
    "OracleResult",
    "ProbeSettings",
    "SolutionSetProbe",
    "SpecialCase",
    "SpecialCaseReport",
    "StabilityResult",
    "UscReport",
    "boundedness_probe",
    "brute_force_oracle",
    "convexity_probe",
    "equivalence_check",
    "residual",
    "residual_report",
    "special_case_crosscheck",
    "stability_check",
    "usc_probe",
    "violation_landscape",
    "write_landscape",
]
