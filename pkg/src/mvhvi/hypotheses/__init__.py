"""Executable audits of the standing hypotheses."""

from mvhvi.hypotheses.audit import audit_instance
from mvhvi.hypotheses.coercivity import audit_coercivity
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.hypotheses.monotonicity import (
    audit_m_A,
    audit_m_J,
    audit_relaxed_monotonicity,
    derive_h_from_constants,
)
from mvhvi.hypotheses.report import AuditEntry, AuditReport, AuditStatus

__all__ = [
    "AuditEntry",
    "AuditReport",
    "AuditStatus",
    "audit_coercivity",
    "audit_instance",
    "audit_m_A",
    "audit_m_J",
    "audit_relaxed_monotonicity",
    "derive_h_from_constants",
    "infsup_constant",
]
