"""Audit results: one entry per hypothesis item."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator, Optional


class AuditStatus(str, Enum):
    VERIFIED = "verified"
    ESTIMATED = "estimated"
    VIOLATED = "violated"


_RANK = {AuditStatus.VERIFIED: 0, AuditStatus.ESTIMATED: 1, AuditStatus.VIOLATED: 2}


@dataclass(frozen=True)
class AuditEntry:
    name: str
    status: AuditStatus
    margin: float
    witness: Optional[dict[str, Any]] = None
    seed: Optional[int] = None
    samples: int = 0
    required: bool = True
    note: str = ""

    @property
    def violated(self) -> bool:
        return self.status is AuditStatus.VIOLATED

    @property
    def blocking(self) -> bool:
        return self.required and self.violated


@dataclass
class AuditReport:
    entries: list[AuditEntry] = field(default_factory=list)

    def __iter__(self) -> Iterator[AuditEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, entry: AuditEntry) -> AuditReport:
        self.entries.append(entry)
        return self

    def extend(self, other: AuditReport) -> AuditReport:
        self.entries.extend(other.entries)
        return self

    def entry(self, name: str) -> AuditEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def status(self) -> AuditStatus:
        """Worst status over the required entries."""
        required = [e.status for e in self.entries if e.required] or [AuditStatus.VERIFIED]
        return max(required, key=_RANK.__getitem__)

    @property
    def margin(self) -> float:
        return min((e.margin for e in self.entries), default=0.0)

    @property
    def passed(self) -> bool:
        return not any(e.blocking for e in self.entries)

    def failures(self) -> list[AuditEntry]:
        return [e for e in self.entries if e.blocking]
