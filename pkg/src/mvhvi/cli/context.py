"""Per-invocation state shared by the command handlers."""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from mvhvi.core.config import ConfigData, RunConfig, load_config, resolve_run_config
from mvhvi.core.problem import ProblemInstance
from mvhvi.solver.config import SolverConfig
from mvhvi.utils.csvio import write_csv
from mvhvi.utils.logging import get_logger
from mvhvi.utils.paths import ensure_dir
from mvhvi.verify.residuals import ProbeSettings

logger = get_logger(__name__)

AUDIT_SAMPLES = 2000


@dataclass(frozen=True)
class CommandContext:
    data: ConfigData
    run: RunConfig

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> CommandContext:
        config_path = Path(args.config).expanduser() if getattr(args, "config", None) else None
        data = load_config(config_path).data
        run = resolve_run_config(
            command=args.command,
            data=data,
            instance=getattr(args, "instance", None),
            seed=getattr(args, "seed", None),
            output_dir=getattr(args, "out", None),
            tol=getattr(args, "tol", None),
            fmt=getattr(args, "format", None),
        )
        return cls(data, run)

    @property
    def seed(self) -> int:
        return self.run.seed

    @property
    def csv(self) -> bool:
        return self.run.format == "csv"

    @property
    def certify_tol(self) -> float:
        return self.run.tol if self.run.tol is not None else self.data.verify.certify_tol

    def instance(self) -> ProblemInstance:
        from mvhvi.cli.gallery import resolve_instance

        if not self.run.instance:
            raise ValueError("--instance is required")
        return resolve_instance(self.run.instance)

    def audited_instance(self, samples: int = AUDIT_SAMPLES) -> ProblemInstance:
        """
        The instance after a full hypothesis audit: declared constants the
        audit contradicts come back Estimated, each with a logged warning.
        """
        from mvhvi.hypotheses.audit import audit_instance

        inst = self.instance()
        report, audited = audit_instance(inst, samples, self.seed, self.data.solver.kink_capture)
        demoted = [
            name
            for name, source in audited.profile.provenance.items()
            if source is not inst.profile.provenance_of(name)
        ]
        logger.info(
            f"audit of '{inst.name or self.run.instance}': {report.status.value}"
            + (f", re-estimated {', '.join(demoted)}" if demoted else "")
        )
        return audited

    def solver_config(self, **overrides: Any) -> SolverConfig:
        """Config-file defaults with the non-None overrides applied."""
        given = {k: v for k, v in overrides.items() if v is not None}
        return SolverConfig.from_settings(self.data.solver, **given)

    def probe_settings(self, samples: Optional[int] = None) -> ProbeSettings:
        return ProbeSettings(
            samples=samples or self.data.verify.probes,
            seed=self.seed,
            refine=self.data.verify.refine,
            capture=self.data.solver.kink_capture,
        )

    def write(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Write a report CSV into the output directory."""
        ensure_dir(self.run.output_dir)
        return write_csv(self.run.output_dir / name, header, rows)
