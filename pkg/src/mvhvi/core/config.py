"""Configuration management with fluent builder interface."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from mvhvi.core.errors import ParseError
from mvhvi.utils.fluent import FluentBuilder
from mvhvi.utils.paths import expand_path, get_config_file

SEED_ENV = "MVHVI_SEED"


@dataclass
class SolverSettings:
    """Defaults for the saddle iteration."""

    tol_u: float = 1e-10
    tol_outer: float = 1e-10
    max_outer: int = 20000
    max_inner: int = 5000
    restarts: int = 20
    kink_capture: float = 1e-10
    workers: int = 1


@dataclass
class VerifySettings:
    """Defaults for residual certification and probes."""

    probes: int = 10000
    refine: bool = True
    certify_tol: float = 1e-8


@dataclass
class LoggingConfig:
    """Logging configuration."""

    file: Optional[Path] = None
    level: str = "INFO"


@dataclass
class ConfigData:
    """Complete configuration data structure."""

    seed: int = 0
    output_dir: Path = field(default_factory=lambda: Path("mvhvi-out"))
    solver: SolverSettings = field(default_factory=SolverSettings)
    verify: VerifySettings = field(default_factory=VerifySettings)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


class Config(FluentBuilder["Config"]):
    """
    Fluent configuration builder for mvhvi.

    Example:
        config = (
            Config()
            .tolerance(tol_u=1e-10, tol_outer=1e-10)
            .restarts(20)
            .probes(10000, refine=True)
            .seed(7)
            .save()
        )
    """

    def __init__(self, config_path: Optional[Path] = None) -> None:
        super().__init__()
        self._config_path = config_path or get_config_file()
        self._data = ConfigData()
        self._load_existing()

    def _load_existing(self) -> None:
        """Load existing config if present."""
        if self._config_path.exists():
            try:
                with open(self._config_path, encoding="utf-8") as f:
                    data = json.load(f)
                self._from_dict(data)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ParseError(f"invalid config file {self._config_path}: {e}") from None

    def _from_dict(self, data: dict[str, Any]) -> None:
        """Populate config from dictionary (for loading from JSON)."""
        self._data.seed = int(data.get("seed", 0))
        if "output_dir" in data:
            self._data.output_dir = Path(data["output_dir"]).expanduser()

        if "solver" in data:
            s = data["solver"]
            defaults = SolverSettings()
            self._data.solver = SolverSettings(
                tol_u=float(s.get("tol_u", defaults.tol_u)),
                tol_outer=float(s.get("tol_outer", defaults.tol_outer)),
                max_outer=int(s.get("max_outer", defaults.max_outer)),
                max_inner=int(s.get("max_inner", defaults.max_inner)),
                restarts=int(s.get("restarts", defaults.restarts)),
                kink_capture=float(s.get("kink_capture", defaults.kink_capture)),
                workers=int(s.get("workers", defaults.workers)),
            )

        if "verify" in data:
            v = data["verify"]
            defaults_v = VerifySettings()
            self._data.verify = VerifySettings(
                probes=int(v.get("probes", defaults_v.probes)),
                refine=bool(v.get("refine", defaults_v.refine)),
                certify_tol=float(v.get("certify_tol", defaults_v.certify_tol)),
            )

        if "logging" in data:
            log = data["logging"]
            file = log.get("file")
            self._data.logging.file = expand_path(file) if file else None
            self._data.logging.level = log.get("level", "INFO")

    def _to_dict(self) -> dict[str, Any]:
        """Convert config to dictionary for JSON serialization."""
        s, v = self._data.solver, self._data.verify
        return {
            "seed": self._data.seed,
            "output_dir": str(self._data.output_dir),
            "solver": {
                "tol_u": s.tol_u,
                "tol_outer": s.tol_outer,
                "max_outer": s.max_outer,
                "max_inner": s.max_inner,
                "restarts": s.restarts,
                "kink_capture": s.kink_capture,
                "workers": s.workers,
            },
            "verify": {
                "probes": v.probes,
                "refine": v.refine,
                "certify_tol": v.certify_tol,
            },
            "logging": {
                "file": str(self._data.logging.file) if self._data.logging.file else None,
                "level": self._data.logging.level,
            },
        }

    # Fluent builder methods

    def tolerance(
        self, tol_u: Optional[float] = None, tol_outer: Optional[float] = None
    ) -> Config:
        """Set inner and outer stopping tolerances."""
        self._check_not_built()
        if tol_u is not None:
            self._data.solver.tol_u = tol_u
        if tol_outer is not None:
            self._data.solver.tol_outer = tol_outer
        return self

    def max_iterations(
        self, outer: Optional[int] = None, inner: Optional[int] = None
    ) -> Config:
        """Set the iteration caps of the outer and inner loops."""
        self._check_not_built()
        if outer is not None:
            self._data.solver.max_outer = outer
        if inner is not None:
            self._data.solver.max_inner = inner
        return self

    def restarts(self, count: int) -> Config:
        """Set the number of multi-start solves."""
        self._check_not_built()
        self._data.solver.restarts = count
        return self

    def workers(self, count: int) -> Config:
        """Set the thread count for multi-start and suite runs."""
        self._check_not_built()
        self._data.solver.workers = count
        return self

    def kink_capture(self, radius: float) -> Config:
        """Set the relative distance under which a point counts as sitting on a kink."""
        self._check_not_built()
        self._data.solver.kink_capture = radius
        return self

    def probes(self, count: int, refine: bool = True) -> Config:
        """Set the residual probe count and whether to refine the worst probe."""
        self._check_not_built()
        self._data.verify.probes = count
        self._data.verify.refine = refine
        return self

    def certify_tol(self, tol: float) -> Config:
        """Set the residual level below which a pair counts as certified."""
        self._check_not_built()
        self._data.verify.certify_tol = tol
        return self

    def seed(self, value: int) -> Config:
        """Set the default seed for every stochastic probe."""
        self._check_not_built()
        self._data.seed = value
        return self

    def output_dir(self, path: str) -> Config:
        """Set the directory reports are written to."""
        self._check_not_built()
        self._data.output_dir = Path(path).expanduser()
        return self

    def log_file(self, path: str) -> Config:
        """Set the log file path."""
        self._check_not_built()
        self._data.logging.file = expand_path(path)
        return self

    def log_level(self, level: str) -> Config:
        """Set the log level."""
        self._check_not_built()
        self._data.logging.level = level.upper()
        return self

    def save(self) -> Config:
        """Save configuration to file."""
        self._config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self._config_path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self._to_dict(), f, indent=2)
            f.write("\n")
        return self

    def build(self) -> ConfigData:
        """Build and return the configuration data."""
        self._mark_built()
        return self._data

    @property
    def data(self) -> ConfigData:
        """Get the configuration data without marking as built."""
        return self._data

    @property
    def path(self) -> Path:
        return self._config_path

    def __repr__(self) -> str:
        return f"Config(path={self._config_path}, seed={self._data.seed})"


def load_config(config_path: Optional[Path] = None) -> Config:
    """Load configuration from file."""
    return Config(config_path)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation depends on. The seed fixes every probe."""

    command: str
    instance: Optional[str]
    output_dir: Path
    seed: int
    tol: Optional[float] = None
    format: str = "human"


def resolve_seed(
    flag: Optional[int], data: ConfigData, environ: Mapping[str, str] = os.environ
) -> int:
    """Seed precedence: flag, then MVHVI_SEED, then the config file."""
    if flag is not None:
        return flag
    raw = environ.get(SEED_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
    return data.seed


def resolve_run_config(
    command: str,
    data: ConfigData,
    instance: Optional[str] = None,
    seed: Optional[int] = None,
    output_dir: Optional[str] = None,
    tol: Optional[float] = None,
    fmt: Optional[str] = None,
    environ: Mapping[str, str] = os.environ,
) -> RunConfig:
    """Merge CLI flags over the environment and the config file."""
    return RunConfig(
        command=command,
        instance=instance,
        output_dir=Path(output_dir).expanduser() if output_dir else data.output_dir,
        seed=resolve_seed(seed, data, environ),
        tol=tol,
        format=fmt or "human",
    )
