"""Shared fixtures: closed-form instances and an isolated home directory."""

from __future__ import annotations

import numpy as np
import pytest

from mvhvi.cli.gallery import build_contact_rod, equality_case, kink_multiplier, scalar_lcp
from mvhvi.core.problem import ProblemInstance
from mvhvi.solver.config import SolverConfig
from mvhvi.verify.residuals import ProbeSettings


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    """Keep ~/.mvhvi and MVHVI_SEED of the developer machine out of every test."""
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.setenv("USERPROFILE", str(home))
    monkeypatch.delenv("MVHVI_SEED", raising=False)
    monkeypatch.delenv("MVHVI_CONFIG_DIR", raising=False)
    monkeypatch.chdir(tmp_path)
    return home


@pytest.fixture
def kink() -> ProblemInstance:
    """A(u) = 2u, j(x) = |x| - x^2/4, f = 3: solution set {0} x [2, 4]."""
    return kink_multiplier()


@pytest.fixture
def lcp() -> ProblemInstance:
    """2u + lambda = 1: the pair (0, 1)."""
    return scalar_lcp()


@pytest.fixture
def rod() -> ProblemInstance:
    return build_contact_rod(4)


@pytest.fixture
def equality() -> ProblemInstance:
    return equality_case()


@pytest.fixture
def cfg() -> SolverConfig:
    return SolverConfig()


@pytest.fixture
def probes() -> ProbeSettings:
    return ProbeSettings(samples=2000, seed=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
