"""The acceptance battery, check by check at reduced sizes."""

from __future__ import annotations

import dataclasses

import pytest

from mvhvi.cli.battery import (
    CHECKS,
    REDUCED,
    CheckResult,
    _run_check,
    check_bounds,
    check_calculus,
    check_convexity,
    check_equivalence,
    check_infsup,
    check_oracle,
    check_special_cases,
    check_stability,
    check_uniqueness,
    run_battery,
)
from mvhvi.core.errors import HypothesisGate

TINY = dataclasses.replace(
    REDUCED,
    equivalence_instances=2,
    probes=500,
    oracle_instances=1,
    uniqueness_instances=1,
    restarts=3,
    stability_instances=1,
    stability_pairs=2,
    convexity_pairs=2,
    bound_samples=3,
    calculus_samples=200,
    infsup_matrices=10,
)


class TestFastChecks:
    def test_infsup(self):
        passed, detail = check_infsup(REDUCED, 0)
        assert passed, detail

    def test_calculus(self):
        passed, detail = check_calculus(TINY, 0)
        assert passed, detail
        assert "200 samples" in detail

    def test_special_cases(self):
        passed, detail = check_special_cases(REDUCED, 0)
        assert passed, detail

    def test_stability(self):
        passed, detail = check_stability(TINY, 0)
        assert passed, detail
        assert "equality case" in detail


class TestRunCheck:
    def test_failure_maps_to_anomaly(self):
        result = _run_check("always-false", lambda sizes, seed: (False, "nope"), TINY, 0)
        assert result == CheckResult("always-false", False, "nope", result.seconds, 4)

    def test_error_keeps_its_exit_code(self):
        def gated(sizes, seed):
            raise HypothesisGate("h is not a power")

        result = _run_check("gated", gated, TINY, 0)
        assert not result.passed
        assert result.exit_code == 2
        assert "power" in result.detail

    def test_battery_order(self):
        assert [name for name, _ in CHECKS] == [
            "equivalence",
            "oracle",
            "uniqueness",
            "stability",
            "convexity",
            "bounds",
            "calculus",
            "infsup",
            "special-cases",
        ]


@pytest.mark.slow
class TestSlowChecks:
    def test_equivalence(self):
        passed, detail = check_equivalence(TINY, 0)
        assert passed, detail

    def test_oracle(self):
        passed, detail = check_oracle(TINY, 0)
        assert passed, detail

    def test_uniqueness(self):
        passed, detail = check_uniqueness(TINY, 0)
        assert passed, detail

    def test_convexity(self):
        passed, detail = check_convexity(TINY, 0)
        assert passed, detail

    def test_bounds(self):
        passed, detail = check_bounds(TINY, 0)
        assert passed, detail

    def test_reduced_battery(self):
        results = run_battery(full=False, seed=0, workers=2)
        assert [r.name for r in results] == [name for name, _ in CHECKS]
        failed = [(r.name, r.detail) for r in results if not r.passed]
        assert not failed
