"""Residual certification, the grid oracle, solution-map probes and special cases."""

from __future__ import annotations

import numpy as np
import pytest

from mvhvi.cli.gallery import random_instance, scalar_lcp
from mvhvi.core.errors import BudgetExceeded, DimensionLimit, HypothesisGate, VerificationAnomaly
from mvhvi.core.operators import HForm, HFunctionSpec
from mvhvi.core.problem import SolutionPair
from mvhvi.verify.equivalence import equivalence_check
from mvhvi.verify.landscape import violation_landscape, write_landscape
from mvhvi.verify.oracle import brute_force_oracle, oracle_tolerance
from mvhvi.verify.probes import (
    boundedness_probe,
    convexity_probe,
    stability_bound,
    stability_check,
    usc_probe,
)
from mvhvi.verify.residuals import (
    Formulation,
    ProbeSettings,
    all_residuals,
    residual,
    residual_report,
)
from mvhvi.verify.special_cases import SpecialCase, lcp_active_set, special_case_crosscheck

U0 = np.zeros(1)


class TestResiduals:
    @pytest.mark.parametrize("lam", [2.0, 3.0, 4.0])
    def test_kink_solutions_certify(self, kink, probes, lam):
        report = residual_report(kink, U0, np.array([lam]), probes)
        assert report.certified(1e-8), report.as_dict()

    def test_minty_part_is_strictly_negative_off_u(self, kink, probes):
        # <3 - 2v - 3, v> + 1.5 v^2 - J0(v; v) = -|v|
        res = residual(kink, U0, np.array([3.0]), Formulation.MINTY, probes)
        assert res.violation == 0.0

    def test_off_solution_exact_value(self, kink, probes):
        # g = 1 against j'(1) = 1/2 on a probe ball of radius 4; rho reaches 2 on R+
        res = all_residuals(kink, np.ones(1), np.zeros(1), probes)
        assert res[Formulation.ORIGINAL].violation == pytest.approx(2.0)
        assert res[Formulation.COMBINED].violation == pytest.approx(4.0)
        assert res[Formulation.MINTY].violation > 0.0

    def test_witness_points(self, kink, probes):
        res = residual(kink, np.ones(1), np.zeros(1), Formulation.ORIGINAL, probes)
        v, rho = res.worst_witness
        assert v.shape == (1,)
        assert rho.shape == (1,)

    def test_lcp_pairs(self, probes):
        assert residual_report(scalar_lcp(1.0), U0, np.ones(1), probes).worst <= 1e-12
        report = residual_report(scalar_lcp(-1.0), -0.5 * np.ones(1), np.zeros(1), probes)
        assert report.worst <= 1e-12

    def test_sampling_recorded(self, kink):
        report = residual_report(kink, U0, np.array([3.0]), ProbeSettings(samples=50, seed=7))
        assert report.sampling.directions == 50
        assert report.sampling.seed == 7

    def test_unrefined_never_exceeds_refined(self, kink):
        u, lam = np.array([0.3]), np.array([1.0])
        raw = residual_report(kink, u, lam, ProbeSettings(500, refine=False))
        exact = residual_report(kink, u, lam, ProbeSettings(500))
        assert raw.r_original <= exact.r_original + 1e-12

    def test_probe_settings_validate(self):
        with pytest.raises(ValueError):
            ProbeSettings(samples=0)


class TestEquivalence:
    def test_agree_at_solution(self, kink, probes):
        result = equivalence_check(kink, U0, np.array([3.0]), probes=probes, audit_samples=500)
        assert result
        assert all(v <= 1e-8 for v in result.residuals.values())

    def test_agree_off_solution(self, kink, probes):
        result = equivalence_check(kink, np.ones(1), np.zeros(1), probes=probes, audit_samples=500)
        assert result.agree
        assert all(v > 1e-8 for v in result.residuals.values())

    def test_failed_audit_is_attached(self, kink, probes):
        inst = kink.with_h(HFunctionSpec.power(3.0))
        result = equivalence_check(inst, U0, np.array([3.0]), probes=probes, audit_samples=500)
        assert not result
        assert result.failed_audits[0].name == "H(A)(ii)"


class TestOracle:
    def test_kink_multiplier_interval(self, kink):
        result = brute_force_oracle(kink, r=5.0, s=5.0, delta=0.1, tol=1e-9)
        assert len(result) == 21
        assert np.all(result.U == 0.0)
        assert result.Lam.min() == pytest.approx(2.0)
        assert result.Lam.max() == pytest.approx(4.0)
        assert not result.touches_boundary
        assert result.distance_to(U0, np.array([3.0])) == pytest.approx(0.0)

    def test_empty_result(self, kink):
        result = brute_force_oracle(kink, r=1.0, s=1.0, delta=0.1, tol=1e-9)
        assert result.empty
        assert result.distance_to(U0) == float("inf")

    def test_dimension_cap(self):
        with pytest.raises(DimensionLimit):
            brute_force_oracle(random_instance(0, 3, 2), 1.0, 1.0, 0.5, 1e-9)

    def test_budget(self, kink):
        with pytest.raises(BudgetExceeded):
            brute_force_oracle(kink, 5.0, 5.0, 1e-5, 1e-9)

    def test_delta_positive(self, kink):
        with pytest.raises(ValueError):
            brute_force_oracle(kink, 5.0, 5.0, 0.0, 1e-9)

    def test_default_tolerance_accepts_solver_pair(self, lcp):
        tol = oracle_tolerance(lcp, 2.0, 2.0, 0.05)
        assert tol > 0.0
        result = brute_force_oracle(lcp, 2.0, 2.0, 0.05, tol)
        assert result.distance_to(U0, np.ones(1)) <= 0.05


class TestProbes:
    def test_stability_attains_bound(self, equality):
        f1, f2 = np.array([1.0, 1.0]), np.array([2.0, 0.0])
        result = stability_check(equality, f1, f2)
        assert result.passed
        assert result.lhs == pytest.approx(result.rhs, rel=1e-8)

    def test_stability_on_kink(self, kink, rng):
        for _ in range(3):
            f1, f2 = 4.0 * rng.standard_normal(1), 4.0 * rng.standard_normal(1)
            assert stability_check(kink, f1, f2).passed

    def test_stability_bound_exponent(self, equality):
        inst = equality.with_h(HFunctionSpec.power(2.0, tau=3.0))
        assert stability_bound(inst, np.array([8.0, 0.0]), np.zeros(2)) == pytest.approx(2.0)

    def test_stability_needs_power_h(self, kink):
        with pytest.raises(HypothesisGate):
            stability_check(kink.with_h(HFunctionSpec.zero()), np.ones(1), np.zeros(1))

    def test_convexity_on_multiplier_segment(self, kink, probes):
        sol1 = SolutionPair(U0, np.array([2.0]))
        sol2 = SolutionPair(U0, np.array([4.0]))
        assert convexity_probe(kink, sol1, sol2, probes=probes) <= 1e-8

    def test_convexity_refuses_non_solutions(self, kink, probes):
        stray = SolutionPair(np.ones(1), np.zeros(1))
        with pytest.raises(VerificationAnomaly, match="sol2"):
            convexity_probe(kink, SolutionPair(U0, np.array([3.0])), stray, probes=probes)

    def test_convexity_needs_convex_h(self, kink):
        h = HFunctionSpec(HForm.POWER, c_h=1.0, tau=2.0, convex=False)
        pair = SolutionPair(U0, np.array([3.0]))
        with pytest.raises(HypothesisGate):
            convexity_probe(kink.with_h(h), pair, pair)

    def test_boundedness_on_lcp(self, lcp):
        report = boundedness_probe(lcp, f_ball_radius=2.0, samples=3, seed=1)
        assert report.failures == 0
        assert len(report.solutions) == 5
        assert report.bounds_hold
        assert report.sup_u == pytest.approx(1.0, abs=1e-8)
        assert report.convexity_worst <= 1e-8

    def test_usc_residual_shrinks(self, lcp):
        report = usc_probe(lcp, steps=4)
        assert report.perturbations == [0.5, 0.25, 0.125, 0.0625]
        assert len(report.multipliers) == 4
        assert report.residuals[-1] < report.residuals[0]
        assert report.passed

    def test_usc_distance_to_oracle_set(self, kink):
        oracle = brute_force_oracle(kink, 5.0, 5.0, 0.1, 1e-9)
        report = usc_probe(kink, steps=3, oracle=oracle)
        assert len(report.set_distances) == 3
        assert report.set_distances[-1] <= 0.1


class TestSpecialCases:
    def test_scalar_lcp_is_mixed_vi(self, lcp):
        report = special_case_crosscheck(lcp)
        assert report.case is SpecialCase.MIXED_VI
        assert report.passed()
        assert report.reference_lam.tolist() == pytest.approx([1.0])

    def test_kink_without_constraint_is_pure_hvi(self, kink):
        report = special_case_crosscheck(kink.with_b(np.zeros((1, 1))))
        assert report.case is SpecialCase.PURE_HVI
        assert report.passed()
        assert report.solver_u[0] == pytest.approx(4.0 / 3.0, abs=1e-8)

    def test_neither_case(self, kink):
        with pytest.raises(HypothesisGate):
            special_case_crosscheck(kink)

    def test_active_set(self):
        u, lam = lcp_active_set(np.eye(2), np.eye(2), np.array([1.0, -1.0]))
        assert np.allclose(u, [0.0, -1.0])
        assert np.allclose(lam, [1.0, 0.0])

    def test_active_set_cap(self):
        with pytest.raises(DimensionLimit):
            lcp_active_set(np.eye(9), np.eye(9), np.ones(9))


class TestLandscape:
    def test_one_dimensional_rows(self, kink):
        text = violation_landscape(kink, U0, np.array([3.0]), points_per_axis=11)
        lines = text.splitlines()
        assert lines[0].startswith("# formulation=original")
        assert lines[1] == "# v violation"
        assert len(lines) == 13
        # v = -2 is the edge of the probe ball 2(|u| + 1)
        assert lines[2] == "-2 -2"

    def test_two_dimensional_scanlines(self, equality):
        text = violation_landscape(equality, np.array([0.5, 0.5]), np.zeros(1), points_per_axis=5)
        lines = text.splitlines()
        assert len(lines) == 2 + 5 * 6
        assert lines[7] == ""
        assert len(lines[2].split()) == 3

    def test_dimension_cap(self, rod):
        with pytest.raises(DimensionLimit):
            violation_landscape(rod, np.zeros(3), np.zeros(1))

    def test_write(self, kink, tmp_path):
        target = tmp_path / "plots" / "v.dat"
        path = write_landscape(target, kink, U0, np.array([3.0]), Formulation.MINTY, 7)
        assert path.read_text(encoding="utf-8").splitlines()[0].startswith("# formulation=minty")
