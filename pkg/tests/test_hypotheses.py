"""Hypothesis audits, the inf-sup constant and re-profiling of declared constants."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvhvi.cli.gallery import kink_kernel
from mvhvi.core.errors import ConstantGapError
from mvhvi.core.operators import HFunctionSpec
from mvhvi.core.problem import Provenance
from mvhvi.hypotheses.audit import audit_instance
from mvhvi.hypotheses.coercivity import audit_coercivity
from mvhvi.hypotheses.infsup import infsup_constant
from mvhvi.hypotheses.monotonicity import (
    audit_m_A,
    audit_m_J,
    audit_relaxed_monotonicity,
    derive_h_from_constants,
)
from mvhvi.hypotheses.report import AuditStatus
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec


def _steep(kink):
    """Same data with j(x) = |x| - 3x^2/2, whose concavity beats A."""
    return dataclasses.replace(kink, J=PiecewiseC1Spec((kink_kernel(curvature=-3.0),)))


class TestAuditInstance:
    @pytest.mark.parametrize("name", ["kink", "lcp", "rod", "equality"])
    def test_gallery_passes(self, name, request):
        inst = request.getfixturevalue(name)
        report, _ = audit_instance(inst, samples=1000, seed=0)
        assert report.passed, [e.name for e in report.failures()]

    def test_coercivity_is_only_estimated(self, kink):
        report, _ = audit_instance(kink, samples=500)
        assert report.entry("coercivity (combined)").status is AuditStatus.ESTIMATED
        assert report.status is AuditStatus.ESTIMATED

    def test_zero_constraint_operator_violates_infsup(self, kink):
        report, reprofiled = audit_instance(kink.with_b(np.zeros((1, 1))), samples=500)
        entry = report.entry("H(b)")
        assert entry.violated
        assert entry.witness == {"alpha_b": 0.0}
        assert not report.passed
        assert reprofiled.profile.alpha_b == 0.0
        assert reprofiled.profile.provenance_of("alpha_b") is Provenance.ESTIMATED

    def test_understated_m_J_is_replaced(self, kink):
        inst = kink.with_profile(dataclasses.replace(kink.profile, m_J=0.1))
        report, reprofiled = audit_instance(inst, samples=500)
        assert report.entry("m_J").violated
        # informational entry: the audit itself still passes
        assert report.passed
        assert reprofiled.profile.m_J == pytest.approx(0.5)
        assert reprofiled.profile.provenance_of("m_J") is Provenance.ESTIMATED

    def test_overstated_m_A_is_replaced(self, kink):
        inst = kink.with_profile(dataclasses.replace(kink.profile, m_A=5.0))
        report, reprofiled = audit_instance(inst, samples=500)
        assert report.entry("m_A").violated
        assert reprofiled.profile.m_A == pytest.approx(2.0)

    def test_contradicted_growth_is_reestimated(self, kink):
        inst = kink.with_profile(dataclasses.replace(kink.profile, beta_J=0.1))
        report, reprofiled = audit_instance(inst, samples=1000, seed=4)
        entry = report.entry("H(J)(ii)")
        assert entry.violated
        assert entry.seed == 4
        assert entry.witness is not None
        assert reprofiled.profile.beta_J == pytest.approx(0.5, abs=1e-6)
        assert reprofiled.profile.provenance_of("beta_J") is Provenance.ESTIMATED

    def test_zero_h_fails_only_the_optional_item(self, kink):
        report, _ = audit_instance(kink.with_h(HFunctionSpec.zero()), samples=500)
        item = report.entry("H(h)(iii)")
        assert item.violated
        assert not item.blocking
        assert report.passed

    def test_same_seed_same_report(self, rod):
        first, _ = audit_instance(rod, samples=300, seed=9)
        second, _ = audit_instance(rod, samples=300, seed=9)
        assert [(e.name, e.status, e.margin) for e in first] == [
            (e.name, e.status, e.margin) for e in second
        ]


class TestRelaxedMonotonicity:
    def test_holds_with_derived_h(self, kink):
        report = audit_relaxed_monotonicity(kink, samples=2000, seed=0)
        assert report.passed

    def test_oversized_h_has_witness(self, kink):
        report = audit_relaxed_monotonicity(kink.with_h(HFunctionSpec.power(3.0)), 2000, seed=5)
        entry = report.entry("H(A)(ii)")
        assert entry.violated
        assert entry.seed == 5
        assert set(entry.witness) == {"sample", "u", "v"}

    def test_steep_concavity_fails_even_with_zero_h(self, kink):
        inst = _steep(kink).with_h(HFunctionSpec.zero())
        assert not audit_relaxed_monotonicity(inst, 1000, seed=0).passed


class TestCoercivity:
    def test_kink_is_coercive(self, kink):
        report = audit_coercivity(kink)
        combined = report.entry("coercivity (combined)")
        assert combined.status is AuditStatus.ESTIMATED
        assert combined.margin > 0.0
        assert report.entry("coercivity lower bound").status is AuditStatus.ESTIMATED

    def test_literal_route_is_informational(self, kink):
        # <Av, v>/|v|^2 = 2 never exceeds |f| + 1 = 4
        entry = audit_coercivity(kink).entry("H(A)(iii)")
        assert entry.violated
        assert not entry.required

    def test_concave_growth_breaks_coercivity(self, kink):
        entry = audit_coercivity(_steep(kink)).entry("coercivity (combined)")
        assert entry.violated
        assert "radius" in entry.witness

    def test_radii_required(self, kink):
        with pytest.raises(ValueError):
            audit_coercivity(kink, radii=())


class TestInfSup:
    def test_identity_like_trace(self, kink):
        assert infsup_constant(kink.b) == pytest.approx(1.0)

    def test_rank_deficient(self):
        assert infsup_constant(np.array([[1.0, 2.0], [2.0, 4.0]])) == 0.0

    def test_more_multipliers_than_states(self):
        assert infsup_constant(np.ones((2, 1))) == 0.0

    def test_smallest_singular_value(self):
        B = np.array([[3.0, 0.0, 0.0], [0.0, 0.5, 0.0]])
        assert infsup_constant(B) == pytest.approx(0.5)

    @given(st.integers(0, 10_000), st.floats(min_value=0.1, max_value=10.0))
    @settings(max_examples=50, deadline=None)
    def test_scales_linearly(self, seed, c):
        B = np.random.default_rng(seed).standard_normal((2, 3))
        assert infsup_constant(c * B) == pytest.approx(c * infsup_constant(B), rel=1e-9)


class TestConstants:
    def test_derive_h(self):
        h = derive_h_from_constants(2.0, 0.5, 1.0)
        assert h.is_power
        assert h.c_h == pytest.approx(1.5)
        assert h.tau == 2.0

    def test_gap_closed(self):
        with pytest.raises(ConstantGapError):
            derive_h_from_constants(1.0, 0.5, 2.0)

    def test_m_A_exact(self, kink):
        entry = audit_m_A(kink.A, 2.0, samples=500)
        assert not entry.violated
        assert entry.margin == pytest.approx(0.0, abs=1e-12)

    def test_m_J_sampled_witness(self, kink):
        entry = audit_m_J(kink.J, 0.25, samples=500, seed=1)
        assert entry.violated
        assert entry.margin == pytest.approx(-0.25)
        assert entry.witness is not None
