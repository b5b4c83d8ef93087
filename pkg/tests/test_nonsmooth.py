"""Piecewise functionals, their Clarke oracles, calculus checks and the growth fit."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvhvi.cli.gallery import kink_kernel
from mvhvi.core.errors import GrowthFitError, HypothesisError, ParseError, PropertyViolation
from mvhvi.nonsmooth.growth import estimate_growth, tail_growth
from mvhvi.nonsmooth.piecewise import (
    CoordinateFunction,
    Piece,
    PiecewiseC1Spec,
    clarke_dir,
    eval_J,
    local_lipschitz,
    subgradient_box,
)
from mvhvi.nonsmooth.properties import check_clarke_calculus

COORD = st.floats(min_value=-20, max_value=20, allow_nan=False, allow_infinity=False)


def _kink(k: int = 1) -> PiecewiseC1Spec:
    return PiecewiseC1Spec.uniform(kink_kernel(), k)


def _zigzag() -> CoordinateFunction:
    """Nonconvex sawtooth-like j with slopes 1, -1, 2 and breakpoints 0, 1."""
    return CoordinateFunction(
        (0.0, 1.0),
        (Piece.affine(a=1.0), Piece.affine(a=-1.0), Piece.affine(a=2.0, b=-3.0)),
    )


class TestEvaluation:
    def test_kink_value(self):
        J = _kink()
        assert eval_J(J, np.array([2.0])) == pytest.approx(2.0 - 1.0)
        assert eval_J(J, np.array([-2.0])) == pytest.approx(1.0)

    def test_separable_sum(self):
        J = PiecewiseC1Spec((kink_kernel(), _zigzag()))
        x = np.array([-1.0, 0.5])
        assert eval_J(J, x) == pytest.approx((1.0 - 0.25) + (-0.5))

    def test_box_at_kink_is_two_sided(self):
        box = subgradient_box(_kink(), np.array([0.0]))
        assert box.lo.tolist() == [-1.0]
        assert box.hi.tolist() == [1.0]

    def test_box_away_from_kink_is_the_derivative(self):
        box = subgradient_box(_kink(), np.array([2.0]))
        assert box.lo[0] == pytest.approx(0.0)
        assert box.hi[0] == pytest.approx(0.0)

    def test_capture_widens_near_kink(self):
        x = np.array([1e-12])
        assert subgradient_box(_kink(), x).lo[0] > 0.0
        assert subgradient_box(_kink(), x, capture=1e-10).lo[0] == pytest.approx(-1.0)

    def test_clarke_dir_is_box_support(self):
        J = _kink()
        assert clarke_dir(J, np.array([0.0]), np.array([2.0])) == pytest.approx(2.0)
        assert clarke_dir(J, np.array([0.0]), np.array([-3.0])) == pytest.approx(3.0)

    def test_downward_jump_is_nonconvex(self):
        x = np.array([1.0])
        J = PiecewiseC1Spec((_zigzag(),))
        # slopes -1 on the left and 2 on the right of x = 1
        assert clarke_dir(J, x, np.array([1.0])) == pytest.approx(2.0)
        assert clarke_dir(J, x, np.array([-1.0])) == pytest.approx(1.0)

    def test_local_lipschitz(self):
        assert local_lipschitz(_kink(), np.array([0.0])) == pytest.approx(1.0, rel=1e-5)
        J = PiecewiseC1Spec((_zigzag(), _zigzag()))
        assert local_lipschitz(J, np.array([1.0, 1.0])) == pytest.approx(np.sqrt(8.0))


class TestParsing:
    def test_discontinuous_function_rejected(self):
        with pytest.raises(HypothesisError):
            CoordinateFunction((0.0,), (Piece.affine(b=0.0), Piece.affine(b=1.0)))

    def test_unsorted_breakpoints(self):
        with pytest.raises(ParseError):
            CoordinateFunction((1.0, 0.0), (Piece.affine(),) * 3)

    def test_piece_count(self):
        with pytest.raises(ParseError):
            CoordinateFunction((0.0,), (Piece.affine(),))

    def test_kink_off_breakpoints(self):
        with pytest.raises(ParseError):
            pieces = (Piece.affine(), Piece.abs_kink(1.0, c=1.0), Piece.affine())
            CoordinateFunction((0.0, 2.0), pieces)

    def test_unknown_piece_key(self):
        with pytest.raises(ParseError):
            Piece.from_dict({"kind": "affine", "q": 1.0, "slope": 2.0})

    def test_dict_round_trip(self):
        c = _zigzag()
        again = CoordinateFunction.from_dict(c.to_dict())
        x = np.linspace(-2.0, 3.0, 11)
        assert np.allclose(again.value(x), c.value(x))


class TestRelaxedMonotonicity:
    def test_concave_curvature(self):
        assert _kink().relaxed_monotonicity_constant == pytest.approx(0.5)

    def test_downward_jump_is_infinite(self):
        assert PiecewiseC1Spec((_zigzag(),)).relaxed_monotonicity_constant == float("inf")

    def test_convex_is_zero(self):
        J = PiecewiseC1Spec.uniform(kink_kernel(curvature=1.0), 2)
        assert J.relaxed_monotonicity_constant == 0.0


class TestClarkeProperties:
    @given(COORD, COORD, st.floats(min_value=0.0, max_value=100.0))
    @settings(max_examples=300, deadline=None)
    def test_positive_homogeneity(self, x, d, t):
        J = PiecewiseC1Spec((_zigzag(),))
        xv, dv = np.array([x]), np.array([d])
        assert clarke_dir(J, xv, t * dv) == pytest.approx(t * clarke_dir(J, xv, dv), abs=1e-9)

    @given(COORD, COORD, COORD, COORD, COORD, COORD)
    @settings(max_examples=300, deadline=None)
    def test_subadditivity(self, x1, x2, d1, d2, e1, e2):
        J = PiecewiseC1Spec((kink_kernel(), _zigzag()))
        x = np.array([x1, x2])
        d, e = np.array([d1, d2]), np.array([e1, e2])
        assert clarke_dir(J, x, d + e) <= clarke_dir(J, x, d) + clarke_dir(J, x, e) + 1e-9

    @given(st.sampled_from([-1.0, 0.0, 1.0]), COORD)
    @settings(max_examples=100, deadline=None)
    def test_max_formula_at_breakpoints(self, x, d):
        J = PiecewiseC1Spec((_zigzag(),))
        box = J.box(np.array([x]))
        best = max(box.lo[0] * d, box.hi[0] * d)
        assert clarke_dir(J, np.array([x]), np.array([d])) == pytest.approx(best)

    def test_check_passes_on_gallery_kernels(self):
        report = check_clarke_calculus(PiecewiseC1Spec((kink_kernel(), _zigzag())), 2000, seed=3)
        assert report.passed
        assert set(report.margins) >= {
            "max-formula",
            "positive-homogeneity",
            "subadditivity",
            "lipschitz-bound",
        }

    def test_corrupted_oracle_is_caught(self):
        J = _kink(2)

        def shifted(X, D):
            return J.clarke_dir_batch(X, D) - 0.1

        with pytest.raises(PropertyViolation) as info:
            check_clarke_calculus(J, 500, seed=0, oracle=shifted)
        assert info.value.prop == "max-formula"
        assert info.value.seed == 0
        assert "x" in info.value.witness

    def test_samples_must_be_positive(self):
        with pytest.raises(ValueError):
            check_clarke_calculus(_kink(), 0, seed=0)


class TestGrowth:
    def test_tail_of_concave_kink(self):
        assert tail_growth(_kink()) == (2, pytest.approx(0.5))

    def test_kink_fit_at_theta_two(self):
        alpha, beta = estimate_growth(_kink(), 2.0, 10.0, 2000, seed=0)
        # J0(v; -v) = v^2/2 - |v| <= beta v^2 needs beta >= 1/2 in the tail
        assert beta == pytest.approx(0.5, abs=1e-6)
        assert alpha == pytest.approx(0.0, abs=1e-9)

    def test_theta_below_tail_fails(self):
        with pytest.raises(GrowthFitError):
            estimate_growth(_kink(), 1.0, 10.0, 500)

    def test_bounded_growth_at_theta_zero(self):
        J = PiecewiseC1Spec((kink_kernel(weight=1.0, curvature=0.0),))
        alpha, beta = estimate_growth(J, 0.0, 5.0, 500)
        # J0(v; -v) = -|v| <= 0
        assert alpha + beta <= 1e-9 + 1e-12

    def test_inward_slope_grows_linearly(self):
        J = PiecewiseC1Spec((_zigzag(),))
        exponent, _ = tail_growth(J)
        assert exponent == 1
        alpha, beta = estimate_growth(J, 1.0, 5.0, 1000)
        assert beta >= 1.0 - 1e-9

    def test_cover_is_tightest_at_the_ball_edge(self):
        # j = -|x|: J0(v; -v) = |v|, covered on |v| <= 4 by 2 + v^2/8 with value 4 at the edge
        J = PiecewiseC1Spec((kink_kernel(weight=-1.0, curvature=0.0),))
        alpha, beta = estimate_growth(J, 2.0, 4.0, 2000, seed=0)
        assert alpha + beta * 16.0 == pytest.approx(4.0, abs=1e-6)
        assert beta == pytest.approx(0.125, abs=1e-3)
        assert alpha == pytest.approx(2.0, abs=2e-2)

    def test_radius_must_be_positive(self):
        with pytest.raises(ValueError):
            estimate_growth(_kink(), 2.0, 0.0, 10)
