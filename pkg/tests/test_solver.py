"""Uzawa solves on closed-form instances, the inner inclusion and multi-start."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from mvhvi.cli.gallery import (
    build_contact_rod,
    kink_kernel,
    kink_multiplier,
    random_instance,
    scalar_lcp,
)
from mvhvi.core.config import SolverSettings
from mvhvi.core.errors import HypothesisError, OuterNonConvergence, ScheduleExhausted
from mvhvi.core.lambda_set import LambdaSet
from mvhvi.core.operators import (
    BilinearFormSpec,
    GammaSpec,
    HFunctionSpec,
    OperatorSpec,
    SpaceDims,
)
from mvhvi.core.problem import ProblemInstance
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec
from mvhvi.solver import multistart
from mvhvi.solver.complementarity import complementarity_residual
from mvhvi.solver.config import SolverConfig, default_schedule, default_steps, monotonicity_modulus
from mvhvi.solver.inner import distance_to_image, inclusion_residual, inner_solve_u, polish
from mvhvi.solver.multistart import (
    UniquenessStatus,
    multi_start,
    pairwise_spread,
    schedule_index_for,
)
from mvhvi.solver.uzawa import TRACE_HEADER, Termination, solve


def _two_kinks(f: list[float]) -> ProblemInstance:
    """A = 2I with the kernel |x| - x^2/4 on both coordinates of u."""
    return ProblemInstance(
        dims=SpaceDims(2, 1, 2),
        A=OperatorSpec(2.0 * np.eye(2), declared_m_A=2.0),
        J=PiecewiseC1Spec.uniform(kink_kernel(), 2),
        gamma=GammaSpec(np.eye(2)),
        b=BilinearFormSpec(np.array([[1.0, 0.0]])),
        Lambda=LambdaSet.orthant(1),
        f=np.array(f),
    )


class TestSolverConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.radii_schedule[0] == (1.0, 1.0)
        assert cfg.radii_schedule[-1] == (2.0**20, 2.0**20)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"outer_step": 0.0},
            {"tol_u": 0.0},
            {"max_inner": 0},
            {"kink_capture": -1.0},
            {"radii_schedule": ()},
            {"radii_schedule": ((2.0, 2.0), (1.0, 3.0))},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_from_settings(self):
        cfg = SolverConfig.from_settings(SolverSettings(tol_u=1e-12, restarts=3), gate=False)
        assert cfg.tol_u == 1e-12
        assert cfg.restarts == 3
        assert cfg.gate is False

    def test_starting_at(self):
        cfg = SolverConfig(radii_schedule=default_schedule(3)).starting_at(2)
        assert cfg.radii_schedule == ((4.0, 4.0), (8.0, 8.0))

    def test_steps_on_kink(self, kink):
        assert monotonicity_modulus(kink) == pytest.approx(1.5)
        t, eta = default_steps(kink, 1.0)
        # t = min(alpha_b^2/(2c), c/|B|^2) with c = 1.5
        assert t == pytest.approx(1.0 / 3.0)
        assert eta > 0.0


class TestInner:
    def test_distance_single_free_coordinate(self):
        G = np.array([[1.0, 0.0]])
        dist, xi = distance_to_image(G, np.array([3.0, 4.0]), np.array([-1.0]), np.array([1.0]))
        assert xi.tolist() == [1.0]
        assert dist == pytest.approx(np.hypot(2.0, 4.0))

    def test_distance_bounded_least_squares(self):
        G = np.eye(2)
        dist, xi = distance_to_image(G, np.array([0.5, 2.0]), -np.ones(2), np.ones(2))
        assert np.allclose(xi, [0.5, 1.0])
        assert dist == pytest.approx(1.0)

    def test_residual_zero_at_kink(self, kink):
        # 3 - 0 - 3 = 0 lies in [-1, 1]
        assert inclusion_residual(kink, np.zeros(1), np.array([3.0])) == 0.0

    def test_residual_off_solution(self, kink):
        # g = 3 - 2 - 0 = 1, j'(1) = 1/2
        assert inclusion_residual(kink, np.ones(1), np.zeros(1)) == pytest.approx(0.5)

    def test_inner_solve_smooth_branch(self, kink, cfg):
        # lambda = 0: 3 - 2u = 1 - u/2 gives u = 4/3
        u = inner_solve_u(kink, np.zeros(1), np.zeros(1), cfg)
        assert u[0] == pytest.approx(4.0 / 3.0, abs=1e-9)

    def test_inner_solve_sticks_at_kink(self, kink, cfg):
        u = inner_solve_u(kink, np.array([3.0]), np.array([0.7]), cfg)
        assert abs(u[0]) <= 1e-9

    def test_capture_window_snaps_onto_kink(self, kink, cfg):
        # lambda just below 2 puts the smooth-branch root inside the capture window
        lam = np.array([2.0 - 1e-10])
        u = inner_solve_u(kink, lam, np.array([8.7e-11]), cfg)
        assert abs(u[0]) <= 1e-15
        assert complementarity_residual(kink, u, lam) <= cfg.tol_outer

    def test_snap_leaves_distant_points(self, kink, cfg):
        lam = np.array([2.0 - 1e-3])
        u = inner_solve_u(kink, lam, np.zeros(1), cfg)
        assert u[0] == pytest.approx(1e-3 / 1.5, rel=1e-8)

    @pytest.mark.parametrize(
        "f, start, expected",
        [
            ([3.0, 0.2], [0.3, -0.4], [4.0 / 3.0, 0.0]),
            ([0.5, -0.3], [0.2, 0.1], [0.0, 0.0]),
            ([-3.0, 3.0], [0.1, -0.1], [-4.0 / 3.0, 4.0 / 3.0]),
        ],
    )
    def test_active_set_polish(self, f, start, expected):
        inst = _two_kinks(f)
        u = polish(inst, np.array(start), inst.f, 0.0, 0.0, 1e-12)
        assert np.allclose(u, expected, atol=1e-12)
        assert inclusion_residual(inst, u, np.zeros(1)) <= 1e-12

    def test_inner_solve_pins_two_kinks(self, cfg):
        inst = _two_kinks([0.5, -0.3])
        u = inner_solve_u(inst, np.zeros(1), np.array([2.0, -2.0]), cfg)
        assert np.all(np.abs(u) <= 1e-12)


class TestSolve:
    def test_kink_multiplier_set(self, kink):
        pair, trace = solve(kink)
        assert abs(pair.u[0]) <= 1e-8
        assert 2.0 - 1e-6 <= pair.lam[0] <= 4.0
        assert trace.termination is Termination.CONVERGED
        assert pair.residuals is not None

    def test_kink_inactive_constraint(self):
        pair, _ = solve(kink_multiplier(f=-2.0))
        assert pair.u[0] == pytest.approx(-2.0 / 3.0, abs=1e-8)
        assert pair.lam[0] == pytest.approx(0.0, abs=1e-8)

    @pytest.mark.parametrize("f, u, lam", [(1.0, 0.0, 1.0), (-1.0, -0.5, 0.0)])
    def test_scalar_lcp(self, f, u, lam):
        pair, _ = solve(scalar_lcp(f))
        assert pair.u[0] == pytest.approx(u, abs=1e-8)
        assert pair.lam[0] == pytest.approx(lam, abs=1e-8)
        assert pair.residuals.certified(1e-8)

    def test_rod_is_complementary(self, rod):
        pair, _ = solve(rod, certify=False)
        assert complementarity_residual(rod, pair.u, pair.lam) <= 1e-9
        assert inclusion_residual(rod, pair.u, pair.lam, 1e-10) <= 1e-8

    def test_random_instance_with_box(self):
        inst = random_instance(seed=3, n=3, m=2, box=True)
        pair, _ = solve(inst)
        assert inst.Lambda.contains(pair.lam, tol=1e-12)
        assert pair.residuals.worst <= 1e-6

    def test_start_inside_multiplier_set_stays(self, kink):
        cfg = SolverConfig(radii_schedule=((8.0, 8.0), (16.0, 16.0)))
        pair, trace = solve(kink, cfg, u0=np.zeros(1), lam0=np.array([3.0]), certify=False)
        assert pair.u[0] == 0.0
        assert pair.lam[0] == pytest.approx(3.0)
        assert trace.iterations == 1

    @pytest.mark.parametrize("nodes", [2, 4, 10])
    def test_active_contact_converges(self, nodes):
        inst = build_contact_rod(nodes)
        pair, trace = solve(inst, certify=False)
        assert trace.termination is Termination.CONVERGED
        assert complementarity_residual(inst, pair.u, pair.lam) <= 1e-10
        assert inclusion_residual(inst, pair.u, pair.lam, 1e-10) <= 1e-8

    @pytest.mark.parametrize("name", ["kink", "rod"])
    def test_restart_from_final_ball(self, name, request):
        inst = request.getfixturevalue(name)
        first, trace = solve(inst, certify=False)
        cfg = SolverConfig().starting_at(trace.schedule_index)
        second, _ = solve(inst, cfg, certify=False)
        assert np.allclose(second.u, first.u, atol=1e-8)

    @pytest.mark.parametrize("f", [1.0, -1.0])
    def test_polyhedral_orthant_matches_orthant(self, f):
        inst = scalar_lcp(f)
        cone = dataclasses.replace(inst, Lambda=LambdaSet.polyhedron(-np.eye(1), np.zeros(1)))
        expected, _ = solve(inst)
        pair, _ = solve(cone)
        assert pair.u == pytest.approx(expected.u, abs=1e-8)
        assert pair.lam == pytest.approx(expected.lam, abs=1e-8)
        assert pair.residuals.certified(1e-8)

    def test_polyhedral_rod(self, rod):
        cone = dataclasses.replace(rod, Lambda=LambdaSet.polyhedron(-np.eye(1), np.zeros(1)))
        expected, _ = solve(rod, certify=False)
        pair, _ = solve(cone, certify=False)
        assert np.allclose(pair.u, expected.u, atol=1e-8)

    def test_trace_csv(self, kink, tmp_path):
        _, trace = solve(kink, certify=False)
        text = trace.to_csv()
        assert text.splitlines()[0] == ",".join(TRACE_HEADER)
        assert len(text.splitlines()) == trace.iterations + 1
        path = trace.write(tmp_path / "trace.csv")
        assert path.read_text(encoding="utf-8") == text

    def test_outer_cap(self, kink):
        with pytest.raises(OuterNonConvergence):
            solve(kink, SolverConfig(max_outer=1))

    def test_schedule_exhausted(self, kink):
        cfg = SolverConfig(radii_schedule=((0.1, 0.1), (0.2, 0.2)))
        with pytest.raises(ScheduleExhausted) as info:
            solve(kink, cfg)
        assert info.value.exit_code == 3

    def test_gate_rejects_oversized_h(self, kink):
        with pytest.raises(HypothesisError):
            solve(kink.with_h(HFunctionSpec.power(3.0)))

    def test_ungated_solve_skips_audit(self, kink):
        pair, _ = solve(kink.with_h(HFunctionSpec.power(3.0)), SolverConfig(gate=False))
        assert abs(pair.u[0]) <= 1e-8


class TestMultiStart:
    def test_pairwise_spread(self):
        assert pairwise_spread(np.array([[0.0], [3.0], [1.0]])) == 3.0
        assert pairwise_spread(np.zeros((1, 2))) == 0.0

    def test_start_picks_enclosing_ball(self):
        cfg = SolverConfig(radii_schedule=default_schedule(4))
        assert schedule_index_for(cfg, np.array([0.5]), np.array([0.5])) == 0
        assert schedule_index_for(cfg, np.array([3.0]), np.array([0.5])) == 2
        assert schedule_index_for(cfg, np.array([1e6]), np.zeros(1)) == 4

    def test_kink_u_unique_lambda_not(self, kink):
        report = multi_start(kink, SolverConfig(restarts=20), seed=0)
        assert report.status is UniquenessStatus.CONSISTENT
        assert report.u_spread <= 1e-9
        assert report.lambda_spread > 0.0
        assert report.failures == 0
        for pair in report.solutions:
            assert 2.0 - 1e-6 <= pair.lam[0] <= 4.0 + 1e-6

    def test_zero_h_is_not_applicable(self, lcp):
        report = multi_start(lcp.with_h(HFunctionSpec.zero()), SolverConfig(restarts=3))
        assert report.status is UniquenessStatus.NOT_APPLICABLE

    def test_failed_restart_makes_report_incomplete(self, lcp, monkeypatch):
        calls = []
        real_solve = multistart.solve

        def second_run_stalls(*args, **kwargs):
            calls.append(None)
            if len(calls) == 2:
                raise OuterNonConvergence("stalled")
            return real_solve(*args, **kwargs)

        monkeypatch.setattr(multistart, "solve", second_run_stalls)
        report = multi_start(lcp, SolverConfig(restarts=3))
        assert report.failures == 1
        assert len(report.solutions) == 2
        assert report.status is UniquenessStatus.INCOMPLETE
        assert not report.consistent

    def test_multi_kink_random_instance(self):
        report = multi_start(random_instance(1000, 2, 2, 4), SolverConfig(restarts=5))
        assert report.failures == 0
        assert report.status is UniquenessStatus.CONSISTENT

    def test_threads_agree_with_serial(self, lcp):
        serial = multi_start(lcp, SolverConfig(restarts=4), seed=2)
        threaded = multi_start(lcp, SolverConfig(restarts=4, workers=2), seed=2)
        assert np.allclose([p.u for p in serial.solutions], [p.u for p in threaded.solutions])
