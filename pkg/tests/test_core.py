"""Instances, multiplier sets, the loader, configuration and the error taxonomy."""

from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mvhvi.cli.gallery import build_contact_rod, kink_multiplier
from mvhvi.core.config import Config, RunConfig, load_config, resolve_run_config, resolve_seed
from mvhvi.core.errors import (
    BudgetExceeded,
    ConstantGapError,
    DimensionLimit,
    HypothesisError,
    InnerDivergence,
    MvhviError,
    ParseError,
    PropertyViolation,
    ShapeError,
    VerificationAnomaly,
    exit_code_for,
)
from mvhvi.core.lambda_set import LambdaSet, project_Lambda
from mvhvi.core.loader import dump_instance, instance_from_dict, instance_to_dict, load_instance
from mvhvi.core.operators import (
    BilinearFormSpec,
    HFunctionSpec,
    OperatorSpec,
    PowerTerm,
    SpaceDims,
    apply_A,
    eval_b,
)
from mvhvi.core.problem import HypothesisProfile, Provenance
from mvhvi.utils.logging import get_logger, setup_logging

VECTORS = arrays(
    np.float64,
    3,
    elements=st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False),
)


def _minimal_document() -> dict:
    return {
        "dims": {"n": 2, "m": 1, "k": 1},
        "A": {"P": [[2.0, 0.0], [0.0, 3.0]]},
        "gamma": {"G": [[1.0, 0.0]]},
        "b": {"B": [[0.0, 1.0]]},
        "lambda_set": {"variant": "box", "params": {"upper": [2.0]}},
        "f": [1.0, -1.0],
    }


class TestSpaceDims:
    def test_rejects_zero(self):
        with pytest.raises(ShapeError):
            SpaceDims(0, 1, 1)

    def test_rejects_float(self):
        with pytest.raises(ShapeError):
            SpaceDims(2.0, 1, 1)


class TestOperators:
    def test_power_term_adds_componentwise(self):
        A = OperatorSpec(np.eye(2), PowerTerm(4.0, 0.5))
        u = np.array([2.0, -1.0])
        assert np.allclose(apply_A(A, u), u + 0.5 * np.abs(u) ** 2 * u)

    def test_power_exponent_below_two(self):
        with pytest.raises(HypothesisError):
            PowerTerm(1.5, 1.0)

    def test_non_square_operator(self):
        with pytest.raises(ShapeError):
            OperatorSpec(np.ones((2, 3)))

    def test_sym_min_eigenvalue_ignores_skew_part(self):
        A = OperatorSpec(np.array([[2.0, 5.0], [-5.0, 3.0]]))
        assert A.sym_min_eigenvalue == pytest.approx(2.0)

    @given(VECTORS, VECTORS, VECTORS, st.floats(-3, 3))
    @settings(max_examples=200, deadline=None)
    def test_b_is_bilinear(self, v, w, rho, t):
        B = np.array([[1.0, -2.0, 0.5], [0.0, 3.0, 1.0], [2.0, 0.0, -1.0]])
        b = BilinearFormSpec(B)
        lhs = eval_b(b, v + t * w, rho)
        rhs = eval_b(b, v, rho) + t * eval_b(b, w, rho)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-6)
        assert eval_b(b, v, t * rho) == pytest.approx(t * eval_b(b, v, rho), rel=1e-9, abs=1e-6)

    def test_h_power_needs_positive_constant(self):
        with pytest.raises(HypothesisError):
            HFunctionSpec.power(0.0)

    def test_h_power_needs_tau_above_one(self):
        with pytest.raises(HypothesisError):
            HFunctionSpec.power(1.0, tau=1.0)

    def test_h_values(self):
        h = HFunctionSpec.power(2.0, tau=3.0)
        assert h(np.array([3.0, 4.0])) == pytest.approx(250.0)
        assert HFunctionSpec.zero()(np.array([3.0, 4.0])) == 0.0


class TestLambdaSet:
    @given(VECTORS)
    @settings(max_examples=200, deadline=None)
    def test_orthant_projection_idempotent(self, rho):
        L = LambdaSet.orthant(3)
        once = project_Lambda(L, rho)
        assert L.contains(once)
        assert np.array_equal(project_Lambda(L, once), once)

    @given(VECTORS, VECTORS)
    @settings(max_examples=200, deadline=None)
    def test_box_projection_nonexpansive(self, x, y):
        L = LambdaSet.box(np.array([1.0, 2.0, 0.0]))
        px, py = L.project(x), L.project(y)
        assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12
        assert L.contains(px)

    @given(VECTORS)
    @settings(max_examples=100, deadline=None)
    def test_polyhedron_projection_is_nearest(self, x):
        C = np.array([[1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [-1.0, 0.0, 0.0]])
        d = np.array([2.0, 1.0, 0.5])
        L = LambdaSet.polyhedron(C, d)
        p = L.project(x)
        assert L.contains(p, 1e-9)
        # variational characterization: <x - p, z - p> <= 0 for z in Lambda
        for z in L.vertices(10.0):
            assert float((x - p) @ (z - p)) <= 1e-7 * (1.0 + np.linalg.norm(x))

    def test_polyhedron_keeps_feasible_points(self):
        L = LambdaSet.polyhedron(np.array([[1.0, 1.0]]), np.array([1.0]))
        x = np.array([0.25, 0.5])
        assert np.array_equal(L.project(x), x)

    def test_box_must_contain_zero(self):
        with pytest.raises(HypothesisError):
            LambdaSet.box(np.array([1.0, -0.5]))

    def test_polyhedron_must_contain_zero(self):
        with pytest.raises(HypothesisError):
            LambdaSet.polyhedron(np.array([[1.0]]), np.array([-1.0]))

    def test_vertex_enumeration_dimension_cap(self):
        L = LambdaSet.polyhedron(np.ones((1, 9)), np.ones(1))
        with pytest.raises(DimensionLimit):
            L.vertices(1.0)

    def test_project_shape_mismatch(self):
        with pytest.raises(ShapeError):
            project_Lambda(LambdaSet.orthant(2), np.zeros(3))

    def test_retract_scales_into_ball(self):
        L = LambdaSet.orthant(2)
        rho, touched = L.retract(np.array([3.0, 4.0]), 1.0)
        assert touched
        assert np.allclose(rho, [0.6, 0.8])

    def test_cone_detection(self):
        assert LambdaSet.orthant(2).is_cone
        assert LambdaSet.box(np.zeros(2)).is_cone
        assert not LambdaSet.box(np.ones(2)).is_cone


class TestProblemInstance:
    def test_shape_mismatch_names_the_field(self, kink):
        with pytest.raises(ShapeError, match="b.B"):
            kink.with_b(np.zeros((1, 2)))

    def test_declared_m_A_flows_into_profile(self, kink):
        assert kink.profile.m_A == pytest.approx(2.0)

    def test_estimated_marks_provenance(self):
        prof = HypothesisProfile().estimated("alpha_J", 0.5, 100)
        assert prof.alpha_J == 0.5
        assert prof.provenance_of("alpha_J") is Provenance.ESTIMATED
        assert prof.provenance_of("beta_J") is Provenance.DECLARED
        assert prof.samples["alpha_J"] == 100

    def test_negative_constant_rejected(self):
        with pytest.raises(HypothesisError):
            HypothesisProfile(beta_J=0.0)


class TestLoader:
    def test_gallery_instance_survives_dump_and_load(self, tmp_path):
        inst = build_contact_rod(5)
        path = dump_instance(inst, tmp_path / "rod.json")
        loaded = load_instance(path)

        assert loaded.name == inst.name
        assert np.array_equal(loaded.A.linear_part, inst.A.linear_part)
        assert np.array_equal(loaded.B, inst.B)
        assert np.array_equal(loaded.f, inst.f)
        assert loaded.h.c_h == pytest.approx(inst.h.c_h)
        assert loaded.profile.beta_J == pytest.approx(inst.profile.beta_J)
        x = np.linspace(-3.0, 3.0, 13)[:, None]
        assert np.allclose(loaded.J.value_batch(x), inst.J.value_batch(x))
        assert json.loads(path.read_text())["name"] == inst.name

    def test_missing_J_means_zero(self):
        inst = instance_from_dict(_minimal_document())
        assert inst.J.is_zero
        assert inst.Lambda.upper.tolist() == [2.0]

    def test_dict_round_trip_is_stable(self):
        data = instance_to_dict(kink_multiplier())
        assert instance_to_dict(instance_from_dict(data)) == data

    def test_unknown_top_level_key(self):
        doc = _minimal_document()
        doc["extra"] = 1
        with pytest.raises(ParseError, match="extra"):
            instance_from_dict(doc)

    def test_missing_required_key(self):
        doc = _minimal_document()
        del doc["f"]
        with pytest.raises(ParseError):
            instance_from_dict(doc)

    def test_unknown_lambda_variant(self):
        doc = _minimal_document()
        doc["lambda_set"] = {"variant": "sphere"}
        with pytest.raises(ParseError):
            instance_from_dict(doc)

    def test_shape_disagreement(self):
        doc = _minimal_document()
        doc["f"] = [1.0]
        with pytest.raises(ShapeError):
            instance_from_dict(doc)

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_instance(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="not found"):
            load_instance(tmp_path / "absent.json")

    def test_power_h_needs_c_h(self):
        doc = _minimal_document()
        doc["h"] = {"form": "power"}
        with pytest.raises(ParseError):
            instance_from_dict(doc)


class TestConfig:
    def test_defaults_without_file(self, tmp_path):
        data = load_config(tmp_path / "none.json").data
        assert data.solver.tol_outer == 1e-10
        assert data.verify.certify_tol == 1e-8
        assert data.seed == 0

    def test_fluent_save_and_reload(self, tmp_path):
        path = tmp_path / "config.json"
        (
            Config(path)
            .tolerance(tol_u=1e-12)
            .restarts(7)
            .probes(500, refine=False)
            .seed(11)
            .log_level("debug")
            .save()
        )
        data = load_config(path).data
        assert data.solver.tol_u == 1e-12
        assert data.solver.restarts == 7
        assert data.verify.probes == 500
        assert data.verify.refine is False
        assert data.seed == 11
        assert data.logging.level == "DEBUG"

    def test_builder_is_single_use(self, tmp_path):
        config = Config(tmp_path / "config.json")
        config.build()
        with pytest.raises(RuntimeError):
            config.seed(3)

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"solver": {"max_outer": "many"}}')
        with pytest.raises(ParseError):
            load_config(path)

    def test_default_location_is_home(self, isolated_home):
        Config().seed(5).save()
        assert (isolated_home / ".mvhvi" / "config.json").exists()
        assert load_config().data.seed == 5

    def test_config_dir_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MVHVI_CONFIG_DIR", str(tmp_path / "alt"))
        Config().seed(8).save()
        assert (tmp_path / "alt" / "config.json").exists()
        assert load_config().data.seed == 8

    def test_seed_precedence(self):
        data = load_config().data
        assert resolve_seed(3, data, {"MVHVI_SEED": "9"}) == 3
        assert resolve_seed(None, data, {"MVHVI_SEED": "9"}) == 9
        assert resolve_seed(None, data, {}) == data.seed

    def test_bad_seed_variable(self):
        with pytest.raises(ParseError):
            resolve_seed(None, load_config().data, {"MVHVI_SEED": "abc"})

    def test_run_config_merges_flags(self, tmp_path):
        run = resolve_run_config(
            "solve", load_config().data, "kink-multiplier", None, str(tmp_path), 1e-6, "csv", {}
        )
        assert isinstance(run, RunConfig)
        assert run.output_dir == tmp_path
        assert run.tol == 1e-6
        assert run.format == "csv"


class TestErrors:
    @pytest.mark.parametrize(
        ("exc", "code"),
        [
            (ParseError("x"), 1),
            (ShapeError("x"), 1),
            (BudgetExceeded("x"), 1),
            (ConstantGapError("x"), 2),
            (InnerDivergence("x", 1.0, True), 3),
            (VerificationAnomaly("x"), 4),
            (PropertyViolation("max-formula", {"sample": 0}, 7), 4),
            (RuntimeError("x"), 1),
        ],
    )
    def test_exit_codes(self, exc, code):
        assert exit_code_for(exc) == code

    def test_shape_error_is_value_error(self):
        assert issubclass(ShapeError, ValueError)
        assert issubclass(ShapeError, MvhviError)

    def test_property_violation_carries_witness(self):
        err = PropertyViolation("subadditivity", {"sample": 4}, seed=12)
        assert err.witness == {"sample": 4}
        assert "seed=12" in str(err)


class TestLogging:
    def test_setup_replaces_handlers(self, tmp_path):
        log_file = tmp_path / "logs" / "mvhvi.log"
        setup_logging(log_file, "debug")
        logger = setup_logging(log_file, "DEBUG")
        assert len(logger.handlers) == 2
        get_logger("mvhvi.solver").debug("inner sweep")
        for handler in logger.handlers:
            handler.flush()
        assert "DEBUG mvhvi.solver: inner sweep" in log_file.read_text(encoding="utf-8")
        setup_logging(None, "WARNING")

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            setup_logging(None, "LOUD")
