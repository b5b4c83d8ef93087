"""JSON instance files: strict loading and the matching dump."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from mvhvi.core.errors import ParseError
from mvhvi.core.lambda_set import LambdaSet, LambdaVariant
from mvhvi.core.operators import (
    BilinearFormSpec,
    GammaSpec,
    HForm,
    HFunctionSpec,
    OperatorSpec,
    PowerTerm,
    SpaceDims,
)
from mvhvi.core.problem import HypothesisProfile, ProblemInstance
from mvhvi.nonsmooth.piecewise import PiecewiseC1Spec, parse_J
from mvhvi.utils.paths import ensure_parent_exists, expand_path

_REQUIRED_TOP = {"dims", "A", "gamma", "b", "lambda_set", "f"}
_OPTIONAL_TOP = {"name", "J", "h", "profile"}


def _object(data: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(data, dict):
        raise ParseError(f"{where} must be an object, got {type(data).__name__}")
    missing = required - set(data)
    if missing:
        raise ParseError(f"{where} is missing keys: {sorted(missing)}")
    unknown = set(data) - required - set(optional)
    if unknown:
        raise ParseError(f"{where} has unknown keys: {sorted(unknown)}")
    return data


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where} must be a number, got {value!r}")
    return float(value)


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{where} must be an integer, got {value!r}")
    return value


def _matrix(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ParseError(f"{where} must be a row-major array of rows")
    try:
        return np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{where} is not a rectangular numeric array") from None


def _vector(value: Any, where: str) -> np.ndarray:
    if not isinstance(value, list):
        raise ParseError(f"{where} must be an array")
    return np.array([_number(v, where) for v in value], dtype=float)


def _parse_lambda(data: Any, m: int) -> LambdaSet:
    data = _object(data, "lambda_set", {"variant"}, {"params"})
    try:
        variant = LambdaVariant(data["variant"])
    except ValueError:
        raise ParseError(f"unknown lambda_set variant {data['variant']!r}") from None
    params = data.get("params") or {}
    if variant is LambdaVariant.ORTHANT:
        _object(params, "lambda_set.params", set())
        return LambdaSet.orthant(m)
    if variant is LambdaVariant.BOX:
        params = _object(params, "lambda_set.params", {"upper"})
        return LambdaSet.box(_vector(params["upper"], "lambda_set.params.upper"))
    params = _object(params, "lambda_set.params", {"C", "d"})
    return LambdaSet.polyhedron(
        _matrix(params["C"], "lambda_set.params.C"), _vector(params["d"], "lambda_set.params.d")
    )


def _parse_h(data: Any) -> HFunctionSpec:
    data = _object(data, "h", {"form"}, {"c_h", "tau"})
    try:
        form = HForm(data["form"])
    except ValueError:
        raise ParseError(f"unknown h form {data['form']!r}") from None
    if form is HForm.ZERO:
        return HFunctionSpec.zero()
    if "c_h" not in data:
        raise ParseError("power-form h needs c_h")
    return HFunctionSpec.power(
        _number(data["c_h"], "h.c_h"), _number(data.get("tau", 2.0), "h.tau")
    )


def _parse_operator(data: Any) -> OperatorSpec:
    data = _object(data, "A", {"P"}, {"power", "m_A"})
    power = None
    if data.get("power") is not None:
        p = _object(data["power"], "A.power", {"p", "c"})
        power = PowerTerm(_number(p["p"], "A.power.p"), _number(p["c"], "A.power.c"))
    return OperatorSpec(
        _matrix(data["P"], "A.P"),
        power,
        _number(data.get("m_A", 0.0), "A.m_A"),
    )


def _parse_profile(data: Any) -> HypothesisProfile:
    data = _object(data, "profile", set(), {"theta", "alpha_J", "beta_J", "m_J", "alpha_b"})
    values = {key: _number(value, f"profile.{key}") for key, value in data.items()}
    return HypothesisProfile(**values)


def instance_from_dict(data: Any) -> ProblemInstance:
    """Build and validate an instance from the parsed JSON document."""
    data = _object(data, "instance", _REQUIRED_TOP, _OPTIONAL_TOP)
    dims_data = _object(data["dims"], "dims", {"n", "m", "k"})
    dims = SpaceDims(
        _integer(dims_data["n"], "dims.n"),
        _integer(dims_data["m"], "dims.m"),
        _integer(dims_data["k"], "dims.k"),
    )
    J_data = data.get("J")
    J = PiecewiseC1Spec.zero(dims.k_X) if J_data is None else parse_J(J_data)

    gamma = _object(data["gamma"], "gamma", {"G"})
    b = _object(data["b"], "b", {"B"})
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name must be a string")

    return ProblemInstance(
        dims=dims,
        A=_parse_operator(data["A"]),
        J=J,
        gamma=GammaSpec(_matrix(gamma["G"], "gamma.G")),
        b=BilinearFormSpec(_matrix(b["B"], "b.B")),
        Lambda=_parse_lambda(data["lambda_set"], dims.m_E),
        f=_vector(data["f"], "f"),
        h=_parse_h(data["h"]) if "h" in data else HFunctionSpec.zero(),
        profile=_parse_profile(data.get("profile", {})),
        name=name,
    )


def load_instance(path: Union[str, Path]) -> ProblemInstance:
    """Read and validate an instance file."""
    file = expand_path(path)
    try:
        with open(file, encoding="utf-8") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ParseError(f"instance file not found: {file}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{file}: invalid JSON ({e})") from None
    return instance_from_dict(data)


def _lambda_to_dict(L: LambdaSet) -> dict[str, Any]:
    if L.variant is LambdaVariant.ORTHANT:
        return {"variant": L.variant.value, "params": {}}
    if L.variant is LambdaVariant.BOX:
        return {"variant": L.variant.value, "params": {"upper": L.upper.tolist()}}
    return {"variant": L.variant.value, "params": {"C": L.C.tolist(), "d": L.d.tolist()}}


def instance_to_dict(inst: ProblemInstance) -> dict[str, Any]:
    power: Optional[dict[str, float]] = None
    if inst.A.power_term is not None:
        power = {"p": inst.A.power_term.exponent, "c": inst.A.power_term.coefficient}
    h: dict[str, Any] = {"form": inst.h.form.value}
    if inst.h.is_power:
        h.update(c_h=inst.h.c_h, tau=inst.h.tau)
    data: dict[str, Any] = {
        "dims": {"n": inst.n, "m": inst.m, "k": inst.k},
        "A": {"P": inst.A.linear_part.tolist(), "power": power, "m_A": inst.A.declared_m_A},
        "J": inst.J.to_dict(),
        "gamma": {"G": inst.G.tolist()},
        "b": {"B": inst.B.tolist()},
        "lambda_set": _lambda_to_dict(inst.Lambda),
        "f": inst.f.tolist(),
        "h": h,
        "profile": inst.profile.to_dict(),
    }
    if inst.name:
        data = {"name": inst.name, **data}
    return data


def dump_instance(inst: ProblemInstance, path: Union[str, Path]) -> Path:
    """Write the instance in the format load_instance reads."""
    file = ensure_parent_exists(expand_path(path))
    with open(file, "w", encoding="utf-8", newline="\n") as f:
        json.dump(instance_to_dict(inst), f, indent=2)
        f.write("\n")
    return file
