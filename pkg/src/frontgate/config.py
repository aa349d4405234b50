"""JSON run configurations: schemas and builders for library objects."""
from __future__ import annotations

import copy

import jsonschema
import numpy as np

from .errors import ConfigError
from .pde import GradientProfile, Grid1D, InitialDatum, carrying_capacity
from .reaction import (ReactionModel, WolbachiaParams, constant_law, make_cubic,
                       make_wolbachia_f, make_wolbachia_h)

NUM = {"type": "number"}
POS = {"type": "number", "exclusiveMinimum": 0}

WOLBACHIA_FIELDS = {
    "s_f": NUM, "s_h": NUM, "delta": NUM, "d_s": NUM, "d_u": NUM, "sigmaFu": NUM, "eps": NUM,
}

MODEL_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind", "theta"],
         "properties": {"kind": {"const": "cubic"}, "theta": NUM}},
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "wolbachia"}, **WOLBACHIA_FIELDS}},
    ]
}

LAW_SCHEMA = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "constant"}}},
        {"type": "object", "additionalProperties": False, "required": ["kind"],
         "properties": {"kind": {"const": "wolbachia"}, "normalize": {"type": "boolean"},
                        **WOLBACHIA_FIELDS}},
    ]
}

PARAMS_SCHEMA = {"type": "object", "additionalProperties": False,
                 "properties": dict(WOLBACHIA_FIELDS)}

GRADIENT_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["kind"],
    "properties": {
        "kind": {"enum": ["none", "interval_constant", "parabolic", "sampled"]},
        "C": NUM, "L": POS, "sign": {"enum": [1, -1]},
        "x": {"type": "array", "items": NUM}, "eta": {"type": "array", "items": NUM},
    },
}

INIT_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["kind"],
    "properties": {
        "kind": {"enum": ["front", "heaviside", "smooth_front", "box", "propagule", "sampled"]},
        "x0": NUM, "x1": NUM, "width": POS, "alpha": NUM, "center": NUM,
        "x": {"type": "array", "items": NUM}, "v": {"type": "array", "items": NUM},
    },
}

GRID_SCHEMA = {
    "type": "object", "additionalProperties": False,
    "properties": {"x_min": NUM, "x_max": NUM, "dx": POS},
}

CAPACITY_SCHEMA = {
    "type": "object", "additionalProperties": False, "required": ["C", "L"],
    "properties": {"C": NUM, "L": POS, "K_L": POS},
}


def _obj(props: dict, required=()) -> dict:
    return {"type": "object", "additionalProperties": False, "required": list(required),
            "properties": props}


COMMAND_SCHEMAS = {
    "speed": _obj({"model": MODEL_SCHEMA, "tol": POS}, ["model"]),
    "theta-c": _obj({"model": MODEL_SCHEMA, "law": LAW_SCHEMA}, ["model"]),
    "sign-curve": _obj({"params": PARAMS_SCHEMA, "eps_min": NUM, "eps_max": NUM,
                        "steps": {"type": "integer", "minimum": 2}}),
    "barrier": _obj({"model": MODEL_SCHEMA, "C": POS, "L": POS, "dx": POS},
                    ["model", "C", "L"]),
    "lstar-curve": _obj({"model": MODEL_SCHEMA, "C_min": POS, "C_max": POS,
                         "steps": {"type": "integer", "minimum": 1},
                         "spacing": {"enum": ["linear", "log"]}},
                        ["model", "C_min", "C_max", "steps"]),
    "cstar": _obj({"model": MODEL_SCHEMA, "L": POS}, ["model", "L"]),
    "jump": _obj({"model": MODEL_SCHEMA}, ["model"]),
    "propagule": _obj({"model": MODEL_SCHEMA, "law": LAW_SCHEMA, "alpha": NUM,
                       "n_samples": {"type": "integer", "minimum": 16}},
                      ["model", "alpha"]),
    "simulate": _obj({
        "equation": {"enum": ["heterogeneous", "frequency_law", "two_population"]},
        "model": MODEL_SCHEMA, "params": PARAMS_SCHEMA, "law": LAW_SCHEMA,
        "gradient": GRADIENT_SCHEMA, "capacity": CAPACITY_SCHEMA, "init": INIT_SCHEMA,
        "grid": GRID_SCHEMA, "dt": POS, "T": POS, "snapshot_every": POS,
        "probe_x": NUM, "window": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    }, ["init"]),
    "figures": _obj({"recipes": {"type": "array", "items": {"type": "string"}}}),
}


def validate(command: str, config: dict) -> dict:
    if command not in COMMAND_SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        jsonschema.validate(config, COMMAND_SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{command} config invalid at {where}: {exc.message}") from None
    return copy.deepcopy(config)


def wolbachia_params(spec: dict | None) -> WolbachiaParams:
    spec = dict(spec or {})
    spec.pop("kind", None)
    spec.pop("normalize", None)
    if "sigmaFu" in spec:
        spec["sigma_Fu"] = spec.pop("sigmaFu")
    try:
        return WolbachiaParams(**spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_model(spec: dict) -> ReactionModel:
    try:
        if spec["kind"] == "cubic":
            return make_cubic(float(spec["theta"]))
        return make_wolbachia_f(wolbachia_params(spec))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_law(spec: dict | None):
    if not spec or spec["kind"] == "constant":
        return constant_law()
    try:
        law = make_wolbachia_h(wolbachia_params(spec))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return law.normalize() if spec.get("normalize", True) else law


def build_grid(spec: dict | None) -> Grid1D:
    spec = spec or {}
    return Grid1D(float(spec.get("x_min", -20.0)), float(spec.get("x_max", 20.0)),
                  float(spec.get("dx", 0.1)))


def build_gradient(spec: dict | None) -> GradientProfile:
    if not spec or spec["kind"] == "none":
        return GradientProfile.none()
    kind = spec["kind"]
    if kind == "sampled":
        if "x" not in spec or "eta" not in spec or len(spec["x"]) != len(spec["eta"]):
            raise ConfigError("sampled gradient needs equal-length x and eta")
        return GradientProfile.sampled(spec["x"], spec["eta"])
    if "C" not in spec or "L" not in spec:
        raise ConfigError(f"{kind} gradient needs C and L")
    if kind == "interval_constant":
        return GradientProfile.interval_constant(spec["C"], spec["L"])
    return GradientProfile.parabolic(spec["C"], spec["L"], spec.get("sign", 1))


def build_init(spec: dict, model: ReactionModel | None = None, law=None) -> InitialDatum:
    kind = spec["kind"]
    if kind in ("front", "heaviside"):
        return getattr(InitialDatum, kind)(float(spec.get("x0", -14.0)))
    if kind == "smooth_front":
        return InitialDatum.smooth_front(float(spec.get("x0", 0.0)), float(spec.get("width", 1.0)))
    if kind == "box":
        return InitialDatum.box(float(spec.get("x0", -10.0)), float(spec.get("x1", 10.0)))
    if kind == "propagule":
        from .propagule import bubble_profile
        if model is None:
            raise ConfigError("propagule datum needs a scalar model")
        prop = bubble_profile(model, law, float(spec.get("alpha", 0.8)))
        return InitialDatum.from_propagule(prop, float(spec.get("center", 0.0)))
    if "x" not in spec or "v" not in spec or len(spec["x"]) != len(spec["v"]):
        raise ConfigError("sampled datum needs equal-length x and v")
    return InitialDatum.sampled(spec["x"], spec["v"])


def build_capacity(spec: dict, grid: Grid1D) -> np.ndarray:
    return carrying_capacity(grid, float(spec["C"]), float(spec["L"]), float(spec.get("K_L", 1.0)))
