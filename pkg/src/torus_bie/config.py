"""JSON run configurations: schema, loading and translation into library objects."""
import copy
import csv
import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .elliptic import Torus
from .exceptions import ConfigurationError
from .geometry import Hole, random_oscillatory_holes
from .problems import Constant, Expression, GreenSum, Problem, Samples, SingleLayer

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_NUMBERS = {"type": "array", "items": {"type": "number"}}

_HOLE = {
    "type": "object",
    "required": ["kind", "center"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["circle", "trefoil", "oscillatory", "fourier"]},
        "center": _POINT,
        "r": {"type": "number", "exclusiveMinimum": 0},
        "omega": {"type": "integer", "minimum": 1},
        "cos": _NUMBERS,
        "sin": _NUMBERS,
    },
    "allOf": [
        {"if": {"properties": {"kind": {"enum": ["circle", "trefoil"]}}}, "then": {"required": ["r"]}},
        {"if": {"properties": {"kind": {"const": "oscillatory"}}}, "then": {"required": ["r", "omega"]}},
        {"if": {"properties": {"kind": {"const": "fourier"}}}, "then": {"required": ["cos"]}},
    ],
}

_TERM = {
    "type": "object",
    "required": ["type"],
    "properties": {"type": {"enum": ["constant", "single_layer", "green_sum", "expr", "csv"]}},
    "oneOf": [
        {
            "additionalProperties": False,
            "required": ["value"],
            "properties": {"type": {"const": "constant"}, "value": {"type": "number"}},
        },
        {
            "additionalProperties": False,
            "required": ["psi"],
            "properties": {
                "type": {"const": "single_layer"},
                "psi": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "coef": {"type": "number"},
                "n_fine": {"type": "integer", "minimum": 4, "multipleOf": 2},
            },
        },
        {
            "additionalProperties": False,
            "required": ["centers", "coefs"],
            "properties": {
                "type": {"const": "green_sum"},
                "centers": {"type": "array", "items": _POINT},
                "coefs": _NUMBERS,
            },
        },
        {
            "additionalProperties": False,
            "required": ["expr"],
            "properties": {"type": {"const": "expr"}, "expr": {"type": "string"}},
        },
        {
            "additionalProperties": False,
            "required": ["path"],
            "properties": {"type": {"const": "csv"}, "path": {"type": "string"}, "column": {"type": "string"}},
        },
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "torus_bie run configuration",
    "type": "object",
    "required": ["torus", "problem"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "tags": {"type": "array", "items": {"type": "string"}},
        "torus": {
            "type": "object",
            "required": ["tau"],
            "additionalProperties": False,
            "properties": {"tau": _POINT},
        },
        "holes": {"type": "array", "items": _HOLE, "minItems": 1},
        "random_holes": {
            "type": "object",
            "required": ["count", "seed"],
            "additionalProperties": False,
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "r_range": {**_NUMBERS, "minItems": 2, "maxItems": 2},
                "omega_range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                "gap": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "problem": {"enum": ["dirichlet", "neumann", "steklov"]},
        "boundary_data": {
            "type": "object",
            "required": ["terms"],
            "additionalProperties": False,
            "properties": {"terms": {"type": "array", "items": _TERM}},
        },
        "nodes_per_hole": {
            "oneOf": [
                {"type": "integer", "minimum": 4},
                {"type": "array", "items": {"type": "integer", "minimum": 4}, "minItems": 1},
            ]
        },
        "betas": {"type": "array", "items": _POINT},
        "neumann": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "convention": {"enum": ["zero_mean", "pinned"]},
                "pin": {
                    "type": "object",
                    "required": ["point", "value"],
                    "additionalProperties": False,
                    "properties": {"point": _POINT, "value": {"type": "number"}},
                },
            },
        },
        "steklov": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "k_max": {"type": "integer", "minimum": 1},
                "mode": {"type": "integer", "minimum": 1},
                "report_scale": {"type": "number", "exclusiveMinimum": 0},
                "residual_factor": {"type": "integer", "minimum": 1},
                "residuals": {"type": "boolean"},
            },
        },
        "test_contour": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "holes": {"type": "array", "items": _HOLE, "minItems": 1},
                "points": {"type": "integer", "minimum": 1},
                "boundary": {"type": "boolean"},
            },
        },
        "field": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "resolution": {"type": "integer", "minimum": 0},
                "band": {"type": ["number", "null"], "minimum": 0},
            },
        },
        "convergence": {
            "type": "object",
            "required": ["n_values"],
            "additionalProperties": False,
            "properties": {
                "n_values": {"type": "array", "items": {"type": "integer", "minimum": 4}, "minItems": 2},
                "n_ref": {"type": "integer", "minimum": 4},
                "floor": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "expected": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "fluxes": _NUMBERS,
                "abs_fluxes": {
                    "type": "object",
                    "propertyNames": {"pattern": "^[1-9][0-9]*$"},
                    "additionalProperties": {**_NUMBERS, "minItems": 2, "maxItems": 2},
                },
                "eigenvalues": _NUMBERS,
                "sup_error_max": {"type": "number"},
                "residual_max": {"type": "number"},
                "slope_max": {"type": "number"},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "threads": {"type": "integer", "minimum": 1},
        "output": {"type": "string"},
    },
    "oneOf": [{"required": ["holes"]}, {"required": ["random_holes"]}],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _path(parts):
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in parts)


def validate(cfg):
    """Raise ConfigurationError naming the schema path of the first violation."""
    errors = sorted(_VALIDATOR.iter_errors(cfg), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ConfigurationError(f"config error at {_path(err.absolute_path)}: {err.message}")
    if cfg["problem"] in ("dirichlet", "neumann") and "boundary_data" not in cfg:
        raise ConfigurationError(f"config error at $: {cfg['problem']} problems need boundary_data")
    return cfg


def bundled_names():
    root = resources.files(__package__) / "configs"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_text(name):
    return (resources.files(__package__) / "configs" / f"{name}.json").read_text()


def load_config(spec):
    """Load a config from a path or the name of a bundled example; returns (dict, base dir)."""
    path = Path(spec)
    if path.is_file():
        text, base = path.read_text(), path.parent
    elif spec in bundled_names() or spec.removesuffix(".json") in bundled_names():
        text, base = bundled_text(spec.removesuffix(".json")), Path.cwd()
    else:
        raise ConfigurationError(f"config error at $: no such file or bundled config {spec!r}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config error at $: invalid JSON ({exc})") from exc
    return validate(cfg), base


def _complex(p):
    return complex(p[0], p[1])


def hole_from_spec(spec):
    c = _complex(spec["center"])
    kind = spec["kind"]
    if kind == "fourier":
        return Hole.fourier(c, spec["cos"], spec.get("sin", ()))
    if kind == "oscillatory":
        return Hole.oscillatory(c, spec["r"], spec["omega"])
    return Hole(c, kind, {"r": float(spec["r"])})


def hole_to_spec(hole):
    spec = {"kind": hole.kind, "center": [hole.center.real, hole.center.imag]}
    spec.update({k: list(v) if isinstance(v, tuple) else v for k, v in hole.params.items()})
    return spec


def build_torus(cfg):
    return Torus(_complex(cfg["torus"]["tau"]))


def build_holes(cfg, torus):
    if "holes" in cfg:
        return tuple(hole_from_spec(h) for h in cfg["holes"])
    r = cfg["random_holes"]
    kw = {k: tuple(r[k]) for k in ("r_range", "omega_range") if k in r}
    if "gap" in r:
        kw["gap"] = r["gap"]
    return tuple(random_oscillatory_holes(r["count"], r["seed"], torus, **kw))


def _read_csv_column(path, column):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or column not in rows[0]:
        raise ConfigurationError(f"config error at $.boundary_data: CSV {path} has no column {column!r}")
    return tuple(float(r[column]) for r in rows)


def build_terms(cfg, base=Path(".")):
    terms = []
    for t in cfg.get("boundary_data", {}).get("terms", []):
        kind = t["type"]
        if kind == "constant":
            terms.append(Constant(t["value"]))
        elif kind == "single_layer":
            terms.append(SingleLayer(tuple(t["psi"]), t.get("coef", 1.0), t.get("n_fine", 400)))
        elif kind == "green_sum":
            if len(t["centers"]) != len(t["coefs"]):
                raise ConfigurationError("config error at $.boundary_data: centers and coefs differ in length")
            terms.append(GreenSum(tuple(_complex(c) for c in t["centers"]), tuple(t["coefs"])))
        elif kind == "expr":
            terms.append(Expression(t["expr"]))
        else:
            terms.append(Samples(_read_csv_column(base / t["path"], t.get("column", "g"))))
    return tuple(terms)


def build_problem(cfg, base=Path("."), threads=None):
    """A Problem for dirichlet/neumann configs."""
    torus = build_torus(cfg)
    holes = build_holes(cfg, torus)
    neu = cfg.get("neumann", {})
    betas = tuple(_complex(b) for b in cfg["betas"]) if "betas" in cfg else None
    return Problem(
        kind=cfg["problem"],
        holes=holes,
        torus=torus,
        terms=build_terms(cfg, base),
        betas=betas,
        convention=neu.get("convention", "zero_mean"),
        threads=threads or cfg.get("threads", 1),
    )


def pin_of(cfg):
    pin = cfg.get("neumann", {}).get("pin")
    return None if pin is None else (_complex(pin["point"]), pin["value"])


def nodes_of(cfg, override=None):
    n = override if override is not None else cfg.get("nodes_per_hole", 50)
    return n if np.isscalar(n) else list(n)


def with_defaults(cfg):
    out = copy.deepcopy(cfg)
    out.setdefault("nodes_per_hole", 50)
    out.setdefault("threads", 1)
    return out
