"""JSON run configurations: schema validation and object construction."""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema
import numpy as np

from . import closed_forms as cf
from .fields import GridSpec, ScalarField


class ConfigError(Exception):
    """Malformed or inconsistent configuration (usage error, exit code 2)."""


_num = {"type": "number"}
_int_ge = lambda lo: {"type": "integer", "minimum": lo}  # noqa: E731
_vec = {"type": "array", "items": _num}

GRID = {
    "type": "object",
    "additionalProperties": False,
    "required": ["ranges", "counts"],
    "properties": {
        "ranges": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        },
        "counts": {"type": "array", "minItems": 1, "items": _int_ge(1)},
    },
}

_FAMILY_PARAMS = {
    "gaussian": {
        "required": ["n", "A"],
        "properties": {"n": _int_ge(2), "m": _int_ge(1), "A": _num, "B": _vec, "C": _num},
    },
    "exp_translation": {
        "required": ["n", "a", "a1", "a2"],
        "properties": {
            "n": _int_ge(2), "m": _int_ge(1), "a": _num, "a1": _num, "a2": _num,
            "c": _vec, "b": _num,
        },
    },
}
for _name in ("ode_expanding", "ode_steady", "ode_shrinking"):
    _FAMILY_PARAMS[_name] = {
        "required": ["c1", "c2", "m"] + ([] if _name == "ode_steady" else ["rho"]),
        "properties": {
            "c1": _num, "c2": _num, "m": _int_ge(1), "rho": _num, "n": _int_ge(2),
            "h1": _num, "a": _vec, "b": _vec,
        },
    }

FAMILY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "params"],
    "properties": {"name": {"enum": list(cf.FAMILY_NAMES)}, "params": {"type": "object"}},
    "allOf": [
        {
            "if": {"properties": {"name": {"const": name}}},
            "then": {
                "properties": {
                    "params": dict(schema, type="object", additionalProperties=False)
                }
            },
        }
        for name, schema in _FAMILY_PARAMS.items()
    ],
}

FIELDS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "m", "rho", "lambda_f", "f", "h"],
    "properties": {
        "n": _int_ge(2), "m": _int_ge(1), "rho": _num, "lambda_f": _num,
        "f": {"type": "string"}, "h": {"type": "string"},
    },
}

SCHEMAS = {
    "verify": {
        "type": "object",
        "additionalProperties": False,
        "required": ["command", "grid"],
        "oneOf": [{"required": ["family"]}, {"required": ["fields"]}],
        "properties": {
            "command": {"const": "verify"},
            "family": FAMILY,
            "fields": FIELDS,
            "grid": GRID,
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "mode": {"enum": ["analytic", "fd"]},
            "lambda_f": _num,
            "random_points": _int_ge(0),
            "seed": _int_ge(0),
        },
    },
    "ode": {
        "type": "object",
        "additionalProperties": False,
        "required": ["command", "m", "rho", "init", "x_end", "step"],
        "properties": {
            "command": {"const": "ode"},
            "system": {"enum": ["reduced", "m1"]},
            "m": _int_ge(1),
            "rho": _num,
            "lambda_f": _num,
            "k": _num,
            "variant": {"enum": ["derived", "flipped"]},
            "init": {
                "type": "object",
                "additionalProperties": False,
                "required": ["f", "fp"],
                "properties": {"x1": _num, "f": _num, "fp": _num, "h1p": _num},
            },
            "x_end": _num,
            "step": {"type": "number", "exclusiveMinimum": 0},
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
        "allOf": [
            {
                "if": {"properties": {"system": {"const": "m1"}}, "required": ["system"]},
                "then": {
                    "required": ["k"],
                    "properties": {"m": {"const": 1}, "lambda_f": {"const": 0}},
                },
                "else": {"not": {"anyOf": [{"required": ["variant"]}, {"required": ["k"]}]}},
            }
        ],
    },
    "family": {
        "type": "object",
        "additionalProperties": False,
        "required": ["command", "family", "grid"],
        "properties": {"command": {"const": "family"}, "family": FAMILY, "grid": GRID},
    },
    "invariance": {
        "type": "object",
        "additionalProperties": False,
        "required": ["command", "field"],
        "properties": {
            "command": {"const": "invariance"},
            "field": {
                "type": "object",
                "additionalProperties": False,
                "oneOf": [
                    {"required": ["family"]},
                    {"required": ["expr"]},
                    {"required": ["csv"]},
                ],
                "properties": {
                    "family": FAMILY,
                    "expr": {"type": "string"},
                    "n": _int_ge(2),
                    "csv": {"type": "string"},
                },
            },
            "grid": GRID,
            "mode": {"enum": ["analytic", "fd"]},
            "tol": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}


def load(path, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("command") != command:
        raise ConfigError(f"config 'command' is {cfg.get('command')!r}, expected {command!r}")
    try:
        jsonschema.validate(cfg, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    cfg["_dir"] = str(Path(path).resolve().parent)
    return cfg


def build_grid(spec: dict) -> GridSpec:
    if len(spec["ranges"]) != len(spec["counts"]):
        raise ConfigError("grid 'ranges' and 'counts' must have the same length")
    try:
        return GridSpec(tuple(map(tuple, spec["ranges"])), tuple(spec["counts"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_family(spec: dict, n: int | None = None):
    """Returns a :class:`SolitonBundle`, or an :class:`OdeFamily` if ``n == 1``."""
    name, p = spec["name"], dict(spec["params"])
    try:
        if name == "gaussian":
            return cf.gaussian_bundle(
                cf.GaussianParams(p["A"], p.get("B"), p.get("C", 0.0)), p["n"], p.get("m", 1)
            )
        if name == "exp_translation":
            params = cf.ExpTranslationParams(
                p["a"], p["a1"], p["a2"], p.get("c", [0.0] * p["n"]), p.get("b", 0.0),
                m=p.get("m", 2),
            )
            return cf.family_exp_translation(p["n"], params)
        params = cf.OdeFamilyParams(p["c1"], p["c2"], p["m"], p.get("rho", 0.0))
        build = {
            "ode_expanding": cf.family_ode_expanding,
            "ode_steady": cf.family_ode_steady,
            "ode_shrinking": cf.family_ode_shrinking,
        }[name]
        family = build(params)
        dim = n if n is not None else p.get("n", 2)
        if "n" in p and n is not None and n != 1 and p["n"] != n:
            raise ConfigError(f"family n={p['n']} does not match grid dimension {n}")
        if dim == 1:
            return family
        return family.bundle(dim, p.get("h1", 0.0), p.get("a"), p.get("b"))
    except ValueError as exc:
        raise ConfigError(f"family {name!r}: {exc}") from exc


def family_dimension(spec: dict) -> int | None:
    return spec["params"].get("n")


def expression_field(expr: str, n: int | None = None) -> ScalarField:
    """FD-mode field from an expression in x1..xn ('^' is a power)."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    try:
        parsed = parse_expr(
            expr,
            transformations=standard_transformations + (convert_xor,),
        )
    except Exception as exc:  # sympy raises a zoo of types here
        raise ConfigError(f"cannot parse expression {expr!r}: {exc}") from exc
    names = sorted(str(s) for s in parsed.free_symbols)
    idx = []
    for name in names:
        if not (name.startswith("x") and name[1:].isdigit() and int(name[1:]) >= 1):
            raise ConfigError(f"unknown symbol {name!r} in {expr!r}; use x1..xn")
        idx.append(int(name[1:]))
    dim = n if n is not None else max(idx + [2])
    if idx and max(idx) > dim:
        raise ConfigError(f"expression uses x{max(idx)} but n={dim}")
    symbols = sympy.symbols(" ".join(f"x{i}" for i in range(1, dim + 1)))
    fn = sympy.lambdify(symbols, parsed, modules="math")
    return ScalarField(dim, lambda x: float(fn(*x)), name=expr)


def read_samples(path: str) -> tuple:
    """Load ``x1..xn, f`` columns of a family CSV onto its tensor grid."""
    try:
        with open(path) as fh:
            # names=True would take a leading comment line as the header
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
        data = np.genfromtxt(lines, delimiter=",", names=True)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read samples {path!r}: {exc}") from exc
    if data.dtype.names is None or "f" not in data.dtype.names:
        raise ConfigError("sample CSV needs a header with an 'f' column")
    xcols = [c for c in data.dtype.names if c.startswith("x") and c[1:].isdigit()]
    xcols.sort(key=lambda c: int(c[1:]))
    if not xcols:
        raise ConfigError("sample CSV has no x1..xn columns")
    data = np.atleast_1d(data)
    coords = np.stack([data[c] for c in xcols], axis=-1)
    axes = [np.unique(coords[:, i]) for i in range(len(xcols))]
    shape = tuple(len(a) for a in axes)
    if int(np.prod(shape)) != len(data):
        raise ConfigError("samples do not form a complete tensor grid")
    order = np.lexsort(coords.T[::-1])
    values = np.asarray(data["f"], dtype=float)[order].reshape(shape)
    return axes, values
