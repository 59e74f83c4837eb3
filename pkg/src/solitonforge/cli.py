"""``solitonforge`` command line.

    solitonforge <verify|ode|family|invariance> --config CONFIG.json [--out PATH]

Exit codes: 0 pass, 1 mathematical failure (residual above tolerance,
singular start, non-invariant or degenerate field), 2 usage/config error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import config as cfgmod
from .closed_forms import OdeFamily, WarpedSolitonSpec
from .config import ConfigError
from .fields import NonFiniteError, sample_box
from .invariance import Verdict, detect_from_samples, detect_translation_invariance
from .ode_reduction import (
    OdeParams,
    OdeState,
    check_trajectory,
    integrate_m1,
    integrate_reduced,
)
from .soliton_core import F_MIN, SingularPointError, verify_on_grid, verify_points

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class MathFailure(Exception):
    """Computation could not proceed for mathematical reasons (exit 1)."""


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits; non-finite floats become null."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def _spec_dict(spec) -> dict:
    return {"n": spec.n, "m": spec.m, "rho": spec.rho, "lambda_F": spec.lambda_F}


def cmd_verify(cfg: dict, out) -> int:
    grid = cfgmod.build_grid(cfg["grid"])
    tol = cfg.get("tol", 1e-9)
    if "family" in cfg:
        bundle = cfgmod.build_family(cfg["family"], grid.dimension)
        if isinstance(bundle, OdeFamily):
            raise ConfigError("verify needs a grid with at least 2 axes")
        f, h, spec = bundle.f, bundle.h, bundle.spec
        label = bundle.family
        if cfg.get("mode", "analytic") == "fd":
            f, h = f.as_fd(), h.as_fd()
    else:
        fl = cfg["fields"]
        try:
            spec = WarpedSolitonSpec(fl["n"], fl["m"], fl["rho"], fl["lambda_f"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        f = cfgmod.expression_field(fl["f"], fl["n"])
        h = cfgmod.expression_field(fl["h"], fl["n"])
        label = "fields"
    if "lambda_f" in cfg:
        spec = spec.with_lambda(cfg["lambda_f"])
    if grid.dimension != spec.n:
        raise ConfigError(f"grid has {grid.dimension} axes but n={spec.n}")

    try:
        report = verify_on_grid(spec, f, h, grid, tol)
        payload = {
            "command": "verify",
            "family": label,
            "mode": f.derivative_mode,
            "spec": _spec_dict(spec),
            "classification": spec.soliton_class.value,
            "grid_report": report.to_dict(),
        }
        passed = report.passed
        nrand = cfg.get("random_points", 0)
        if nrand:
            seed = cfg.get("seed", 0)
            rand = verify_points(spec, f, h, sample_box(grid, nrand, seed), tol)
            rd = rand.to_dict()
            rd.pop("grid")
            rd["seed"] = seed
            rd["count"] = nrand
            payload["random_report"] = rd
            passed = passed and rand.passed
    except (ValueError, NonFiniteError) as exc:
        raise MathFailure(str(exc)) from exc
    payload["passed"] = passed
    out.write(dumps(payload) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_ode(cfg: dict, out) -> int:
    system = cfg.get("system", "reduced")
    ini = cfg["init"]
    k = cfg.get("k")
    f0 = ini["f"]
    h1p0 = ini.get("h1p", k * f0 if system == "m1" else 0.0)
    init = OdeState(ini.get("x1", 0.0), f0, ini["fp"], h1p0)
    tol = cfg.get("tol", 1e-6)
    try:
        params = OdeParams(cfg["m"], cfg["rho"], cfg.get("lambda_f", 0.0), k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not init.f > F_MIN:
        raise MathFailure(f"singular start: f={init.f!r} <= f_min")
    try:
        if system == "m1":
            traj = integrate_m1(init, params, cfg["x_end"], cfg["step"], cfg.get("variant", "derived"))
        else:
            traj = integrate_reduced(init, params, cfg["x_end"], cfg["step"])
    except SingularPointError as exc:
        raise MathFailure(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    residual = check_trajectory(traj, params) if len(traj) >= 5 else float("nan")
    passed = residual <= tol
    lines = [
        "# command=ode",
        f"# system={system}",
        f"# m={params.m}",
        f"# rho={fmt(params.rho)}",
        f"# lambda_F={fmt(params.lambda_F)}",
    ]
    if system == "m1":
        lines += [f"# k={fmt(k)}", f"# variant={cfg.get('variant', 'derived')}"]
    lines += [f"# step={fmt(traj.step)}", f"# halt_reason={traj.halt_reason}", "x1,f,fp,h1p"]
    for i in range(len(traj)):
        lines.append(",".join(fmt(v) for v in (traj.x[i], traj.f[i], traj.fp[i], traj.h1p[i])))
    lines.append(f"# max_residual={fmt(residual)}")
    lines.append(f"# tol={fmt(tol)}")
    lines.append(f"# passed={'true' if passed else 'false'}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_family(cfg: dict, out) -> int:
    grid = cfgmod.build_grid(cfg["grid"])
    n_cfg = cfgmod.family_dimension(cfg["family"])
    name = cfg["family"]["name"]
    if name in ("gaussian", "exp_translation") and grid.dimension != n_cfg:
        raise ConfigError(f"grid has {grid.dimension} axes but family n={n_cfg}")
    obj = cfgmod.build_family(cfg["family"], grid.dimension)

    if isinstance(obj, OdeFamily):
        h1 = cfg["family"]["params"].get("h1", 0.0)
        f_at = lambda x: obj.f(x[0])  # noqa: E731
        h_at = lambda x: float(h1)  # noqa: E731
        meta = {"n": 1, "m": obj.m, "rho": obj.rho, "lambda_F": obj.lambda_F}
        cls, positivity = obj.soliton_class.value, obj.positivity
    else:
        f_at, h_at = obj.f, obj.h
        meta = _spec_dict(obj.spec)
        cls, positivity = obj.soliton_class.value, obj.positivity

    lines = [f"# family={name}"]
    lines += [f"# {k}={fmt(v) if isinstance(v, float) else v}" for k, v in meta.items()]
    lines.append(f"# classification={cls}")
    if positivity is not None:
        lines.append(f"# positivity_interval={fmt(positivity[0])},{fmt(positivity[1])}")
    lines.append(f"# f_min={fmt(F_MIN)}")
    cols = [f"x{i + 1}" for i in range(grid.dimension)] + ["f", "h", "skipped"]
    lines.append(",".join(cols))
    try:
        for x in grid.points():
            fv, hv = f_at(x), h_at(x)
            skipped = 0 if fv > F_MIN else 1
            lines.append(",".join([fmt(v) for v in x] + [fmt(fv), fmt(hv), str(skipped)]))
    except (OverflowError, NonFiniteError) as exc:
        raise MathFailure(str(exc)) from exc
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_invariance(cfg: dict, out) -> int:
    src = cfg["field"]
    tol = cfg.get("tol")
    try:
        if "csv" in src:
            path = src["csv"]
            if not os.path.isabs(path):
                path = os.path.join(cfg["_dir"], path)
            axes, values = cfgmod.read_samples(path)
            try:
                fit = detect_from_samples(axes, values, tol if tol is not None else 1e-3)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            source = "samples"
        else:
            if "grid" not in cfg:
                raise ConfigError("'grid' is required unless the field comes from a CSV")
            grid = cfgmod.build_grid(cfg["grid"])
            if "family" in src:
                bundle = cfgmod.build_family(src["family"], grid.dimension)
                if isinstance(bundle, OdeFamily):
                    raise ConfigError("invariance needs a grid with at least 2 axes")
                field = bundle.f
                if cfg.get("mode", "analytic") == "fd":
                    field = field.as_fd()
                source = f"family:{bundle.family}"
            else:
                field = cfgmod.expression_field(src["expr"], src.get("n", grid.dimension))
                source = "expr"
            if field.dimension != grid.dimension:
                raise ConfigError(f"grid has {grid.dimension} axes, field dimension {field.dimension}")
            fit = detect_translation_invariance(field, grid, tol)
    except (OverflowError, NonFiniteError) as exc:
        raise MathFailure(str(exc)) from exc
    fd = source in ("samples", "expr") or cfg.get("mode") == "fd"
    payload = {"command": "invariance", "source": source, "mode": "fd" if fd else "analytic"}
    payload.update(fit.to_dict())
    out.write(dumps(payload) + "\n")
    return EXIT_OK if fit.verdict is Verdict.INVARIANT else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "ode": cmd_ode,
    "family": cmd_family,
    "invariance": cmd_invariance,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="solitonforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "residual check of a soliton bundle on a grid (JSON report)",
        "ode": "integrate the reduced ODE system (CSV trajectory)",
        "family": "sample a closed-form family on a grid (CSV)",
        "invariance": "detect translation invariance of a warping function (JSON)",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", default=None, help="output path (default: stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        cfg = cfgmod.load(args.config, args.command)
        code = COMMANDS[args.command](cfg, buf)
    except ConfigError as exc:
        print(f"solitonforge {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MathFailure as exc:
        print(f"solitonforge {args.command}: failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
