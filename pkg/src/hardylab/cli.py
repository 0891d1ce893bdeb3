"""Command line surface: exponent tables, solver runs, verification suites.

Conventions shared by all subcommands:
  - config files are flat TOML (strings, numbers, booleans, arrays);
    command-line flags override file values;
  - output directory: --out flag, else HARDY_OUT_DIR, else ./out;
  - CSV output uses '.' decimal, 17 significant digits, mandatory header;
  - exit codes: 0 pass, 1 suite failure, 2 usage/config error,
    3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .core import HardyParams, exponents
from .grid import build_mesh, differentiate, from_callable, lebesgue_weight
from .norms import lp_norm
from .operator import (DirichletProblem, OperatorKind, dirac_oracle,
                       solve_dirac, solve_dual)
from .suites import SUITES, SuiteConfig

EXIT_PASS = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _out_dir(args) -> str:
    out = args.out or os.environ.get("HARDY_OUT_DIR") or "./out"
    os.makedirs(out, exist_ok=True)
    return out


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, columns, rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as err:
        raise UsageError(f"malformed config {path}: {err}")
    if not isinstance(cfg, dict):
        raise UsageError("config must be a flat key/value table")
    return cfg


# ---------------------------------------------------------------------------
# exponents


def cmd_exponents(args) -> int:
    try:
        params = HardyParams(dimension=args.dim, mu=args.mu)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    ex = exponents(params)
    n = params.dimension
    rows = [
        ("tau_plus", ex.tau_plus),
        ("tau_minus", ex.tau_minus),
        ("c_mu", ex.c_mu),
        ("p_star", ex.p_star),
        ("mu0", params.mu0),
        ("three_quarter_mu0", 0.75 * params.mu0),
        ("dual_solvable", params.dual_solvable),
        ("min_p_star_serrin", min(ex.p_star, n / (n - 1.0))),
    ]
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {_fmt(v)}")
    return EXIT_PASS


# ---------------------------------------------------------------------------
# solve


def _poly_profile(mesh, coeffs):
    coeffs = [float(c) for c in coeffs]

    def f(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for j, c in enumerate(coeffs):
            out += c * r ** j
        return out

    return from_callable(mesh, f)


def cmd_solve(args) -> int:
    try:
        cfg = _load_config(args.config)
        for key, val in (("dimension", args.dim), ("mu", args.mu)):
            if val is not None:
                cfg[key] = val
        for key in ("dimension", "mu"):
            if key not in cfg:
                raise UsageError(f"solve config requires '{key}'")
        params = HardyParams(dimension=int(cfg["dimension"]), mu=float(cfg["mu"]))
        r_out = float(cfg.get("r_out", 1.0))
        cells = int(cfg.get("cells", 1024))
        grading = float(cfg.get("grading", 3.0))
        mesh = build_mesh(0.0, r_out, cells, grading=grading)
        kind = args.kind
        if kind == "dirac":
            strength = float(cfg.get("strength", 1.0))
        else:
            f = (_poly_profile(mesh, cfg["f_poly"])
                 if "f_poly" in cfg else None)
            F = (_poly_profile(mesh, cfg["big_f_poly"])
                 if "big_f_poly" in cfg else None)
            if f is None and F is None:
                raise UsageError("dual solve needs f_poly and/or big_f_poly")
            if kind == "dual-regularized":
                if "epsilon" not in cfg:
                    raise UsageError("dual-regularized solve needs 'epsilon'")
                op = OperatorKind.dual_regularized(float(cfg["epsilon"]))
            else:
                op = OperatorKind.dual()
    except (UsageError, ValueError, KeyError, TypeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if kind == "dirac":
            result = solve_dirac(params, mesh, strength=strength)
        else:
            result = solve_dual(DirichletProblem(params=params, mesh=mesh,
                                                 kind=op, f=f, F=F))
    except (ValueError, UsageError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    out = _out_dir(args)
    u = result.u
    du = differentiate(u)
    rows = list(zip(mesh.nodes, u.node_values(), du.node_values(),
                    [result.residual_linf] * len(mesh.nodes)))
    csv_path = os.path.join(out, f"solve_{kind}.csv")
    _write_csv(csv_path, ("r", "u", "du_dr", "residual"), rows)
    sidecar = {
        "version": __version__,
        "kind": kind,
        "dimension": params.dimension,
        "mu": params.mu,
        "r_out": r_out,
        "cells": cells,
        "grading": grading,
        "residual_linf": result.residual_linf,
        "weak_identity_defect": result.weak_identity_defect,
        "l2_norm": lp_norm(u, 2.0, lebesgue_weight(params),
                           lo=float(mesh.nodes[1])),
        "sup_regular_part": float(np.max(np.abs(u.values))),
        "stats": {k: _json_safe(v) for k, v in result.stats.items()},
    }
    _write_atomic(os.path.join(out, f"solve_{kind}.json"),
                  json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    print(f"wrote {csv_path}")
    return EXIT_PASS


def _json_safe(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


# ---------------------------------------------------------------------------
# verify


def _suite_config(cfg: dict, args) -> SuiteConfig:
    known = {f.name for f in fields(SuiteConfig)}
    unknown = set(cfg) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(cfg)
    if args.dim is not None:
        kwargs["dimension"] = args.dim
    if args.mu is not None:
        kwargs["mu"] = args.mu
    if args.seed is not None:
        kwargs["seed"] = args.seed
    for key in ("eps_ladder", "delta_grid", "annulus_scales", "shells"):
        if key in kwargs:
            kwargs[key] = tuple(float(x) for x in kwargs[key])
    try:
        return SuiteConfig(**kwargs)
    except (TypeError, ValueError) as err:
        raise UsageError(f"invalid config: {err}")


def _effective_config_dict(cfg: SuiteConfig) -> dict:
    out = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        out[f.name] = list(v) if isinstance(v, tuple) else v
    return out


def cmd_verify(args) -> int:
    try:
        file_cfg = _load_config(args.config)
        cfg = _suite_config(file_cfg, args)
        names = args.suites or ["all"]
        if names == ["all"] or names == ["ALL"]:
            names = list(SUITES)
        for name in names:
            if name not in SUITES:
                raise UsageError(
                    f"unknown suite {name!r}; known: {', '.join(SUITES)} or 'all'")
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE

    out = _out_dir(args)
    jobs = args.jobs or os.cpu_count() or 1

    def run_one(name):
        t0 = time.perf_counter()
        report = SUITES[name](cfg)
        wall_ms = 1000.0 * (time.perf_counter() - t0)
        return name, report, wall_ms

    t_start = time.perf_counter()
    try:
        if jobs > 1 and len(names) > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run_one, names))
        else:
            results = [run_one(name) for name in names]
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    total_ms = 1000.0 * (time.perf_counter() - t_start)

    # single-writer, deterministic order
    eff = _effective_config_dict(cfg)
    cfg_hash = hashlib.sha256(
        json.dumps(eff, sort_keys=True).encode()).hexdigest()
    suites_manifest = []
    all_pass = True
    for name, report, wall_ms in results:
        csv_name = f"suite_{name}.csv"
        _write_csv(os.path.join(out, csv_name), report.columns, report.rows)
        all_pass = all_pass and report.passed
        suites_manifest.append({
            "name": name,
            "pass": bool(report.passed),
            "csv": csv_name,
            "wall_ms": wall_ms,
            "fitted": {k: _json_safe(v) for k, v in report.fitted},
            "notes": list(report.notes),
        })
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {name} ({wall_ms:.0f} ms)")
    manifest = {
        "version": __version__,
        "config_hash": cfg_hash,
        "config": eff,
        "suites": suites_manifest,
        "pass": bool(all_pass),
        "wall_ms": total_ms,
    }
    _write_atomic(os.path.join(out, "manifest.json"),
                  json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if all_pass else EXIT_SUITE_FAILURE


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardylab",
        description="Radial numerics for the inverse-square Hardy operator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser("exponents", help="print derived constants")
    p_exp.add_argument("--dim", type=int, required=True)
    p_exp.add_argument("--mu", type=float, required=True)
    p_exp.set_defaults(func=cmd_exponents)

    p_solve = sub.add_parser("solve", help="run a single solver")
    p_solve.add_argument("kind", choices=("dual", "dual-regularized", "dirac"))
    p_solve.add_argument("--config", help="TOML config file")
    p_solve.add_argument("--dim", type=int)
    p_solve.add_argument("--mu", type=float)
    p_solve.add_argument("--out")
    p_solve.set_defaults(func=cmd_solve)

    p_ver = sub.add_parser("verify", help="run verification suites")
    p_ver.add_argument("suites", nargs="*",
                       help="suite names, or 'all' (default)")
    p_ver.add_argument("--config", help="TOML config file")
    p_ver.add_argument("--dim", type=int)
    p_ver.add_argument("--mu", type=float)
    p_ver.add_argument("--seed", type=int)
    p_ver.add_argument("--jobs", type=int)
    p_ver.add_argument("--out")
    p_ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
