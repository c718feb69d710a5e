"""Command-line front end.

Subcommands: calibrate, verify, solve, inhomogeneous, converge.  All take a
JSON config (versioned schema) and write machine-readable outputs stamped
with the config hash.  Exit codes: 0 success, 1 verification failure,
2 config error, 3 compatibility failure, 4 circularity failure.
"""

from __future__ import annotations

import csv
import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np

from .fields import make_field
from .group import HeisenbergPoint
from .kernels import KernelContext
from .quadrature import build_boundary_rule, build_volume_rule
from .solver import (CircularityError, CompatibilityError, eval_solution,
                     solve_inhomogeneous, solve_interior_neumann)
from . import verification

CONFIG_SCHEMA = 1

DEFAULT_CONFIG = {
    "schema": CONFIG_SCHEMA,
    "n": 1,
    "boundary": {"n_r": 100, "n_theta": 48, "R": 10.0, "grading": 3.0},
    "volume": {"R_vol": 6.0, "T_vol": 20.0, "resolution": [60, 12, 90]},
    "tolerances": {"tol_compat": 1e-6, "tol_compat_volume": 5e-2},
    "data": {"g": {"name": "angular_mode", "k": 1, "scale": 1.0},
             "f": {"name": "zero"}},
    "points": [[1.0, 0.0, 1.0], [0.0, 0.5, 2.0], [0.3, 0.3, 0.7]],
}


class ConfigError(ValueError):
    pass


def _merge(base, extra):
    out = dict(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def load_config(path):
    if path is None:
        cfg = dict(DEFAULT_CONFIG)
    else:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        if user.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
            raise ConfigError(f"unsupported config schema {user.get('schema')}")
        cfg = _merge(DEFAULT_CONFIG, user)
        # field specs are atomic: a user-supplied spec replaces the default
        # outright rather than inheriting its parameters
        for key, spec in user.get("data", {}).items():
            cfg["data"][key] = dict(spec)
    b = cfg["boundary"]
    if min(b["n_r"], b["n_theta"]) < 4 or b["R"] <= 0 or cfg["n"] < 1:
        raise ConfigError("boundary grid parameters out of range")
    return cfg


def config_hash(cfg) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def _field_from_spec(spec):
    spec = dict(spec)
    try:
        name = spec.pop("name")
        return make_field(name, **spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad field spec: {exc}") from exc


def load_context(path) -> KernelContext:
    try:
        with open(path) as fh:
            d = json.load(fh)
        return KernelContext(n=int(d["n"]), c_fund=float(d["c_fund"]),
                             calibrated=True)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read context: {exc}") from exc


def _rule_from_config(cfg):
    b = cfg["boundary"]
    return build_boundary_rule(cfg["n"], b["n_r"], b["n_theta"], b["R"],
                               b["grading"])


def _points_from(cfg, points_file):
    if points_file is not None:
        rows = []
        with open(points_file) as fh:
            for row in csv.reader(fh):
                if not row or row[0].startswith("#"):
                    continue
                rows.append([float(x) for x in row])
    else:
        rows = cfg["points"]
    n = cfg["n"]
    pts = []
    for row in rows:
        if len(row) != 2 * n + 1:
            raise ConfigError(f"point rows must have {2 * n + 1} entries")
        zeta = np.asarray(row[:n], float) + 1j * np.asarray(row[n:2 * n], float)
        pts.append(HeisenbergPoint(zeta, float(row[-1])))
    return pts


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)


@click.group()
def main():
    """Neumann problem toolkit for the Heisenberg half-space."""


def _cfg_or_exit(config):
    try:
        return load_config(config)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@main.command()
@click.option("--config", type=click.Path(), default=None)
@click.option("--out", type=click.Path(), default=".")
def calibrate(config, out):
    """Calibrate the kernel constant and write a context file."""
    cfg = _cfg_or_exit(config)
    try:
        ctx, diag = verification.calibrate(cfg["n"], return_diagnostics=True)
    except RuntimeError as exc:
        click.echo(f"calibration failed: {exc}", err=True)
        sys.exit(1)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    doc = {"schema": CONFIG_SCHEMA, "n": ctx.n, "c_fund": ctx.c_fund,
           "a0": ctx.a0, "calibrated": True, "diagnostics": diag,
           "config_hash": config_hash(cfg)}
    with open(outdir / "context.json", "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    click.echo(f"context written to {outdir / 'context.json'}")


@main.command()
@click.option("--config", type=click.Path(), default=None)
@click.option("--context", "context_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=".")
@click.option("--checks", default=None,
              help="comma-separated subset of checks to run")
def verify(config, context_path, out, checks):
    """Run the certification suite; nonzero exit on any failed check."""
    cfg = _cfg_or_exit(config)
    try:
        ctx = load_context(context_path)
        wanted = checks.split(",") if checks else None
        results, ok = verification.run_all(ctx, checks=wanted, n=cfg["n"])
    except (ConfigError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    verification.write_report(results, outdir / "report.json",
                              outdir / "report.csv")
    with open(outdir / "report.json") as fh:
        doc = json.load(fh)
    with open(outdir / "report.json", "w") as fh:
        json.dump({"config_hash": config_hash(cfg), "checks": doc}, fh,
                  indent=1)
        fh.write("\n")
    for r in results:
        click.echo(f"{'PASS' if r.passed else 'FAIL'} {r.name}: "
                   f"measured {r.measured:.6g}, expected {r.expected:.6g}")
    sys.exit(0 if ok else 1)


@main.command()
@click.option("--config", type=click.Path(), default=None)
@click.option("--context", "context_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=".")
@click.option("--points", "points_file", type=click.Path(), default=None)
def solve(config, context_path, out, points_file):
    """Interior Neumann solve for the configured boundary data."""
    cfg = _cfg_or_exit(config)
    try:
        ctx = load_context(context_path)
        g = _field_from_spec(cfg["data"]["g"])
        rule = _rule_from_config(cfg)
        pts = _points_from(cfg, points_file)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    try:
        phi, report = solve_interior_neumann(
            ctx, g, rule, tol_compat=cfg["tolerances"]["tol_compat"])
    except CompatibilityError as exc:
        click.echo(f"compatibility failure: {exc}", err=True)
        sys.exit(3)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(outdir / "density.csv",
               ["re_zeta", "im_zeta", "weight", "phi"],
               [[repr(float(z.real)), repr(float(z.imag)), repr(float(w)),
                 repr(float(p))]
                for z, w, p in zip(rule.zeta[:, 0], rule.weights, phi.values)])
    with open(outdir / "solve_report.json", "w") as fh:
        fh.write(json.dumps({"config_hash": config_hash(cfg),
                             "report": json.loads(report.to_json())},
                            indent=1))
        fh.write("\n")
    rows = []
    for p in pts:
        u = eval_solution(ctx, phi, rule, p)
        rows.append([repr(float(p.zeta[0].real)), repr(float(p.zeta[0].imag)),
                     repr(float(p.t)), repr(u)])
    _write_csv(outdir / "solution.csv", ["re_zeta", "im_zeta", "t", "u"], rows)
    click.echo(f"solved; artifacts in {outdir}")


@main.command()
@click.option("--config", type=click.Path(), default=None)
@click.option("--context", "context_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=".")
@click.option("--points", "points_file", type=click.Path(), default=None)
def inhomogeneous(config, context_path, out, points_file):
    """Inhomogeneous solve via the reflection-kernel representation."""
    cfg = _cfg_or_exit(config)
    try:
        ctx = load_context(context_path)
        f = _field_from_spec(cfg["data"]["f"])
        g = _field_from_spec(cfg["data"]["g"])
        rule = _rule_from_config(cfg)
        v = cfg["volume"]
        vol = build_volume_rule(cfg["n"], v["R_vol"], v["T_vol"],
                                tuple(v["resolution"]))
        pts = _points_from(cfg, points_file)
    except (ConfigError, NotImplementedError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    try:
        u = solve_inhomogeneous(
            ctx, f, g, rule, vol, pts,
            tol_compat=cfg["tolerances"]["tol_compat_volume"])
    except CircularityError as exc:
        click.echo(f"circularity failure: {exc}", err=True)
        sys.exit(4)
    except CompatibilityError as exc:
        click.echo(f"compatibility failure: {exc}", err=True)
        sys.exit(3)
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = [[repr(float(p.zeta[0].real)), repr(float(p.zeta[0].imag)),
             repr(float(p.t)), repr(float(ui))] for p, ui in zip(pts, u)]
    _write_csv(outdir / "solution.csv", ["re_zeta", "im_zeta", "t", "u"], rows)
    click.echo(f"representation values written to {outdir / 'solution.csv'}")


@main.command()
@click.option("--config", type=click.Path(), default=None)
@click.option("--context", "context_path", type=click.Path(), required=True)
@click.option("--out", type=click.Path(), default=".")
def converge(config, context_path, out):
    """Flux-error convergence table over the configured grid sweep."""
    cfg = _cfg_or_exit(config)
    try:
        ctx = load_context(context_path)
        sweep = cfg.get("sweep", {"grids": [[48, 32, 8.0], [96, 48, 16.0],
                                            [192, 64, 32.0]]})
        grids = sweep["grids"]
    except (ConfigError, KeyError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    beta0 = HeisenbergPoint(np.zeros(cfg["n"], dtype=complex), 1.0)
    rows = []
    errs, hs = [], []
    for n_r, n_theta, R in grids:
        rule = build_boundary_rule(cfg["n"], int(n_r), int(n_theta), float(R))
        flux = verification.boundary_flux(ctx, rule, beta0)
        err = abs(flux + 2.0)
        rows.append([int(n_r), int(n_theta), float(R), repr(flux), repr(err)])
        errs.append(err)
        hs.append(1.0 / float(R))
    if len(errs) >= 2 and all(e > 0 for e in errs):
        fit = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        rows.append(["fit", "", "", "", repr(float(fit))])
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(outdir / "convergence.csv",
               ["n_r", "n_theta", "R", "flux", "abs_error"], rows)
    click.echo(f"convergence table written to {outdir / 'convergence.csv'}")


if __name__ == "__main__":
    main()
