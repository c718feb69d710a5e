"""Calibration and the certification-check machinery.

The full check suite is exercised by the acceptance tests; here we pin
down calibration behavior, the extrapolation helper, the reporting
formats, and the checks that are cheap enough to rerun in isolation.
"""

import json

import numpy as np
import pytest

from heisenberg_neumann.group import HeisenbergPoint, ScalarField
from heisenberg_neumann.kernels import KernelContext
from heisenberg_neumann.quadrature import build_boundary_rule
from heisenberg_neumann.verification import (CheckResult, _extrapolate,
                                             boundary_flux, calibrate,
                                             check_hypergeometric,
                                             check_neumann_bc, run_all,
                                             write_report)


def test_calibrate_sets_flag_and_positive_constant(ctx):
    assert ctx.calibrated and ctx.n == 1
    assert ctx.c_fund > 0


def test_calibrated_flux_is_minus_two_and_pole_independent(ctx):
    rule = build_boundary_rule(1, 192, 64, 32.0)
    for beta in (HeisenbergPoint(np.zeros(1, dtype=complex), 1.0),
                 HeisenbergPoint(np.zeros(1, dtype=complex), 2.5),
                 HeisenbergPoint(np.array([0.8 + 0j]), 1.5)):
        assert abs(boundary_flux(ctx, rule, beta) - (-2.0)) < 0.02


def test_calibrate_diagnostics_and_drift(ctx):
    ctx2, diag = calibrate(1, return_diagnostics=True)
    assert np.isclose(ctx2.c_fund, ctx.c_fund, rtol=1e-12)
    assert diag["extrapolation_drift"] < 1e-3
    assert np.isclose(diag["calibrated_flux_at_reference"], -2.0, rtol=1e-4)


def test_calibrate_needs_three_rules():
    with pytest.raises(ValueError):
        calibrate(1, rule_sequence=[build_boundary_rule(1, 16, 8, 4.0)])


def test_doubling_the_constant_breaks_the_flux(ctx):
    bad = KernelContext(1, 2.0 * ctx.c_fund, calibrated=True)
    rule = build_boundary_rule(1, 96, 32, 16.0)
    beta = HeisenbergPoint(np.zeros(1, dtype=complex), 1.0)
    assert abs(boundary_flux(bad, rule, beta) - (-2.0)) > 1.5


def test_extrapolate_synthetic_sequences():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    lim, p = _extrapolate(3.0 + 2.0 * h, ratio=2.0)
    assert abs(lim - 3.0) < 1e-12 and abs(p - 1.0) < 1e-10
    lim2, p2 = _extrapolate(1.0 - 5.0 * h ** 2, ratio=2.0)
    assert abs(lim2 - 1.0) < 1e-12 and abs(p2 - 2.0) < 1e-10
    lim3, p3 = _extrapolate(np.full(4, 7.0), ratio=2.0)
    assert lim3 == 7.0 and p3 is None


def test_check_result_make_relative_uses_both_scales():
    # expected 0: the relative error saturates at 1 instead of overflowing
    r = CheckResult.make("x", 1e-9, 0.0, 1e-3, relative=True)
    assert not r.passed and np.isfinite(r.measured)
    r2 = CheckResult.make("y", 1.0 + 1e-9, 1.0, 1e-6, relative=True)
    assert r2.passed


def test_neumann_bc_is_exactly_satisfied(ctx):
    results = check_neumann_bc(ctx)
    assert results and all(r.passed for r in results)
    assert max(r.measured for r in results) < 1e-12


def test_hypergeometric_check_passes():
    results = check_hypergeometric()
    assert all(r.passed for r in results)


def test_run_all_empty_and_unknown(ctx):
    results, ok = run_all(ctx, checks=[])
    assert results == [] and ok
    with pytest.raises(ValueError, match="unknown checks"):
        run_all(ctx, checks=["nope"])


def test_run_all_subset_and_report_files(ctx, tmp_path):
    results, ok = run_all(ctx, checks=["hypergeometric", "neumann_bc"])
    assert ok
    jp, cp = tmp_path / "r.json", tmp_path / "r.csv"
    write_report(results, json_path=jp, csv_path=cp)
    rows = json.loads(jp.read_text())
    assert len(rows) == len(results)
    assert {"name", "measured", "expected", "tolerance", "passed"} <= set(rows[0])
    lines = cp.read_text().strip().splitlines()
    assert lines[0].startswith("name,") and len(lines) == len(results) + 1


def test_green_symmetric_identity_holds(ctx):
    from heisenberg_neumann.quadrature import build_volume_rule
    from heisenberg_neumann.verification import check_green_identities
    g1 = ScalarField(lambda z, t: np.exp(
        -(np.sum(np.abs(z) ** 2, axis=-1) ** 2 + np.asarray(t) ** 2)),
        decay_exponent=np.inf, circular=True)
    g2 = ScalarField(lambda z, t: np.exp(
        -(np.sum(np.abs(z) ** 2, axis=-1) ** 2
          + (np.asarray(t) - 1.0) ** 2) / 4.0),
        decay_exponent=np.inf, circular=True)
    rule = build_boundary_rule(1, 70, 24, 5.0, grading=2.0)
    vol = build_volume_rule(1, 5.0, 7.0, (50, 10, 50))
    results = check_green_identities(ctx, g1, g2, rule, vol)
    sym = next(r for r in results if r.name == "green_symmetric")
    assert sym.passed
