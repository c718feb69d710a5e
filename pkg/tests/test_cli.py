"""Command-line interface: artifacts, determinism, and exit codes."""

import json

import pytest
from click.testing import CliRunner

from heisenberg_neumann.cli import main

SMALL = {
    "schema": 1,
    "boundary": {"n_r": 16, "n_theta": 8, "R": 4.0},
    "volume": {"R_vol": 3.0, "T_vol": 4.0, "resolution": [10, 8, 10]},
}


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def context_file(ctx, tmp_path_factory):
    path = tmp_path_factory.mktemp("ctx") / "context.json"
    path.write_text(json.dumps({"n": ctx.n, "c_fund": ctx.c_fund,
                                "calibrated": True}))
    return str(path)


def _write_cfg(tmp_path, extra=None):
    cfg = dict(SMALL)
    if extra:
        cfg.update(extra)
    p = tmp_path / "config.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_calibrate_is_deterministic(runner, tmp_path):
    outs = []
    for sub in ("a", "b"):
        res = runner.invoke(main, ["calibrate", "--out",
                                   str(tmp_path / sub)])
        assert res.exit_code == 0, res.output
        outs.append((tmp_path / sub / "context.json").read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["calibrated"] and doc["n"] == 1 and "config_hash" in doc


def test_malformed_config_exits_2(runner, tmp_path, context_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res = runner.invoke(main, ["solve", "--config", str(bad),
                               "--context", context_file])
    assert res.exit_code == 2
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps({"schema": 99}))
    res2 = runner.invoke(main, ["verify", "--config", str(bad2),
                                "--context", context_file])
    assert res2.exit_code == 2


def test_verify_subset_passes_and_writes_report(runner, tmp_path,
                                                context_file):
    cfg = _write_cfg(tmp_path)
    res = runner.invoke(main, ["verify", "--config", cfg, "--context",
                               context_file, "--out", str(tmp_path),
                               "--checks", "hypergeometric,neumann_bc"])
    assert res.exit_code == 0, res.output
    assert "PASS hyp2f1_log_oracle" in res.output
    doc = json.loads((tmp_path / "report.json").read_text())
    assert "config_hash" in doc and len(doc["checks"]) >= 4
    assert (tmp_path / "report.csv").exists()


def test_solve_writes_artifacts(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path)
    res = runner.invoke(main, ["solve", "--config", cfg, "--context",
                               context_file, "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    density = (tmp_path / "density.csv").read_text().strip().splitlines()
    assert density[0] == "re_zeta,im_zeta,weight,phi"
    assert len(density) == 16 * 8 + 1
    rep = json.loads((tmp_path / "solve_report.json").read_text())
    assert "report" in rep and "config_hash" in rep
    solution = (tmp_path / "solution.csv").read_text().strip().splitlines()
    assert len(solution) == 3 + 1  # default evaluation points


def test_solve_incompatible_data_exits_3(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path, {"data": {"g": {"name": "gaussian"}}})
    res = runner.invoke(main, ["solve", "--config", cfg, "--context",
                               context_file])
    assert res.exit_code == 3
    assert "compatibility" in res.output


def test_inhomogeneous_noncircular_exits_4(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path, {"data": {"f": {"name": "angular_mode"},
                                         "g": {"name": "zero"}}})
    res = runner.invoke(main, ["inhomogeneous", "--config", cfg,
                               "--context", context_file])
    assert res.exit_code == 4
    assert "circularity" in res.output


def test_inhomogeneous_zero_data_succeeds(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path, {"data": {"f": {"name": "zero"},
                                         "g": {"name": "zero"}}})
    res = runner.invoke(main, ["inhomogeneous", "--config", cfg,
                               "--context", context_file,
                               "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "solution.csv").read_text().strip().splitlines()
    assert lines[0] == "re_zeta,im_zeta,t,u" and len(lines) == 4


def test_converge_table(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path, {"sweep": {"grids": [[24, 16, 4.0],
                                                    [48, 24, 8.0]]}})
    res = runner.invoke(main, ["converge", "--config", cfg, "--context",
                               context_file, "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "convergence.csv").read_text().strip().splitlines()
    assert lines[0] == "n_r,n_theta,R,flux,abs_error"
    assert len(lines) in (3, 4)  # two grids plus an optional order fit


def test_custom_points_file(runner, tmp_path, context_file):
    cfg = _write_cfg(tmp_path)
    pts = tmp_path / "pts.csv"
    pts.write_text("# re, im, t\n0.5,0.0,1.0\n")
    res = runner.invoke(main, ["solve", "--config", cfg, "--context",
                               context_file, "--out", str(tmp_path),
                               "--points", str(pts)])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "solution.csv").read_text().strip().splitlines()
    assert len(lines) == 2
