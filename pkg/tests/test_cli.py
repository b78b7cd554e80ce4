from __future__ import annotations

import csv
import json
import os
import subprocess
import sys

import pytest

from mbl.cli import main

from conftest import spec_path


def run(*args):
    return main([str(a) for a in args])


def test_moments_and_mops(tmp_path):
    w = spec_path("classical_a3_b1_c1")
    assert run("moments", "--weight", w, "--nmax", 6, "--out", tmp_path) == 0
    m = json.loads((tmp_path / "moments.json").read_text())
    assert len(m["moments"]) == 15
    assert json.loads((tmp_path / "pearson_residuals.json").read_text())
    assert run("mops", "--weight", w, "--nmax", 4, "--out", tmp_path) == 0
    rows = list(csv.DictReader(open(tmp_path / "coefficients.csv")))
    assert len(rows) == 5 and "xi_12" in rows[0] and rows[0]["eta_11"] == "0"


def test_verify_writes_deterministic_report(tmp_path, monkeypatch):
    w = spec_path("scalar_a3_b1")
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("verify", "--weight", w, "--nmax", 4, "--out", a) == 0
    monkeypatch.setenv("MBL_THREADS", "1")
    assert run("verify", "--weight", w, "--nmax", 4, "--out", b) == 0
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
    rep = json.loads((a / "report.json").read_text())
    assert rep["pass"] is True
    assert rep["suites"]["example"]["status"] == "skipped"
    assert rep["suites"]["example"]["skipped"].startswith("hypothesis not met")


def test_verify_suite_selection(tmp_path, capsys):
    w = spec_path("classical_a3_b1_c1")
    assert run("verify", "--weight", w, "--nmax", 4, "--out", tmp_path, "--suite", "dpiv",
               "--suite", "zero_curvature") == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert set(rep["suites"]) == {"dpiv", "zero_curvature"}
    assert rep["suites"]["dpiv"]["status"] == "skipped"
    out = capsys.readouterr().out
    assert "dpiv: skipped (hypothesis not met" in out


def test_include_n0_adds_convention_entries(tmp_path):
    w = spec_path("classical_a3_b1_c1")
    assert run("verify", "--weight", w, "--nmax", 3, "--out", tmp_path, "--suite", "zero_curvature",
               "--include-n0") == 0
    text = (tmp_path / "report.json").read_text()
    assert "convention_entries" in text


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.wspec"
    bad.write_text("dim 1\nalpha 1//2\nbeta 1\nphi[0][0] = 1\n")
    assert run("verify", "--weight", bad, "--out", tmp_path) == 2
    assert "line 2" in capsys.readouterr().err


def test_corrupted_moments_partial_report(tmp_path):
    w = spec_path("scalar_a3_b1")
    mom = tmp_path / "moments.json"
    mom.write_text("{not json")
    assert run("verify", "--weight", w, "--nmax", 3, "--out", tmp_path, "--moments", mom) == 1
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["pass"] is False and "error" in rep


def test_failing_moments_nonzero_exit(tmp_path):
    w = spec_path("scalar_a3_b1")
    assert run("moments", "--weight", w, "--nmax", 8, "--out", tmp_path) == 0
    mom = tmp_path / "moments.json"
    obj = json.loads(mom.read_text())
    obj["moments"][3] = obj["moments"][4]
    mom.write_text(json.dumps(obj))
    assert run("verify", "--weight", w, "--nmax", 2, "--trunc", 2, "--out", tmp_path, "--moments", mom,
               "--suite", "pearson") == 1


def test_plot_exports(tmp_path):
    w = spec_path("scalar_a3_b1")
    assert run("plot", "--weight", w, "--nmax", 3, "--out", tmp_path) == 0
    rows = list(csv.DictReader(open(tmp_path / "trajectories.csv")))
    assert rows[0]["xi_11"] == "-0.333333333333"
    assert (tmp_path / "plot_trajectories.py").exists()
    assert run("plot", "--weight", w, "--nmax", 3, "--out", tmp_path, "--series") == 0
    assert (tmp_path / "trajectories.csv").read_text() == "n\n"


def test_bad_arguments(tmp_path):
    assert run("verify", "--weight", spec_path("scalar_a3_b1"), "--nmax", -1, "--out", tmp_path) == 2


def test_console_script(tmp_path):
    env = dict(os.environ, MBL_THREADS="2")
    r = subprocess.run([sys.executable, "-m", "mbl.cli", "verify", "--weight", str(spec_path("scalar_a3_b1")),
                        "--nmax", "3", "--out", str(tmp_path)], capture_output=True, text=True, env=env)
    assert r.returncode == 0, r.stderr
    assert "scalar: pass" in r.stdout
