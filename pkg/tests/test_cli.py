import os

import numpy as np
import pytest

from cusplab import cli


def run(args):
    return cli.main(args)


def test_unknown_subcommand_exit_64(capsys):
    assert run(["frobnicate"]) == 64
    assert run([]) == 64


def test_invalid_energy_window_exit_2(tmp_path, capsys):
    out = tmp_path / "x.csv"
    code = run(["mode-sweep", "--E", "1.5", "--out", str(out)])
    assert code == 2
    assert not out.exists()  # validation happens before any computation


def test_unknown_profile_exit_2(tmp_path):
    code = run(["curvature", "--profile", "nosuch",
                "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_curvature_csv_schema(tmp_path):
    out = tmp_path / "curv.csv"
    assert run(["curvature", "--out", str(out), "--points", "5"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "r,K_analytic,K_oracle,abs_err"
    assert len(lines) == 6


def test_bessel_check_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run(["bessel-check", "--out", str(a), "--samples", "15"]) == 0
    assert run(["bessel-check", "--out", str(b), "--samples", "15"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nE=0.4\npoints=4\nseed=3\n")
    out = tmp_path / "curv.csv"
    code = run(["curvature", "--config", str(cfg), "--out", str(out),
                "--points", "6"])
    assert code == 0
    # command line override wins over the config file
    assert len(out.read_text().splitlines()) == 7


def test_bad_config_line_exit_2(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("this is not a key value pair\n")
    assert run(["curvature", "--config", str(cfg),
                "--out", str(tmp_path / "x.csv")]) == 2


def test_workers_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CUSPLAB_WORKERS", "0")
    assert run(["curvature", "--out", str(tmp_path / "x.csv")]) == 2


def test_svg_emitted(tmp_path):
    out = tmp_path / "curv.csv"
    svg = tmp_path / "curv.svg"
    assert run(["curvature", "--out", str(out), "--svg", str(svg)]) == 0
    text = svg.read_text()
    assert text.startswith("<svg") and "polyline" in text


def test_count_csv(tmp_path):
    out = tmp_path / "cnt.csv"
    assert run(["count", "--radii", "10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "radius,count"
    assert lines[-1].startswith("slope,")
