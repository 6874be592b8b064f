import csv
import json
import math
import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from beclab.cli import main


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def manifest(out):
    return json.loads((Path(out) / "manifest.json").read_text())


def csv_tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(Path(root).rglob("*.csv"))}


def test_scatter_default_config(tmp_path):
    assert run_cli("scatter", "--out", tmp_path) == 0
    summary = dict(read_csv(tmp_path / "summary.csv")[1:])
    assert abs(float(summary["a0"]) - (1 - math.tanh(1))) <= 1e-8
    m = manifest(tmp_path)
    assert m["subcommand"] == "scatter" and m["status"]["exit_code"] == 0
    assert set(m) >= {"version", "config_echo", "derived_params", "timings", "status"}
    assert (tmp_path / "solution.gp").read_text().startswith("set datafile separator ','")


def test_scatter_zero_potential_from_json(tmp_path):
    cfg = tmp_path / "zero.json"
    cfg.write_text(json.dumps({"mu": 1.0, "potential": {"kind": "constant", "v0": 0.0, "R0": 1.0}}))
    assert run_cli("scatter", "--config", cfg, "--out", tmp_path / "o") == 0
    summary = dict(read_csv(tmp_path / "o" / "summary.csv")[1:])
    assert summary["a0"] == "0.0" and summary["capacity"] == "0.0"


def test_scatter_from_ini(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[DEFAULT]\nmu = 0.01\n\n[potential]\nv0 = 5.0\nR0 = 1.0\n")
    assert run_cli("scatter", "--config", cfg, "--out", tmp_path / "o") == 0
    a0 = float(dict(read_csv(tmp_path / "o" / "summary.csv")[1:])["a0"])
    k = math.sqrt(5.0 / 0.01)
    assert abs(a0 - (1 - math.tanh(k) / k)) <= 1e-8


def test_rate_slope_in_manifest(tmp_path):
    assert run_cli("rate", "--out", tmp_path) == 0
    d = manifest(tmp_path)["derived_params"]
    assert abs(d["fitted_slope"] - 0.5) <= 0.075 and d["points_used"] >= 8
    rows = read_csv(tmp_path / "rate.csv")
    assert rows[0] == ["mu", "eta", "used"] and len(rows) == 10


@pytest.mark.parametrize("body, suffix", [("mu = [", ".toml"), ("mu = -1.0\n", ".toml"),
                                          ("{\"mu\": \"abc\"}", ".json"), ("mu = 1.0\n[potential]\nv0 = -2.0\n", ".toml")])
def test_invalid_config_exit_2(tmp_path, body, suffix):
    cfg = tmp_path / f"bad{suffix}"
    cfg.write_text(body)
    assert run_cli("scatter", "--config", cfg, "--out", tmp_path / "o") == 2
    assert manifest(tmp_path / "o")["status"]["state"] == "config_invalid"


def test_missing_config_exit_2(tmp_path):
    assert run_cli("scatter", "--config", tmp_path / "nope.toml", "--out", tmp_path / "o") == 2


def test_jobs_validation(tmp_path, monkeypatch):
    monkeypatch.setenv("BECLAB_JOBS", "many")
    assert run_cli("scatter", "--out", tmp_path / "a") == 2
    monkeypatch.setenv("BECLAB_JOBS", "2")
    assert run_cli("scatter", "--out", tmp_path / "b", "--jobs", "0") == 2
    assert run_cli("scatter", "--out", tmp_path / "c") == 0


def test_solver_failure_exit_3(tmp_path):
    cfg = tmp_path / "late.toml"
    cfg.write_text("times = [5.0]\n[phase]\nkind = \"cosine\"\namplitude = [0.25]\n")
    assert run_cli("eikonal-run", "--config", cfg, "--out", tmp_path / "o") == 3
    st = manifest(tmp_path / "o")["status"]
    assert st["state"] == "solver_failure" and st["error_type"] == "PastCaustic"


def test_acceptance_failure_exit_4(tmp_path):
    cfg = tmp_path / "acc.toml"
    cfg.write_text("criteria = [3]\n")
    assert run_cli("acceptance", "--config", cfg, "--out", tmp_path / "o") == 4
    rows = read_csv(tmp_path / "o" / "summary.csv")
    assert rows[0] == ["criterion", "title", "status", "failed_checks"]
    assert rows[1][0] == "3" and rows[1][2] == "fail"
    assert manifest(tmp_path / "o")["status"]["failing_criteria"] == [3]


def test_acceptance_passing_subset_exit_0(tmp_path):
    cfg = tmp_path / "acc.toml"
    cfg.write_text("criteria = [1, 7]\n")
    assert run_cli("acceptance", "--config", cfg, "--out", tmp_path / "o") == 0
    assert (tmp_path / "o" / "c01_closed_form.csv").exists()
    assert (tmp_path / "o" / "c07_euler.csv").exists()
    assert [r[2] for r in read_csv(tmp_path / "o" / "summary.csv")[1:]] == ["pass", "pass"]


def test_csv_format_and_atomic_writes(tmp_path):
    assert run_cli("gp-run", "--out", tmp_path) == 0
    for p in tmp_path.iterdir():
        assert not p.name.endswith(".tmp")
    raw = (tmp_path / "history.csv").read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    rows = read_csv(tmp_path / "history.csv")
    assert rows[0] == ["t", "mass", "energy"]
    assert all(len(r) == 3 for r in rows)
    assert read_csv(tmp_path / "rho.csv")[0] == ["t", "x1", "value"]
    m = manifest(tmp_path)
    assert m["rng"]["bit_generator"] == "Philox"
    assert m["derived_params"]["mass_drift"] <= 1e-10


def test_gp_run_is_deterministic_with_noise(tmp_path):
    cfg = tmp_path / "noisy.toml"
    cfg.write_text("eps = 0.1\nT = 0.25\n[initial]\nnoise = 0.01\nseed = 7\n[kernel]\ng = 1.0\n")
    assert run_cli("gp-run", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run_cli("gp-run", "--config", cfg, "--out", tmp_path / "b") == 0
    assert csv_tree(tmp_path / "a") == csv_tree(tmp_path / "b")


def test_sweep_independent_of_worker_count(tmp_path):
    cfg = tmp_path / "w.toml"
    cfg.write_text("values = [0.2, 0.1, 0.05]\nT = 0.25\n[regime]\nN = 100\neps = 0.1\nkappa = 0.0\n"
                   "[grid]\nn = 256\n[phase]\nkind = \"cosine\"\namplitude = [0.25]\n")
    assert run_cli("wkb-sweep", "--config", cfg, "--out", tmp_path / "a", "--jobs", "1") == 0
    assert run_cli("wkb-sweep", "--config", cfg, "--out", tmp_path / "b", "--jobs", "3") == 0
    assert csv_tree(tmp_path / "a") == csv_tree(tmp_path / "b")
    assert manifest(tmp_path / "a")["derived_params"]["regime"] == "SGP"


@pytest.mark.parametrize("sub", ["neumann", "euler-run", "eikonal-run", "pair-check"])
def test_other_subcommands_run(tmp_path, sub):
    assert run_cli(sub, "--out", tmp_path) == 0
    assert manifest(tmp_path)["status"]["exit_code"] == 0
    assert any(p.suffix == ".csv" for p in tmp_path.iterdir())


def test_console_script(tmp_path):
    exe = shutil.which("bec-lab")
    cmd = [exe] if exe else [sys.executable, "-m", "beclab.cli"]
    env = dict(os.environ, BECLAB_JOBS="1")
    proc = subprocess.run(cmd + ["scatter", "--out", str(tmp_path)], capture_output=True, env=env)
    assert proc.returncode == 0
    assert (tmp_path / "manifest.json").exists()
