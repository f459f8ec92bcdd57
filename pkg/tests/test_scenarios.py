"""Scenario orchestration, reports, CLI behavior, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from edgeqed.cli import main as cli_main
from edgeqed.config import parse_config
from edgeqed.report import sha256_of
from edgeqed.scenarios import run_scenario, sweep

# a fast, fully-resolved emission configuration for orchestration tests
EMISSION_CFG = """
scenario = emission-decay
[physics]
gamma = 4.37
[numerics]
n_k = 512
band_top_delta = 40
t_max = 3.0
[output]
plots = false
"""

BOUND_CFG = """
scenario = bound-state
[physics]
gamma = 4.37
[numerics]
n_k = 256
band_top_delta = 40
t_max = 2.0
[output]
plots = false
"""


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


def test_emission_scenario_report(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    report = run_scenario(cfg, tmp_path / "out")
    assert report.scalars["max_method_deviation"] <= 1e-3
    assert (tmp_path / "out" / "decay.csv").exists()
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["schema_version"] == 1
    assert summary["scenario"] == "emission-decay"
    assert "provenance" in summary


def test_manifest_integrity(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    out = tmp_path / "out"
    report = run_scenario(cfg, out)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["manifest"], "manifest must list emitted files"
    for name, digest in summary["manifest"].items():
        path = out / name
        assert path.exists()
        assert digest == f"sha256:{sha256_of(path)}"
    # every emitted file except the summary itself appears in the manifest
    emitted = {p.name for p in out.iterdir()} - {"summary.json"}
    assert emitted == set(summary["manifest"])


def test_determinism_byte_identical(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    a, b = tmp_path / "a", tmp_path / "b"
    run_scenario(cfg, a)
    run_scenario(cfg, b)
    for name in ("decay.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_bound_state_scenario(tmp_path):
    cfg = parse_config(BOUND_CFG)
    report = run_scenario(cfg, tmp_path / "out")
    assert report.scalars["omega_b_minus_omega0_mev"] == pytest.approx(-1.09, abs=0.01)
    assert report.scalars["residue_Z"] == pytest.approx(0.51, abs=0.01)
    assert (tmp_path / "out" / "self_energy.csv").exists()
    assert (tmp_path / "out" / "spectral.csv").exists()


def test_half_res_check_flag(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    report = run_scenario(cfg, tmp_path / "out", half_res_check=True)
    assert report.convergence is not None
    assert report.convergence["headline"] == "max_method_deviation"
    assert report.convergence_ok


def test_csv_format_is_rfc4180(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    out = tmp_path / "out"
    run_scenario(cfg, out, fmt="csv")
    raw = (out / "decay.csv").read_bytes()
    assert b"\r" not in raw
    header = raw.decode().splitlines()[0]
    assert header == "t_ps,p_excited_green_fn,p_excited_direct,p_excited_flat_dos"
    first = raw.decode().splitlines()[1].split(",")
    assert len(first) == 4
    # 17 significant digits survive a parse roundtrip
    assert float(first[1]) == pytest.approx(1.0, abs=1e-4)
    assert not (out / "summary.json").exists()


def test_plots_rendered_when_enabled(tmp_path):
    cfg = parse_config(EMISSION_CFG.replace("plots = false", "plots = true"))
    out = tmp_path / "out"
    run_scenario(cfg, out)
    assert (out / "decay.png").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert "decay.png" in summary["manifest"]


class TestCli:
    def test_run_exit_zero(self, tmp_path, capsys):
        cfg = _write(tmp_path, EMISSION_CFG)
        code = cli_main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert code == 0
        assert "max_method_deviation" in capsys.readouterr().out

    def test_config_error_exit_two(self, tmp_path, capsys):
        cfg = _write(tmp_path, "scenario = send-design\nsigma0 = -3\n")
        code = cli_main(["run", "--config", str(cfg), "--out", str(tmp_path / "out")])
        assert code == 2
        assert "sigma0" in capsys.readouterr().err

    def test_missing_config_exit_two(self, tmp_path):
        code = cli_main(["run", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path / "out")])
        assert code == 2

    def test_sweep(self, tmp_path, capsys):
        cfg = _write(tmp_path, EMISSION_CFG)
        out = tmp_path / "sweep"
        code = cli_main([
            "sweep", "--config", str(cfg), "--out", str(out),
            "--param", "leak_rate", "--values", "0,0.02",
        ])
        assert code == 0
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert [c["value"] for c in summary["cells"]] == [0.0, 0.02]
        assert all(c["ok"] for c in summary["cells"])
        assert (out / "cell_00" / "summary.json").exists()
        assert (out / "cell_01" / "summary.json").exists()

    def test_sweep_unknown_param_exit_two(self, tmp_path):
        cfg = _write(tmp_path, EMISSION_CFG)
        code = cli_main([
            "sweep", "--config", str(cfg), "--out", str(tmp_path / "s"),
            "--param", "scenario", "--values", "1,2",
        ])
        assert code == 2


def test_sweep_empty_values():
    cfg = parse_config(EMISSION_CFG)
    assert sweep(cfg, "leak_rate", [], "/tmp/unused-empty-sweep") == []


def test_sweep_leak_monotone(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    reports = sweep(cfg, "leak_rate", [0.0, 0.05, 0.2], tmp_path, make_plots=False)
    finals = [r.scalars["final_excited_population"] for r in reports]
    assert finals[0] > finals[1] > finals[2]


def test_sweep_records_cell_failure(tmp_path):
    cfg = parse_config(EMISSION_CFG)
    # a k grid below the minimum size fails inside the cell
    reports = sweep(cfg, "n_k", [512, 4], tmp_path, make_plots=False)
    assert not reports[0].scalars.get("failed", False)
    assert reports[1].scalars.get("failed", False)
    assert "error" in reports[1].scalars
