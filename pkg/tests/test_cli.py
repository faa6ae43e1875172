"""End-to-end CLI tests: exit codes, file outputs, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from darkpath import cli
from darkpath.config import ConfigError, RunConfig


def _write(path, text):
    path.write_text(text)
    return str(path)


def test_config_defaults_round_trip():
    cfg = RunConfig.from_dict({})
    resolved = cfg.resolved()
    assert resolved["protocol"]["kind"] == "qst"
    assert resolved["run"]["mode"] == "dimensionless"
    assert resolved["sweep"]["n_max"] == 10
    json.dumps(resolved)


def test_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"protocol": {"amplitud": 0.7}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"protocols": {}})
    with pytest.raises(ConfigError):
        RunConfig.load(_write(tmp_path / "c.toml", "x = 1"))
    with pytest.raises(ConfigError):
        RunConfig.load(_write(tmp_path / "c.json", "{not json"))
    with pytest.raises(ConfigError):
        RunConfig.load(str(tmp_path / "missing.yaml"))


def test_config_value_validation():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"run": {"mode": "imaginary"}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"noise": {"uniform": 1e-3, "decay_bus": 1e-3}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"scan": {"x_min": -0.1}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"sweep": {"n_min": 2}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"optimize": {"kinds": ["qst", "qst"]}})


def test_design_writes_schedule_and_metadata(tmp_path):
    out = tmp_path / "design"
    code = cli.main(["design", "--out", str(out), "--steps", "501"])
    assert code == 0
    lines = (out / "schedule.csv").read_text().splitlines()
    assert lines[0] == "t,g_1,g_2,g_3"
    first = [float(x) for x in lines[1].split(",")]
    last = [float(x) for x in lines[-1].split(",")]
    assert max(abs(v) for v in first[1:]) < 1e-12
    assert max(abs(v) for v in last[1:]) < 1e-12
    meta = json.loads((out / "design.json").read_text())
    assert meta["command"] == "design"
    assert meta["pathway"]["max_residual"] < 1e-8
    assert meta["config"]["run"]["steps"] == 501
    assert (out / "schedule.png").stat().st_size > 0


def test_bad_config_exits_2_without_files(tmp_path, capsys):
    cfg = _write(tmp_path / "bad.yaml", "protocol:\n  kinnd: qst\n")
    out = tmp_path / "never"
    code = cli.main(["simulate", "--config", cfg, "--out", str(out)])
    assert code == 2
    assert not out.exists()
    assert "kinnd" in capsys.readouterr().err


def test_simulate_noiseless_summary(tmp_path):
    cfg = _write(
        tmp_path / "run.yaml",
        "protocol:\n  amplitude: 0.7365\n  duration: 3.0\nrun:\n  steps: 1201\n",
    )
    out = tmp_path / "sim"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["fidelity"] > 0.9999
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,pop_G,pop_1,pop_2,pop_3,pop_a,fidelity"
    body = np.loadtxt((out / "trajectory.csv"), delimiter=",", skiprows=1)
    totals = body[:, 1:-1].sum(axis=1)
    assert np.max(totals) <= 1.0 + 1e-9


def test_simulate_infeasible_design_exits_1(tmp_path, capsys):
    cfg = _write(
        tmp_path / "fast.yaml",
        "protocol:\n  amplitude: 0.7365\n  duration: 40.0\nrun:\n  mode: transmon\n",
    )
    out = tmp_path / "t"
    code = cli.main(["transmon", "--config", cfg, "--out", str(out)])
    assert code == 1
    assert "invertible maximum" in capsys.readouterr().err


def test_optimize_single_protocol_column(tmp_path):
    cfg = _write(
        tmp_path / "opt.yaml",
        "optimize:\n  kinds: [all_esg]\n  a_min: 0.5\n  a_max: 0.8\n  count: 7\n",
    )
    out = tmp_path / "opt"
    assert cli.main(["optimize", "--config", cfg, "--out", str(out)]) == 0
    header = (out / "time_curve.csv").read_text().splitlines()[0]
    assert header == "A,T_prime"
    optima = json.loads((out / "optima.json").read_text())
    assert set(optima["optima"]) == {"all_esg"}


def test_scan_csv_layout(tmp_path):
    cfg = _write(
        tmp_path / "scan.yaml",
        "scan:\n  kind: x_error\n  a_min: 0.5\n  a_max: 0.9\n  a_count: 3\n"
        "  x_count: 5\nrun:\n  steps: 401\n  jobs: 2\n",
    )
    out = tmp_path / "scan"
    assert cli.main(["scan", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "heatmap.csv").read_text().splitlines()
    top = lines[0].split(",")
    assert top[0] == "amplitude\\epsilon"
    assert [float(x) for x in top[1:]] == pytest.approx([-0.1, -0.05, 0.0, 0.05, 0.1])
    assert [float(line.split(",")[0]) for line in lines[1:]] == pytest.approx(
        [0.5, 0.7, 0.9]
    )
    sidecar = json.loads((out / "scan.json").read_text())
    assert sidecar["grid"]["scan"] == "x_error"


def test_transmon_waveform_is_feasible(tmp_path):
    cfg = _write(
        tmp_path / "tr.yaml",
        "protocol:\n  kind: all_esg\n  amplitude: 0.6143\n  duration: 34.0\n"
        "run:\n  mode: transmon\n  model: effective\ntransmon:\n  saturate: true\n",
    )
    out = tmp_path / "tr"
    assert cli.main(["transmon", "--config", cfg, "--out", str(out)]) == 0
    body = np.loadtxt(out / "waveform.csv", delimiter=",", skiprows=1)
    etas = body[:, 1:4]
    assert np.max(etas) <= 1.8412
    flags = body[:, 4:7]
    assert set(np.unique(flags)).issubset({0.0, 1.0})
    summary = json.loads((out / "summary.json").read_text())
    assert summary["clip_fraction"] > 0.0


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write(
        tmp_path / "det.yaml",
        "protocol:\n  amplitude: 0.7365\n  duration: 3.0\n"
        "noise:\n  uniform: 0.0005\nrun:\n  steps: 801\n",
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert cli.main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out2.iterdir())
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_module_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "darkpath", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "sweep-n" in proc.stdout
