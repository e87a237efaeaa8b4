import json
import subprocess
import sys

import pytest

from spikesim.cli import main
from spikesim.harness import shipped_config_text


@pytest.fixture
def burst_cfg(tmp_path):
    path = tmp_path / "burst.cfg"
    path.write_text(shipped_config_text())
    return path


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_simulate_then_classify(tmp_path, burst_cfg, capsys, monkeypatch):
    monkeypatch.delenv("SPIKESIM_OUTPUT_DIR", raising=False)
    out = tmp_path / "out"
    assert main(["simulate", str(burst_cfg), "--output-dir", str(out)]) == 0
    report = _json_out(capsys)
    assert report["pattern"]["label"] == "burst(2)"
    assert (out / "burst_spikes.csv").exists() and (out / "burst_report.json").exists()
    assert not (out / "burst_trajectory.csv").exists()

    assert main(["classify", str(out / "burst_spikes.csv")]) == 0
    result = _json_out(capsys)
    assert result["pattern"]["label"] == "burst(2)"
    assert result["occupied_clusters"] == 2
    assert result["tol_rule"].startswith("default")
    assert sum(b["count"] for b in result["histogram"]) == result["events"] - result["transient_skip"]


def test_environment_overrides_output_dir(tmp_path, burst_cfg, capsys, monkeypatch):
    monkeypatch.setenv("SPIKESIM_OUTPUT_DIR", str(tmp_path / "env"))
    burst_cfg.write_text(shipped_config_text().replace("t_end = 1000", "t_end = 50"))
    assert main(["simulate", str(burst_cfg), "--output-dir", str(tmp_path / "flag"), "--trajectory"]) == 0
    capsys.readouterr()
    assert (tmp_path / "env" / "burst_trajectory.csv").exists()
    assert not (tmp_path / "flag").exists()


def test_compare_and_sweep(tmp_path, burst_cfg, capsys, monkeypatch):
    monkeypatch.delenv("SPIKESIM_OUTPUT_DIR", raising=False)
    short = shipped_config_text().replace("t_end = 1000", "t_end = 50")
    euler = tmp_path / "euler.cfg"
    euler.write_text(short.replace("scheme = hybrid-adaptive", "scheme = euler"))
    oracle = tmp_path / "oracle.cfg"
    oracle.write_text(short.replace("scheme = hybrid-adaptive", "scheme = oracle"))
    assert main(["compare", str(euler), str(oracle), "--output-dir", str(tmp_path)]) == 0
    rows = _json_out(capsys)
    assert [r["scheme"] for r in rows] == ["euler", "oracle"]
    assert (tmp_path / "comparison.csv").exists()

    code = main(["error-sweep", str(euler), "--taus", "0.02,0.01", "--thetas", "30", "--output-dir", str(tmp_path)])
    assert code == 0
    assert len(_json_out(capsys)) == 2
    assert (tmp_path / "euler_error_sweep.csv").exists()


def test_bench(burst_cfg, capsys):
    burst_cfg.write_text(shipped_config_text().replace("t_end = 1000", "t_end = 100"))
    assert main(["bench", str(burst_cfg), "--repeat", "2"]) == 0
    assert _json_out(capsys)["step_count"] > 0


def test_invalid_inputs_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[solver]\nwobble = 1\n")
    assert main(["simulate", str(bad), "--output-dir", str(tmp_path)]) == 1
    assert "wobble" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.cfg")]) == 1
    assert main(["no-such-command"]) == 1
    assert main(["error-sweep", str(bad), "--taus", "x", "--thetas", "30"]) == 1
    junk = tmp_path / "junk.csv"
    junk.write_text("a,b\n1,2\n")
    assert main(["classify", str(junk)]) == 1


def test_solver_failure_exits_two(tmp_path, capsys):
    cfg = tmp_path / "stuck.cfg"
    cfg.write_text("[solver]\nepsilon = 1e-40\nmax_floored_steps = 5\n")
    assert main(["simulate", str(cfg), "--output-dir", str(tmp_path)]) == 2
    assert "StepSizeError" in capsys.readouterr().err
    report = json.loads((tmp_path / "stuck_report.json").read_text())
    assert report["error"]["type"] == "StepSizeError"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "spikesim", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("simulate", "compare", "error-sweep", "classify", "bench"):
        assert sub in proc.stdout
