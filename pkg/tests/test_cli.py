from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from banditlab.cli import _resolved, build_parser, main

_CONFIG = """
policy = "stable_ts"
gamma_c = 4.0
gamma_beta = 0.4
horizon = 100
replications = 20
master_seed = 7

[[arms]]
mean = 1.0

[[arms]]
mean = 0.0
"""

_ENV_NAMES = (
    "BANDITLAB_CONFIG", "BANDITLAB_SEED", "BANDITLAB_REPLICATIONS",
    "BANDITLAB_HORIZON", "BANDITLAB_WORKERS", "BANDITLAB_OUT", "BANDITLAB_FULL",
)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in _ENV_NAMES:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(_CONFIG)
    return str(path)


def test_verify_theory_passes(tmp_path, capsys):
    assert main(["verify-theory", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out
    assert "checks passed" in out
    table = json.loads((tmp_path / "verify_theory.json").read_text())
    assert table["checks"]
    for row in table["checks"]:
        assert set(row) == {"check", "statistic", "threshold", "verdict"}
        assert row["verdict"] == "PASS"


def test_unknown_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_no_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_missing_config_exits_two(capsys):
    assert main(["simulate"]) == 2
    assert "config" in capsys.readouterr().err.lower()


def test_nonexistent_config_exits_one(tmp_path, capsys):
    rc = main(["simulate", "--config", str(tmp_path / "nope.toml")])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_simulate_writes_results(config_path, tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["simulate", "--config", config_path, "--out", str(out),
               "--workers", "1", "--replications", "5"])
    assert rc == 0
    assert (out / "replications.csv").exists()
    assert (out / "run_metadata.json").exists()
    stdout = capsys.readouterr().out
    assert "mean realized regret" in stdout
    assert "wrote" in stdout


def test_coverage_writes_curve(config_path, tmp_path, capsys):
    out = tmp_path / "cov"
    rc = main(["coverage", "--config", config_path, "--out", str(out),
               "--workers", "1"])
    assert rc == 0
    assert (out / "coverage.csv").exists()
    assert "coverage" in capsys.readouterr().out


def test_stability_labels_unsupported_arms(tmp_path, capsys):
    cfg = tmp_path / "equal.toml"
    cfg.write_text(
        'policy = "ts"\nhorizon = 100\nreplications = 10\nmaster_seed = 7\n'
        "[[arms]]\nmean = 0.0\n[[arms]]\nmean = 0.0\n"
    )
    out = tmp_path / "stab"
    rc = main(["stability", "--config", str(cfg), "--out", str(out), "--workers", "1"])
    assert rc == 0
    assert "unsupported-by-theory" in capsys.readouterr().out
    meta = json.loads((out / "run_metadata.json").read_text())
    assert meta["extras"]["unsupported_by_theory_arms"] == [1, 2]
    assert (out / "histogram_arm1.json").exists()
    assert (out / "histogram_arm2.json").exists()


def test_regret_reports_both_kinds(config_path, tmp_path, capsys):
    out = tmp_path / "reg"
    rc = main(["regret", "--config", config_path, "--out", str(out),
               "--workers", "1", "--replications", "5"])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "mean realized regret" in stdout
    assert "mean pseudo regret" in stdout
    meta = json.loads((out / "run_metadata.json").read_text())
    assert meta["extras"]["regret"]["n_replications"] == 5


def test_env_fallback_and_flag_priority(config_path, tmp_path, monkeypatch):
    monkeypatch.setenv("BANDITLAB_HORIZON", "64")
    out_env = tmp_path / "env"
    assert main(["simulate", "--config", config_path, "--out", str(out_env),
                 "--workers", "1", "--replications", "3"]) == 0
    meta = json.loads((out_env / "run_metadata.json").read_text())
    assert meta["experiment"]["horizon"] == 64
    # an explicit flag beats the variable
    out_flag = tmp_path / "flag"
    assert main(["simulate", "--config", config_path, "--out", str(out_flag),
                 "--workers", "1", "--replications", "3", "--horizon", "80"]) == 0
    meta = json.loads((out_flag / "run_metadata.json").read_text())
    assert meta["experiment"]["horizon"] == 80


def test_full_env_truthiness(monkeypatch):
    parser = build_parser()
    args = parser.parse_args(["verify-theory"])
    assert _resolved(args)["full"] is False
    monkeypatch.setenv("BANDITLAB_FULL", "1")
    assert _resolved(args)["full"] is True
    monkeypatch.setenv("BANDITLAB_FULL", "false")
    assert _resolved(args)["full"] is False
    args_flag = parser.parse_args(["verify-theory", "--full"])
    assert _resolved(args_flag)["full"] is True


def test_reproduce_figure_two_desk_scale(tmp_path):
    out = tmp_path / "fig2"
    rc = main(["reproduce-figure", "2", "--out", str(out), "--workers", "1",
               "--replications", "40", "--horizon", "100", "--seed", "5"])
    assert rc == 0
    hist_files = sorted(p.name for p in out.rglob("histogram_*_arm*.json"))
    assert len(hist_files) == 4  # two cases x two arms
    payload = json.loads(next(out.rglob("histogram_gap_arm1.json")).read_text())
    assert payload["n_samples"] == 40


def test_console_entry_point(tmp_path):
    exe = shutil.which("banditlab")
    if exe is not None:
        cmd = [exe, "verify-theory", "--out", str(tmp_path)]
    else:
        cmd = [sys.executable, "-m", "banditlab.cli", "verify-theory", "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert "checks passed" in proc.stdout
