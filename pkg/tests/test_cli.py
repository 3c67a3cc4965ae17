from __future__ import annotations

import json

from typer.testing import CliRunner

from cli.app import app

runner = CliRunner()


def test_presets_list():
    result = runner.invoke(app, ["presets", "list"])
    assert result.exit_code == 0
    assert "fig4_right" in result.output


def test_presets_show_is_valid_json():
    result = runner.invoke(app, ["presets", "show", "figS5_steady"])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["scenario"] == "liouvillian"
    assert payload["model"]["omega_z"] == 0.5


def test_run_without_experiment_on_a_pipe():
    result = runner.invoke(app, ["run"])
    assert result.exit_code == 2
    assert "--preset" in result.output


def test_unknown_preset_is_a_config_error():
    assert runner.invoke(app, ["run", "--preset", "nope"]).exit_code == 2
    assert runner.invoke(app, ["presets", "show", "nope"]).exit_code == 2


def test_config_and_preset_are_exclusive(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{}")
    result = runner.invoke(app, ["run", "--config", str(path), "--preset", "fig2"])
    assert result.exit_code == 2


def test_run_from_config_file(tmp_path):
    config = {
        "name": "cli_orbit",
        "scenario": "classical",
        "model": {"V": 0.5, "gamma": 0.2, "S": 10},
        "initial": {"kind": "coherent", "z1": 0.1, "z2": -0.1},
        "run": {"seed": 9, "t_max": 2.0, "output_dt": 0.5},
    }
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(config))
    out = tmp_path / "out"
    result = runner.invoke(app, ["run", "--config", str(path), "--out", str(out), "--seed", "4", "--threads", "1"])
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed_lineage"]["master"] == 4


def test_invalid_thread_count():
    assert runner.invoke(app, ["run", "--preset", "fig2", "--threads", "0"]).exit_code == 2


def test_verify_single_quick_criterion():
    result = runner.invoke(app, ["verify", "--quick", "--only", "1"])
    assert result.exit_code == 0, result.output
    assert "passed" in result.output
