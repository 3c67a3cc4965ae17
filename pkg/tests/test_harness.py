from __future__ import annotations

import json
import math

import numpy as np
import pytest

from errors import ConfigError, DomainError
from harness import (
    Criterion,
    CriterionStatus,
    DynamicalRegime,
    ExperimentConfig,
    GridAxes,
    InitialKind,
    Scenario,
    classify_point,
    evaluate,
    load_preset,
    preset_names,
    reclassify,
    run,
    run_criteria,
)
from harness.verify import _dominant_peak
from model import Family, ModelParams
from utils.io import read_csv, sha256


def _classical_config(**run_overrides) -> dict:
    return {
        "name": "short_orbit",
        "scenario": "classical",
        "model": {"V": 0.5, "gamma": 0.2, "S": 10},
        "initial": {"kind": "coherent", "z1": 0.2, "phi1": 0.0, "z2": 0.2, "phi2": 0.0},
        "run": {"seed": 3, "t_max": 5.0, "output_dt": 0.1, **run_overrides},
    }


class TestConfigs:
    @pytest.mark.parametrize("name", preset_names())
    def test_presets_validate(self, name):
        config = load_preset(name)
        assert config.name == name
        assert config.run.seed == 20240101

    def test_unknown_preset(self):
        with pytest.raises(ConfigError) as info:
            load_preset("fig99")
        assert any("fig2" in field for field in info.value.fields)

    def test_seed_is_mandatory(self):
        data = _classical_config()
        del data["run"]["seed"]
        with pytest.raises(ConfigError) as info:
            ExperimentConfig.parse(data)
        assert any(field.startswith("run.seed") for field in info.value.fields)

    def test_every_bad_field_is_reported(self):
        data = _classical_config(t_max=-1.0)
        data["model"]["gamma"] = -0.5
        with pytest.raises(ConfigError) as info:
            ExperimentConfig.parse(data)
        assert len(info.value.fields) >= 2

    def test_empty_region_is_a_config_error(self):
        data = _classical_config()
        data["initial"] = {"kind": "region", "region": {"z_min": 0.5, "z_max": 0.1}}
        with pytest.raises(ConfigError):
            ExperimentConfig.parse(data)

    def test_fixed_point_needs_family(self):
        data = _classical_config()
        data["initial"] = {"kind": "fixed-point"}
        with pytest.raises(ConfigError):
            ExperimentConfig.parse(data)

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "experiment.json"
        path.write_text(json.dumps(_classical_config()))
        assert ExperimentConfig.load(path).scenario is Scenario.CLASSICAL
        with pytest.raises(ConfigError):
            ExperimentConfig.load(tmp_path / "missing.json")

    def test_overrides(self):
        config = ExperimentConfig.parse(_classical_config())
        changed = config.with_overrides(seed=11, output_dir="elsewhere")
        assert (changed.run.seed, changed.output_dir) == (11, "elsewhere")
        assert config.with_overrides().run.seed == 3

    def test_time_grid(self):
        grid = ExperimentConfig.parse(_classical_config()).run.time_grid()
        assert len(grid) == 51
        assert grid[-1] == pytest.approx(5.0)

    def test_grid_points(self):
        axes = GridAxes(V=[0.5, 1.0], gamma=[0.1, 0.2, 0.3])
        assert axes.size() == 6
        assert list(axes.points())[1] == {"V": 0.5, "gamma": 0.2}
        with pytest.raises(ValueError):
            GridAxes()

    def test_fixed_point_initial_state(self):
        data = _classical_config()
        data["model"]["V"] = 1.7
        data["initial"] = {"kind": "fixed-point", "family": "FP-III", "branch": -1}
        config = ExperimentConfig.parse(data)
        assert config.initial.kind is InitialKind.FIXED_POINT
        assert config.initial.resolve(config.model).z1 == pytest.approx(-0.811606, abs=1e-6)
        with pytest.raises(ConfigError):
            config.initial.resolve(ModelParams(V=0.5, gamma=0.2))
        assert config.initial.family is Family.FP_III


class TestClassification:
    @pytest.mark.parametrize(
        ("measurements", "regime"),
        [
            ({"Lambda_l": 0.1, "n_attractors": 1, "early_rate": 0.5}, DynamicalRegime.STEADY_STATE_CHAOS),
            ({"Lambda_l": -0.05, "n_attractors": 1, "early_rate": 0.5}, DynamicalRegime.TRANSIENT_CHAOS),
            ({"Lambda_l": -0.05, "n_attractors": 2, "early_rate": 0.05}, DynamicalRegime.SELF_TRAPPED),
            ({"Lambda_l": -0.05, "n_attractors": 1, "early_rate": math.nan}, DynamicalRegime.SELF_TRAPPED),
            ({"Lambda_l": 0.0, "n_attractors": 0}, DynamicalRegime.OSCILLATORY),
        ],
    )
    def test_labels_follow_from_measurements(self, measurements, regime):
        assert classify_point(measurements) is regime

    def test_reclassify_skips_failed_rows(self):
        rows = [
            {"Lambda_l": 0.1, "n_attractors": 0, "early_rate": math.nan, "error": ""},
            {"Lambda_l": math.nan, "n_attractors": math.nan, "early_rate": math.nan, "error": "DomainError: x"},
        ]
        assert reclassify(rows) == ["steady-state-chaos", ""]


class TestRuns:
    def test_classical_run_writes_a_manifest(self, tmp_path):
        directory = run(ExperimentConfig.parse(_classical_config()), output_dir=str(tmp_path / "out"))
        manifest = json.loads((directory / "manifest.json").read_text())
        assert manifest["status"] == "completed"
        assert manifest["seed_lineage"]["master"] == 3
        assert manifest["config"]["output_dir"] == str(directory)
        recorded = {item["path"]: item["sha256"] for item in manifest["files"]}
        assert "trajectory.csv" in recorded
        assert "run.log" not in recorded
        for name, digest in recorded.items():
            assert sha256(directory / name) == digest
        assert (directory / "run.log").exists()
        assert len(read_csv(directory / "trajectory.csv")["t"]) == 51

    def test_default_directory_under_output_root(self, sequential_config):
        directory = run(ExperimentConfig.parse(_classical_config(t_max=1.0)))
        assert str(directory).startswith(sequential_config.output_root)
        assert directory.name == "short_orbit"

    def test_failed_run_leaves_a_manifest(self, tmp_path):
        data = _classical_config()
        data["scenario"] = "twa"
        data["initial"] = {"kind": "fixed-point", "family": "FP-IV", "branch": 1}
        with pytest.raises(ConfigError):
            run(ExperimentConfig.parse(data), output_dir=str(tmp_path / "failed"))
        manifest = json.loads((tmp_path / "failed" / "manifest.json").read_text())
        assert manifest["status"] == "failed"
        assert manifest["error"].startswith("ConfigError")

    def test_quantum_trajectory_run(self, tmp_path):
        data = {
            "name": "tiny_quantum",
            "scenario": "quantum-trajectory",
            "model": {"V": 1.7, "gamma": 0.2, "S": 1},
            "initial": {"kind": "coherent", "z1": 0.6, "z2": -0.2, "phi2": 0.5},
            "run": {"seed": 5, "t_max": 1.0, "output_dt": 0.1, "dt": 2e-3, "n_traj": 4, "husimi_grid": [11, 10]},
        }
        directory = run(ExperimentConfig.parse(data), output_dir=str(tmp_path / "q"))
        for name in ("z_plus.csv", "entropy.csv", "purity.csv", "phase_fluct.csv", "husimi.csv", "summary.json"):
            assert (directory / name).exists()
        purity = read_csv(directory / "purity.csv")
        assert purity["P1"][0] == pytest.approx(1.0)

    def test_liouvillian_run(self, tmp_path):
        data = {
            "name": "tiny_spectrum",
            "scenario": "liouvillian",
            "model": {"V": 1.7, "gamma": 0.2, "omega_z": 0.5, "S": 1.5},
            "run": {"seed": 1, "sectors": [1, -1]},
        }
        directory = run(ExperimentConfig.parse(data), output_dir=str(tmp_path / "l"))
        statistics = json.loads((directory / "statistics.json").read_text())
        assert [entry["sector"] for entry in statistics] == [1, -1]
        assert sum(entry["n_eigenvalues"] for entry in statistics) == 4**4


class TestAcceptance:
    def test_mode_frequencies_criterion(self):
        (result,) = run_criteria(quick=True, only=[2])
        assert result.status is CriterionStatus.PASSED, result.measured
        assert "z₋ peak=1.20" in result.measured

    def test_steady_current_criterion(self):
        (result,) = run_criteria(quick=True, only=[12])
        assert result.status is CriterionStatus.PASSED, result.measured

    @pytest.mark.slow
    @pytest.mark.parametrize("number", [4, 5])
    def test_chaotic_region_criteria(self, number):
        (result,) = run_criteria(quick=True, only=[number])
        assert result.status is CriterionStatus.PASSED, result.measured

    def test_flat_series_has_no_dominant_peak(self):
        times = np.linspace(0.0, 10.0, 101)
        with pytest.raises(DomainError):
            _dominant_peak(np.zeros_like(times), times)

    def test_raising_check_is_reported_as_failed(self):
        times = np.linspace(0.0, 10.0, 101)

        def flat(quick: bool):
            peak, _ = _dominant_peak(np.zeros_like(times), times)
            return f"{peak}", "-", True

        result = evaluate(Criterion(0, "Flat series", False, flat), quick=True)
        assert result.status is CriterionStatus.FAILED
        assert result.detail.startswith("DomainError")

    def test_full_only_criteria_are_skipped_in_quick_mode(self):
        (result,) = run_criteria(quick=True, only=[7])
        assert result.status is CriterionStatus.SKIPPED
