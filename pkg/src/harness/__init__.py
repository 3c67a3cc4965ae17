from harness.constants import CriterionStatus, DynamicalRegime, InitialKind, Scenario
from harness.harness_types import (
    CriterionResult,
    ExperimentConfig,
    FileRecord,
    GridAxes,
    InitialStateSpec,
    ResultManifest,
    RunParams,
)
from harness.pipelines import RunContext, package_version, result_directory, run, run_sweep
from harness.presets import DESCRIPTIONS, PRESETS, load_preset, preset_names, region_of
from harness.sweep import classify_point, measure_point, reclassify, sweep, write_sweep
from harness.verify import CRITERIA, Criterion, all_passed, evaluate, render, run_criteria

__all__ = [
    "CRITERIA",
    "Criterion",
    "CriterionResult",
    "CriterionStatus",
    "DESCRIPTIONS",
    "DynamicalRegime",
    "ExperimentConfig",
    "FileRecord",
    "GridAxes",
    "InitialKind",
    "InitialStateSpec",
    "PRESETS",
    "ResultManifest",
    "RunContext",
    "RunParams",
    "Scenario",
    "all_passed",
    "classify_point",
    "evaluate",
    "load_preset",
    "measure_point",
    "package_version",
    "preset_names",
    "reclassify",
    "region_of",
    "render",
    "result_directory",
    "run",
    "run_criteria",
    "run_sweep",
    "sweep",
    "write_sweep",
]
