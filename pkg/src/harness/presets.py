"""Named experiment configurations, one per reproduced figure."""

from __future__ import annotations

import math
from typing import Any, Callable, Dict, List

from classical import RegionSpec
from errors import ConfigError
from harness.harness_types import ExperimentConfig

PRESET_SEED = 20240101

_FULL_REGION = {"z_min": -0.95, "z_max": 0.95, "phi_min": -math.pi, "phi_max": math.pi}


def _fig2() -> Dict[str, Any]:
    return {
        "name": "fig2",
        "scenario": "quantum-trajectory",
        "model": {"V": 0.5, "gamma": 0.2, "S": 50},
        "initial": {"kind": "coherent", "z1": 0.2, "phi1": 0.0, "z2": 0.2, "phi2": 0.0},
        "run": {"seed": PRESET_SEED, "t_max": 100.0, "output_dt": 0.1, "dt": 2e-3, "n_traj": 200},
    }


def _fig3() -> Dict[str, Any]:
    return {
        "name": "fig3",
        "scenario": "classical",
        "model": {"V": 1.7, "gamma": 0.2, "S": 10},
        "initial": {"kind": "region", "region": {**_FULL_REGION, "n_members": 50}},
        "run": {
            "seed": PRESET_SEED,
            "t_max": 500.0,
            "output_dt": 0.5,
            "bifurcation_V": [round(0.05 * index, 2) for index in range(61)],
        },
    }


def _fig4(omega_z: float, name: str) -> Dict[str, Any]:
    return {
        "name": name,
        "scenario": "quantum-trajectory",
        "model": {"V": 1.7, "gamma": 0.2, "omega_z": omega_z, "S": 10},
        "initial": {"kind": "coherent", "z1": 0.6, "phi1": 0.0, "z2": -0.2, "phi2": 0.5},
        "run": {
            "seed": PRESET_SEED,
            "t_max": 200.0,
            "output_dt": 0.5,
            "dt": 2e-3,
            "n_traj": 500,
            "snapshot_times": [0.0, 10.0, 20.0, 50.0, 100.0, 200.0],
        },
    }


def _fig_s1() -> Dict[str, Any]:
    return {
        "name": "figS1",
        "scenario": "twa",
        "model": {"gamma": 0.2, "S": 1000},
        "initial": {"kind": "region", "region": {"z_min": -0.8, "z_max": 0.8, "n_members": 8, "symmetric": True}},
        "run": {"seed": PRESET_SEED, "t_max": 40.0, "output_dt": 0.2, "dt": 1e-3, "n_samples": 500},
        "grid": {"V": [0.2, 0.4, 0.6, 0.8, 1.0, 1.3, 1.5, 1.7, 2.0, 2.5]},
    }


def _fig_s2() -> Dict[str, Any]:
    return {
        "name": "figS2",
        "scenario": "twa",
        "model": {"V": 1.2, "gamma": 0.2},
        "initial": {"kind": "fixed-point", "family": "FP-IV", "branch": 1},
        "run": {
            "seed": PRESET_SEED,
            "t_max": 200.0,
            "output_dt": 0.5,
            "dt": 1e-3,
            "n_samples": 500,
            "dwell": True,
            "rates": False,
        },
        "grid": {"S": [50, 100, 200, 500, 1000, 2000]},
    }


def _fig_s3() -> Dict[str, Any]:
    return {
        "name": "figS3",
        "scenario": "classical",
        "model": {"gamma": 0.2, "S": 10},
        "initial": {"kind": "region", "region": {**_FULL_REGION, "n_members": 16}},
        "run": {"seed": PRESET_SEED, "t_max": 200.0, "output_dt": 1.0, "lyapunov_time": 1000.0},
        "grid": {
            "omega_z": [round(0.1 * index, 1) for index in range(11)],
            "V": [round(0.2 * index, 1) for index in range(1, 16)],
        },
    }


def _fig_s5(V: float, omega_z: float, name: str) -> Dict[str, Any]:
    return {
        "name": name,
        "scenario": "liouvillian",
        "model": {"V": V, "gamma": 0.2, "omega_z": omega_z, "S": 5},
        "run": {"seed": PRESET_SEED, "sectors": [1]},
    }


def _phase_diagram() -> Dict[str, Any]:
    return {
        "name": "phase_diagram",
        "scenario": "phase-diagram",
        "model": {"S": 10},
        "initial": {"kind": "region", "region": {**_FULL_REGION, "n_members": 16}},
        "run": {"seed": PRESET_SEED, "t_max": 200.0, "output_dt": 0.5, "lyapunov_time": 500.0},
        "grid": {
            "gamma": [round(0.1 * index, 1) for index in range(10)],
            "V": [round(0.25 * index, 2) for index in range(13)],
        },
    }


PRESETS: Dict[str, Callable[[], Dict[str, Any]]] = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4_left": lambda: _fig4(0.0, "fig4_left"),
    "fig4_right": lambda: _fig4(0.5, "fig4_right"),
    "figS1": _fig_s1,
    "figS2": _fig_s2,
    "figS3": _fig_s3,
    "figS5_oscillatory": lambda: _fig_s5(0.5, 0.0, "figS5_oscillatory"),
    "figS5_transient": lambda: _fig_s5(1.7, 0.0, "figS5_transient"),
    "figS5_steady": lambda: _fig_s5(1.7, 0.5, "figS5_steady"),
    "phase_diagram": _phase_diagram,
}

DESCRIPTIONS: Dict[str, str] = {
    "fig2": "Synchronized oscillations, S=50 trajectories at V=0.5, γ=0.2",
    "fig3": "Dissipative attractor and bifurcation diagram at V=1.7",
    "fig4_left": "Transient chaos and coherence recovery, S=10, V=1.7",
    "fig4_right": "Steady-state chaos with tilt ω_z=0.5, S=10, V=1.7",
    "figS1": "TWA fluctuation and decorrelator rates across V, S=1000",
    "figS2": "FP-IV dwell time versus S (TWA)",
    "figS3": "Classical Lyapunov exponent over the (ω_z, V) grid",
    "figS5_oscillatory": "Liouvillian spectrum, oscillatory regime, S=5",
    "figS5_transient": "Liouvillian spectrum, transient chaos, S=5",
    "figS5_steady": "Liouvillian spectrum, steady-state chaos, S=5",
    "phase_diagram": "Phase boundaries V_c(γ), Ṽ_c(γ) and regime sweep over (γ, V)",
}


def preset_names() -> List[str]:
    return list(PRESETS)


def load_preset(name: str) -> ExperimentConfig:
    """Builds the named preset.

    Raises:
        ConfigError: If no preset has that name.
    """
    builder = PRESETS.get(name)
    if builder is None:
        raise ConfigError(f"Unknown preset '{name}'", [f"available: {', '.join(PRESETS)}"])
    return ExperimentConfig.parse(builder(), source=f"preset {name}")


def region_of(config: ExperimentConfig) -> RegionSpec:
    """The ensemble region of a config, or the full-sphere default."""
    if config.initial.region is not None:
        return config.initial.region
    return RegionSpec(**_FULL_REGION)
