from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from classical import RegionSpec, decorrelator, growth_rate, lyapunov_exponent
from errors import ConfigError, JunctionSimError
from harness.constants import (
    EARLY_GROWTH_THRESHOLD,
    GRID_AXES,
    LYAPUNOV_CHAOS_THRESHOLD,
    SWEEP_FILE,
    DynamicalRegime,
)
from harness.harness_types import ExperimentConfig, RunParams
from harness.presets import region_of
from model import ModelParams, Stability, critical_coupling, fixed_points
from utils.io import write_csv
from utils.logger import LoggerFactory
from utils.parallel import map_blocks
from utils.seeding import derive_child_seed

logger = LoggerFactory.get_logger(name="HARNESS")

SWEEP_STREAM = "sweep/point"
MEASUREMENT_COLUMNS = ("V_c", "n_attractors", "Lambda_l", "Lambda_std", "early_rate")


def classify_point(measurements: Mapping[str, Any]) -> DynamicalRegime:
    """Regime label from stored measurements alone.

    A positive long-time Lyapunov exponent means steady-state chaos. Otherwise
    an attractor with early exponential decorrelation is transient chaos, an
    attractor without it is self-trapping, and no attractor at all leaves the
    oscillatory regime.
    """
    if float(measurements["Lambda_l"]) > LYAPUNOV_CHAOS_THRESHOLD:
        return DynamicalRegime.STEADY_STATE_CHAOS
    if int(measurements["n_attractors"]) > 0:
        early = float(measurements.get("early_rate", math.nan))
        if not math.isnan(early) and early > EARLY_GROWTH_THRESHOLD:
            return DynamicalRegime.TRANSIENT_CHAOS
        return DynamicalRegime.SELF_TRAPPED
    return DynamicalRegime.OSCILLATORY


def measure_point(params: ModelParams, region: RegionSpec, run: RunParams, seed: int) -> Dict[str, float]:
    """Fixed-point census, long-time Lyapunov exponent and early decorrelator rate at one point.

    The decorrelator is only integrated when an attractor exists and the
    Lyapunov exponent does not already decide the regime; its rate is NaN
    otherwise.
    """
    try:
        V_c = critical_coupling(params)
    except JunctionSimError:
        V_c = math.nan
    n_attractors = sum(1 for point in fixed_points(params) if point.classification is Stability.ATTRACTOR)
    lyapunov = lyapunov_exponent(
        region,
        params,
        total_time=run.lyapunov_time,
        renormalization_interval=run.renormalization_interval,
        transient_discard=run.lyapunov_discard,
        seed=derive_child_seed(seed, "sweep/lyapunov"),
    )
    early_rate = math.nan
    if n_attractors > 0 and lyapunov.Lambda_l <= LYAPUNOV_CHAOS_THRESHOLD:
        times = np.asarray(run.time_grid())
        child = derive_child_seed(seed, "sweep/decorrelator")
        series = decorrelator(region, params, times, epsilon=run.epsilon, seed=child)
        early_rate = growth_rate(series.mean, series.times, label="decorrelator").rate
    return {
        "V_c": V_c,
        "n_attractors": float(n_attractors),
        "Lambda_l": lyapunov.Lambda_l,
        "Lambda_std": lyapunov.std,
        "early_rate": early_rate,
    }


def _sweep_point(
    index: int, point: Dict[str, float], base: ModelParams, region: RegionSpec, run: RunParams
) -> Dict[str, Any]:
    row: Dict[str, Any] = {name: point.get(name, getattr(base, name)) for name in GRID_AXES}
    try:
        params = base.with_updates(**point)
        measurements = measure_point(params, region, run, derive_child_seed(run.seed, SWEEP_STREAM, index))
        row.update(measurements)
        row["regime"] = classify_point(measurements).value
        row["error"] = ""
    except (JunctionSimError, ValueError, ArithmeticError) as error:
        logger.warning(f"Sweep point {index} {point} failed: {error}")
        row.update({name: math.nan for name in MEASUREMENT_COLUMNS})
        row["regime"] = ""
        row["error"] = f"{type(error).__name__}: {error}".replace(",", ";").replace("\n", " ")
    return row


def sweep(config: ExperimentConfig, n_jobs: Optional[int] = None) -> List[Dict[str, Any]]:
    """Classifies every point of ``config.grid``, one row per point in grid order.

    Points run in parallel; each derives its seed from ``(seed, "sweep/point", index)``.
    Failures are recorded in the ``error`` column and never stop the sweep.

    Raises:
        ConfigError: If the config has no grid.
    """
    if config.grid is None:
        raise ConfigError("sweep needs a 'grid' section", ["grid: field required for sweep"])
    region = region_of(config)
    points = list(config.grid.points())
    logger.info(f"Sweeping {len(points)} point(s) over {', '.join(config.grid.axes())}")
    rows = map_blocks(
        _sweep_point,
        [(index, point, config.model, region, config.run) for index, point in enumerate(points)],
        n_jobs=n_jobs,
        label="sweep points",
    )
    failed = sum(1 for row in rows if row["error"])
    if failed:
        logger.warning(f"{failed} of {len(rows)} sweep point(s) failed")
    return rows


def reclassify(rows: List[Mapping[str, Any]]) -> List[str]:
    """Labels recomputed from stored measurements; failed rows map to ''."""
    return ["" if row.get("error") else classify_point(row).value for row in rows]


def write_sweep(rows: List[Dict[str, Any]], directory: Path) -> Path:
    columns = [*GRID_AXES, *MEASUREMENT_COLUMNS, "regime", "error"]
    return write_csv(directory / SWEEP_FILE, {name: [row[name] for row in rows] for name in columns})
