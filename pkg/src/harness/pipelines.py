from __future__ import annotations

import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from classical import (
    RegionSpec,
    Trajectory,
    atomic_current,
    conserved_R_series,
    draw_members,
    ensemble_mean,
    evolve_classical,
    evolve_ensemble,
    lyapunov_exponent,
    time_averaged_current,
)
from config import Config
from constants import PACKAGE_NAME
from errors import JunctionSimError
from harness.constants import MANIFEST_FILE, REDUCED_MAX_S, RUN_LOG_FILE, InitialKind, Scenario
from harness.harness_types import ExperimentConfig, FileRecord, ResultManifest, RunParams
from harness.presets import region_of
from harness.sweep import sweep, write_sweep
from hilbert import product_coherent_state, two_spin_operators
from model import (
    ClassicalState,
    ModelParams,
    Stability,
    bifurcation_diagram,
    canonical_to_cartesian,
    cartesian_to_canonical,
    fixed_points,
    phase_diagram,
)
from observables import (
    fourier_spectrum,
    husimi_q,
    phase_statistics,
    population_from_expectations,
    population_operators,
    purity,
    von_neumann_entropy,
)
from spectra import analyze_spectrum, sector_spectra
from trajectories import TrajectoryConfig, coherence_mass, ensemble_evolve
from twa import average_fluctuation, evolve_twa, fp4_dwell_time, sample_initial, twa_decorrelator
from utils.io import list_files, save_matrix, sha256, write_csv, write_json
from utils.logger import LoggerFactory
from utils.parallel import map_blocks, worker_count
from utils.seeding import derive_child_seed

logger = LoggerFactory.get_logger(name="HARNESS")

SEED_DERIVATION = "SeedSequence([master, blake2b-64(tag), index])"


class RunContext:
    """Result directory of one run: serialized writes plus the seed streams consumed."""

    def __init__(self, config: ExperimentConfig, directory: Path) -> None:
        self.config = config
        self.directory = directory
        self.streams: List[str] = []

    @property
    def params(self) -> ModelParams:
        return self.config.model

    @property
    def run(self) -> RunParams:
        return self.config.run

    def times(self) -> NDArray:
        return np.asarray(self.run.time_grid())

    def stream(self, tag: str, index: Optional[int] = None) -> int:
        """Records a stream tag; with ``index`` returns a derived child seed, else the master seed."""
        if index is None:
            self.streams.append(tag)
            return self.run.seed
        self.streams.append(f"{tag}[{index}]")
        return derive_child_seed(self.run.seed, tag, index)

    def csv(self, name: str, columns: Mapping[str, ArrayLike]) -> Path:
        path = write_csv(self.directory / name, columns)
        logger.info(f"Wrote {path.name}")
        return path

    def json(self, name: str, payload: Any) -> Path:
        path = write_json(self.directory / name, payload)
        logger.info(f"Wrote {path.name}")
        return path

    def matrix(self, name: str, data: ArrayLike, extra: Optional[Mapping[str, Any]] = None) -> Path:
        path = save_matrix(self.directory / name, data, self.params.S, extra=extra)
        logger.info(f"Wrote {path.name}")
        return path


def _fixed_point_rows(params: ModelParams) -> List[Dict[str, Any]]:
    return [point.model_dump() for point in fixed_points(params)]


def _grid_rows(ctx: RunContext, worker: Callable[..., Dict[str, Any]], label: str) -> List[Dict[str, Any]]:
    assert ctx.config.grid is not None
    points = list(ctx.config.grid.points())
    tasks = [(index, point, ctx.params, ctx.config, ctx.stream(label, index)) for index, point in enumerate(points)]
    return map_blocks(worker, tasks, label=label)


def _rows_to_columns(rows: List[Dict[str, Any]]) -> Dict[str, List[Any]]:
    return {name: [row[name] for row in rows] for name in rows[0]}


def _point_row(point: Dict[str, float], base: ModelParams) -> Dict[str, Any]:
    return {name: point.get(name, getattr(base, name)) for name in ("V", "gamma", "omega_z", "S")}


def _failed(row: Dict[str, Any], columns: List[str], error: Exception, label: str) -> Dict[str, Any]:
    logger.warning(f"{label} point {row} failed: {error}")
    row.update({name: np.nan for name in columns})
    row["error"] = f"{type(error).__name__}: {error}".replace(",", ";").replace("\n", " ")
    return row


def _lyapunov_point(
    index: int, point: Dict[str, float], base: ModelParams, config: ExperimentConfig, seed: int
) -> Dict[str, Any]:
    row = _point_row(point, base)
    run = config.run
    try:
        result = lyapunov_exponent(
            region_of(config),
            base.with_updates(**point),
            total_time=run.lyapunov_time,
            renormalization_interval=run.renormalization_interval,
            transient_discard=run.lyapunov_discard,
            seed=seed,
        )
    except (JunctionSimError, ValueError) as error:
        return _failed(row, ["Lambda_l", "std", "n_escaped"], error, "Lyapunov")
    row.update({"Lambda_l": result.Lambda_l, "std": result.std, "n_escaped": float(result.n_escaped), "error": ""})
    return row


def _nearest_attractor_distance(final: NDArray, params: ModelParams) -> NDArray:
    attractors = [
        point.location.to_cartesian() for point in fixed_points(params) if point.classification is Stability.ATTRACTOR
    ]
    if not attractors:
        return np.full(final.shape[0], np.nan)
    distances = np.linalg.norm(final[:, None, :] - np.asarray(attractors)[None, :, :], axis=-1)
    return distances.min(axis=1)


def _trajectory_outputs(ctx: RunContext, trajectory: Trajectory, center: ClassicalState) -> Dict[str, Any]:
    params, times = ctx.params, trajectory.times
    ctx.csv("trajectory.csv", trajectory.to_columns())
    current = atomic_current(trajectory, params)
    ctx.csv("current.csv", {"t": times, "j1": current[:, 0], "j2": current[:, 1]})
    summary: Dict[str, Any] = {
        "time_averaged_current": time_averaged_current(trajectory, params, t_min=0.5 * times[-1]),
    }
    if center.z1 == center.z2 and center.phi1 == center.phi2:
        try:
            R = conserved_R_series(trajectory.z_plus, trajectory.canonical[:, 1], params)
            ctx.csv("conserved_R.csv", {"t": times, "R": R})
            summary["R_relative_drift"] = float(np.max(np.abs(R - R[0])) / abs(R[0]))
        except JunctionSimError as error:
            logger.warning(f"Conserved quantity unavailable: {error}")
    spectrum = fourier_spectrum(trajectory.z_plus, times)
    ctx.csv("spectrum.csv", spectrum.to_columns())
    summary["z_plus_peaks"] = spectrum.peaks
    summary["resolution"] = spectrum.resolution
    return summary


def _classical(ctx: RunContext) -> None:
    params, run, times = ctx.params, ctx.run, ctx.times()
    ctx.json("fixed_points.json", _fixed_point_rows(params))
    if run.bifurcation_V:
        branches = bifurcation_diagram(params.gamma, run.bifurcation_V, params.J, params.omega_z)
        ctx.csv("bifurcation.csv", _rows_to_columns([branch.model_dump(mode="json") for branch in branches]))
    if ctx.config.grid is not None:
        ctx.csv("lyapunov_grid.csv", _rows_to_columns(_grid_rows(ctx, _lyapunov_point, "classical/lyapunov")))
        return
    if ctx.config.initial.kind is InitialKind.REGION:
        region = region_of(ctx.config)
        members = canonical_to_cartesian(draw_members(region, params, ctx.stream("classical/region")))
        spins = evolve_ensemble(members, params, times, tol=run.tol)
        final = spins[-1]
        canonical = cartesian_to_canonical(final)
        distance = _nearest_attractor_distance(final, params)
        ctx.csv(
            "ensemble_final.csv",
            {
                "member": np.arange(final.shape[0]),
                "z1": canonical[:, 0],
                "phi1": canonical[:, 1],
                "z2": canonical[:, 2],
                "phi2": canonical[:, 3],
                "distance": distance,
            },
        )
        mean = ensemble_mean(spins)
        columns: Dict[str, ArrayLike] = {"t": times}
        for index, name in enumerate(("s1x", "s1y", "s1z", "s2x", "s2y", "s2z")):
            columns[f"mean_{name}"] = mean[:, index]
        ctx.csv("ensemble_mean.csv", columns)
        ctx.csv("trajectory.csv", Trajectory(times=times, spins=spins[:, 0]).to_columns())
        ctx.json("summary.json", {"max_attractor_distance": float(np.max(distance)), "members": final.shape[0]})
        return
    center = ctx.config.initial.resolve(params)
    trajectory = evolve_classical(center, params, times, tol=run.tol)
    ctx.json("summary.json", _trajectory_outputs(ctx, trajectory, center))


def _symmetric_region(config: ExperimentConfig) -> RegionSpec:
    region = config.initial.region
    if region is not None and region.symmetric:
        return region
    return RegionSpec(symmetric=True, n_members=8)


def _twa_point(
    index: int, point: Dict[str, float], base: ModelParams, config: ExperimentConfig, seed: int
) -> Dict[str, Any]:
    run = config.run
    row = _point_row(point, base)
    columns = (["lambda_F", "lambda_D"] if run.rates else []) + (["dwell_time", "censored"] if run.dwell else [])
    times = np.asarray(run.time_grid())
    try:
        params = base.with_updates(**point)
        if run.rates:
            region = _symmetric_region(config)
            fluctuation = average_fluctuation(params, times, run.n_samples, run.dt, seed=seed, region=region)
            decorrelation = twa_decorrelator(params, times, region, run.epsilon, run.dt, seed=seed)
            row["lambda_F"] = np.nan if fluctuation.rate is None else fluctuation.rate
            row["lambda_D"] = np.nan if decorrelation.rate is None else decorrelation.rate
        if run.dwell:
            dwell = fp4_dwell_time(params, times, run.n_samples, run.dt, seed=seed)
            row["dwell_time"] = dwell.dwell_time
            row["censored"] = dwell.censored
    except (JunctionSimError, ValueError) as error:
        return _failed(row, columns, error, "TWA")
    row["error"] = ""
    return row


def _twa(ctx: RunContext) -> None:
    params, run, times = ctx.params, ctx.run, ctx.times()
    if ctx.config.grid is not None:
        ctx.csv("twa_grid.csv", _rows_to_columns(_grid_rows(ctx, _twa_point, "twa/point")))
        return
    center = ctx.config.initial.resolve(params)
    ensemble = sample_initial(center, params.S, run.n_samples, ctx.stream("twa/samples"))
    result = evolve_twa(ensemble, params, times, dt=run.dt, seed=ctx.stream("twa/noise"))
    ctx.csv("twa_mean.csv", result.to_columns())
    summary: Dict[str, Any] = {}
    if run.rates:
        region = _symmetric_region(ctx.config)
        centers_seed = ctx.stream("twa/centers")
        fluctuation = average_fluctuation(params, times, run.n_samples, run.dt, seed=centers_seed, region=region)
        ctx.csv("fluctuation.csv", fluctuation.to_columns())
        pairs_seed = ctx.stream("twa/decorrelator")
        decorrelation = twa_decorrelator(params, times, region, run.epsilon, run.dt, seed=pairs_seed)
        ctx.csv("decorrelator.csv", decorrelation.to_columns())
        summary.update({"lambda_F": fluctuation.rate, "lambda_D": decorrelation.rate})
    if run.dwell:
        dwell = fp4_dwell_time(params, times, run.n_samples, run.dt, seed=ctx.stream("twa/dwell"))
        summary["dwell"] = dwell.model_dump()
    ctx.json("summary.json", summary)


def _trajectory_operators(S: float) -> Dict[str, Any]:
    ops = two_spin_operators(S, use_sparse=True)
    operators: Dict[str, Any] = dict(population_operators(S, use_sparse=True))
    operators["z_plus"] = (ops.S1z + ops.S2z) / (2.0 * S)
    operators["z_minus"] = (ops.S1z - ops.S2z) / (2.0 * S)
    return operators


def _reduced_outputs(ctx: RunContext, times: NDArray, reduced: List[NDArray]) -> Dict[str, Any]:
    S, run = ctx.params.S, ctx.run
    rho1, rho2 = reduced
    entropy = [von_neumann_entropy(rho) for rho in (rho1, rho2)]
    purities = [purity(rho) for rho in (rho1, rho2)]
    ctx.csv("entropy.csv", {"t": times, "S1": entropy[0], "S2": entropy[1]})
    ctx.csv("purity.csv", {"t": times, "P1": purities[0], "P2": purities[1]})
    phases = [[phase_statistics(rho, S) for rho in stack] for stack in (rho1, rho2)]
    ctx.csv(
        "phase_fluct.csv",
        {
            "t": times,
            "var_phi1": [item.variance for item in phases[0]],
            "var_phi2": [item.variance for item in phases[1]],
            "mean_phi1": [item.mean for item in phases[0]],
            "mean_phi2": [item.mean for item in phases[1]],
        },
    )
    ctx.csv("coherence.csv", {"t": times, "C1": coherence_mass(rho1), "C2": coherence_mass(rho2)})
    if run.snapshot_times:
        indices = [int(np.argmin(np.abs(times - t))) for t in run.snapshot_times]
        ctx.matrix(
            "rho_snapshots.npz",
            np.stack([rho1[indices], rho2[indices]], axis=1),
            extra={"times": times[indices], "axes": "time, species, row, column"},
        )
    husimi = husimi_q(rho1[-1], S, grid=(run.husimi_grid[0], run.husimi_grid[1]))
    ctx.csv("husimi.csv", husimi.to_columns())
    return {
        "final_entropy": [float(item[-1]) for item in entropy],
        "final_purity": [float(item[-1]) for item in purities],
        "husimi_participation_ratio": husimi.participation_ratio(),
        "husimi_normalization": husimi.normalization(),
    }


def _quantum_trajectory(ctx: RunContext) -> None:
    params, run, times = ctx.params, ctx.run, ctx.times()
    center = ctx.config.initial.resolve(params)
    config = TrajectoryConfig(dt=run.dt, n_traj=run.n_traj, seed=ctx.stream("trajectories/jumps"))
    keep_reduced = params.S <= REDUCED_MAX_S
    result = ensemble_evolve(
        product_coherent_state(center, params.S),
        params,
        config,
        times,
        keep_rho=False,
        keep_reduced=keep_reduced,
        operators=_trajectory_operators(params.S),
    )
    populations = population_from_expectations(result.expectations, params.S, params.J)
    ctx.csv("z_plus.csv", {"t": times, "z_plus": populations.z_plus, "stderr": result.standard_error("z_plus")})
    ctx.csv(
        "z_minus.csv",
        {
            "t": times,
            "z_minus": populations.z_minus,
            "stderr": result.standard_error("z_minus"),
            "delta_z_minus": populations.delta_z_minus,
        },
    )
    ctx.csv("currents.csv", {"t": times, "j1": populations.current1, "j2": populations.current2})
    spectrum = fourier_spectrum(populations.z_plus, times)
    ctx.csv("spectrum.csv", spectrum.to_columns())
    classical = evolve_classical(center, params, times, tol=run.tol).canonical
    ctx.csv(
        "phase_portrait.csv",
        {
            "t": times,
            "z1": classical[:, 0],
            "phi1": classical[:, 1],
            "z2": classical[:, 2],
            "phi2": classical[:, 3],
            "quantum_z1": populations.z1,
            "quantum_z2": populations.z2,
        },
    )
    ctx.csv("single_trajectory.csv", {"t": times, **result.single_trajectory})
    summary: Dict[str, Any] = {
        "z_plus_peaks": spectrum.peaks,
        "resolution": spectrum.resolution,
        "mean_jump_rate": result.mean_jump_rate(),
        "n_traj": result.n_traj,
    }
    if result.reduced is not None:
        summary.update(_reduced_outputs(ctx, times, result.reduced))
    ctx.json("summary.json", summary)


def _liouvillian(ctx: RunContext) -> None:
    spectra = sector_spectra(ctx.params, sectors=tuple(ctx.run.sectors))
    records = [analyze_spectrum(eigenvalues, sector=parity) for parity, eigenvalues in spectra.items()]
    columns = [record.to_columns() for record in records]
    ctx.csv("spectrum.csv", {key: np.concatenate([part[key] for part in columns]) for key in ("re", "im", "sector")})
    ctx.csv(
        "spacings.csv",
        {
            "sector": np.concatenate([np.full(record.spacings.size, float(record.sector)) for record in records]),
            "spacing": np.concatenate([record.spacings for record in records]),
        },
    )
    ratios = np.concatenate([record.ratios for record in records])
    ctx.csv(
        "ratios.csv",
        {
            "sector": np.concatenate([np.full(record.ratios.size, float(record.sector)) for record in records]),
            "re": ratios.real,
            "im": ratios.imag,
        },
    )
    ctx.json("statistics.json", [record.summary() for record in records])


def _phase_diagram(ctx: RunContext) -> None:
    params, grid = ctx.params, ctx.config.grid
    gammas = (grid.gamma if grid is not None and grid.gamma else None) or [params.gamma]
    boundaries = phase_diagram(gammas, params.J)
    ctx.csv(
        "phase_boundaries.csv",
        {
            "gamma": [line.gamma for line in boundaries],
            "V_c": [line.V_c for line in boundaries],
            "V_tilde_c": [np.nan if line.V_tilde_c is None else line.V_tilde_c for line in boundaries],
        },
    )
    couplings = (grid.V if grid is not None and grid.V else None) or ctx.run.bifurcation_V
    rows: List[Dict[str, Any]] = []
    for gamma in gammas:
        for branch in bifurcation_diagram(gamma, couplings or [params.V], params.J, params.omega_z):
            rows.append({"gamma": gamma, **branch.model_dump(mode="json")})
    ctx.csv("fixed_point_map.csv", _rows_to_columns(rows))


PIPELINES: Dict[Scenario, Callable[[RunContext], None]] = {
    Scenario.CLASSICAL: _classical,
    Scenario.TWA: _twa,
    Scenario.QUANTUM_TRAJECTORY: _quantum_trajectory,
    Scenario.LIOUVILLIAN: _liouvillian,
    Scenario.PHASE_DIAGRAM: _phase_diagram,
}


def package_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "0+unknown"


def result_directory(config: ExperimentConfig, output_dir: Optional[str] = None) -> Path:
    chosen = output_dir or config.output_dir
    return Path(chosen) if chosen else Path(Config.get().output_root) / config.name


def _write_manifest(ctx: RunContext, started: float, status: str, error: Optional[str] = None) -> Path:
    files = [
        FileRecord(path=str(path.relative_to(ctx.directory)), sha256=sha256(path), bytes=path.stat().st_size)
        for path in list_files(ctx.directory, exclude=(MANIFEST_FILE, RUN_LOG_FILE))
    ]
    manifest = ResultManifest(
        config=ctx.config.model_dump(mode="json"),
        version=package_version(),
        files=files,
        wall_seconds=time.perf_counter() - started,
        workers=worker_count(),
        seed_lineage={"master": ctx.run.seed, "derivation": SEED_DERIVATION, "streams": ctx.streams},
        status=status,
        error=error,
    )
    return write_json(ctx.directory / MANIFEST_FILE, manifest.model_dump(mode="json"))


def _execute(config: ExperimentConfig, output_dir: Optional[str], body: Callable[[RunContext], None]) -> Path:
    """Runs ``body`` inside a fresh result directory and always leaves a manifest behind."""
    directory = result_directory(config, output_dir).resolve()
    directory.mkdir(parents=True, exist_ok=True)
    config = config.with_overrides(output_dir=str(directory))
    ctx = RunContext(config, directory)
    log_path = directory / RUN_LOG_FILE
    LoggerFactory.attach_file(log_path)
    started = time.perf_counter()
    try:
        logger.info(f"Running '{config.name}' ({config.scenario.value}) into {directory}")
        body(ctx)
    except Exception as error:
        logger.error(f"Run '{config.name}' failed: {error}")
        _write_manifest(ctx, started, "failed", f"{type(error).__name__}: {error}")
        raise
    else:
        _write_manifest(ctx, started, "completed")
        logger.info(f"Run '{config.name}' completed in {time.perf_counter() - started:.1f} s")
    finally:
        LoggerFactory.detach_file(log_path)
    return directory


def run(config: ExperimentConfig, output_dir: Optional[str] = None) -> Path:
    """Dispatches ``config`` to its scenario pipeline.

    Args:
        config (ExperimentConfig): Validated experiment.
        output_dir (Optional[str]): Overrides ``config.output_dir`` and the
            ``<output_root>/<name>`` default.

    Returns:
        Path: The result directory, holding the data files, ``run.log`` and ``manifest.json``.
    """
    return _execute(config, output_dir, PIPELINES[config.scenario])


def run_sweep(config: ExperimentConfig, output_dir: Optional[str] = None) -> Path:
    """Regime classification over ``config.grid`` written to ``sweep.csv``."""

    def body(ctx: RunContext) -> None:
        ctx.streams.append("sweep/point[*]")
        rows = sweep(ctx.config)
        write_sweep(rows, ctx.directory)
        logger.info(f"Wrote {len(rows)} sweep row(s)")

    return _execute(config, output_dir, body)
