from __future__ import annotations

from typing import List, Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from classical import RegionSpec, growth_rate, pair_decorrelation, random_tangent, sample_region
from classical.chaos import rotate_about_axis
from classical.constants import DEFAULT_EPSILON
from errors import DomainError, FitError
from model import ClassicalState, Family, ModelParams, analytic_fixed_points
from twa.constants import DWELL_THRESHOLD, MAX_DT, SAMPLE_BLOCK_SIZE
from twa.sampling import sample_initial
from twa.stochastic import evolve_twa, run_blocks
from twa.twa_types import DwellResult, FluctuationSeries, TwaDecorrelator, TwaResult
from utils.accumulate import KahanSum
from utils.logger import LoggerFactory
from utils.seeding import derive_child_seed, derive_rng

logger = LoggerFactory.get_logger(name="TWA")

SYMMETRIC_REGION = RegionSpec(symmetric=True, n_members=8)


def fluctuation_measure(
    results: Union[TwaResult, Sequence[TwaResult]], fit: bool = True
) -> FluctuationSeries:
    """Fluctuation measure ``F = Σ_a (Δs_-a)²`` averaged over runs.

    Args:
        results (Union[TwaResult, Sequence[TwaResult]]): One run per symmetric-class centre.
        fit (bool): Fit the growth rate ``λ_F``.

    Returns:
        FluctuationSeries: ``F̄(t)``, its components and the optional fit.

    Raises:
        FitError: If ``fit`` is set and the fit window holds non-positive values.
    """
    runs = [results] if isinstance(results, TwaResult) else list(results)
    if not runs:
        raise DomainError("fluctuation measure needs at least one run")
    accumulator = KahanSum(runs[0].minus_variance.shape)
    for run in runs:
        accumulator.add(np.clip(run.minus_variance, 0.0, None))
    components = accumulator.mean()
    F = components.sum(axis=1)
    growth = growth_rate(F, runs[0].times, label="F") if fit else None
    return FluctuationSeries(
        times=runs[0].times, F=F, components=components, n_centers=len(runs), fit=growth
    )


def average_fluctuation(
    params: ModelParams,
    t_grid: ArrayLike,
    n_samples: int = 500,
    dt: float = MAX_DT,
    seed: int = 0,
    region: RegionSpec = SYMMETRIC_REGION,
    fit: bool = True,
) -> FluctuationSeries:
    """``F̄(t)`` over TWA runs started from random centres of the symmetric class."""
    if not region.symmetric:
        raise DomainError("fluctuation measure is defined for symmetric-class centres")
    centers = sample_region(region, seed, tag="twa/centers")
    runs: List[TwaResult] = []
    for index, center in enumerate(centers):
        child = derive_child_seed(seed, "twa/center", index)
        ensemble = sample_initial(ClassicalState.from_array(center), params.S, n_samples, child)
        runs.append(evolve_twa(ensemble, params, t_grid, dt=dt, seed=child))
    return fluctuation_measure(runs, fit=fit)


def antisymmetric_copies(spins: NDArray, epsilon: float, rng: np.random.Generator) -> NDArray:
    """Copy ``b``: spin 1 rotated by +ε and spin 2 by -ε about one axis orthogonal to their mean."""
    pairs = spins.reshape(-1, 2, 3)
    mean = pairs.mean(axis=1)
    mean /= np.linalg.norm(mean, axis=-1, keepdims=True)
    axes = random_tangent(mean, rng)
    rotated = np.stack(
        [rotate_about_axis(pairs[:, 0], axes, epsilon), rotate_about_axis(pairs[:, 1], axes, -epsilon)], axis=1
    )
    return rotated / np.linalg.norm(rotated, axis=-1, keepdims=True)


def twa_decorrelator(
    params: ModelParams,
    t_grid: ArrayLike,
    region: RegionSpec = SYMMETRIC_REGION,
    epsilon: float = DEFAULT_EPSILON,
    dt: float = MAX_DT,
    seed: int = 0,
    block_size: int = SAMPLE_BLOCK_SIZE,
) -> TwaDecorrelator:
    """Decorrelator of paired TWA samples driven by common noise.

    One Wigner sample is drawn around each region centre; its partner is
    displaced antisymmetrically by ``epsilon``. Both copies consume the same
    noise increments, so ``D`` grows only through the dynamics.

    Returns:
        TwaDecorrelator: ``D_i(t)`` and ``λ_D``; the fit is None when no growth window exists.
    """
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    times = np.asarray(t_grid, dtype=float)
    centers = sample_region(region, seed, tag="twa/decorrelator-centers")

    rng = derive_rng(seed, "twa/decorrelator-initial")
    width = 1.0 / np.sqrt(2.0 * params.S)
    spins_a = []
    for center in centers:
        state = ClassicalState.from_array(center)
        kicks = rng.standard_normal((2, 3)) * width
        base = state.to_cartesian().reshape(2, 3)
        kicks -= np.sum(kicks * base, axis=-1, keepdims=True) * base
        moved = base + kicks
        spins_a.append((moved / np.linalg.norm(moved, axis=-1, keepdims=True)).ravel())
    spins_a = np.asarray(spins_a)
    spins_b = antisymmetric_copies(spins_a, epsilon, derive_rng(seed, "twa/decorrelator-axis")).reshape(-1, 6)

    paired = np.stack([spins_a, spins_b], axis=1)
    parts = run_blocks(paired, params, dt, times, seed, block_size)
    accumulator = KahanSum((times.size, 2))
    for records in parts:
        accumulator.add(pair_decorrelation(records[:, :, 0], records[:, :, 1]).sum(axis=1), weight=records.shape[1])
    D = accumulator.mean()

    fit = None
    try:
        fit = growth_rate(D.mean(axis=1), times, label="D")
    except FitError as error:
        logger.info(f"No decorrelator growth fit at V={params.V}: {error}")
    return TwaDecorrelator(
        times=times, D1=D[:, 0], D2=D[:, 1], epsilon=epsilon, ensemble_size=spins_a.shape[0], fit=fit
    )


def fp4_dwell_time(
    params: ModelParams,
    t_grid: ArrayLike,
    n_samples: int = 500,
    dt: float = MAX_DT,
    seed: int = 0,
    threshold: float = DWELL_THRESHOLD,
    center: Optional[ClassicalState] = None,
) -> DwellResult:
    """Time for which a TWA ensemble started at FP-IV keeps ``|<s_-z>| > threshold``.

    Args:
        params (ModelParams): Model couplings with ``V² + γ² > J²`` and no tilt.
        t_grid (ArrayLike): Output times.
        n_samples (int): Wigner samples.
        dt (float): Step size.
        seed (int): Master seed.
        threshold (float): Imbalance-memory threshold.
        center (Optional[ClassicalState]): Override of the starting point.

    Returns:
        DwellResult: The dwell time, censored at the last grid time.
    """
    if center is None:
        branches = [fp for fp in analytic_fixed_points(params) if fp.family == Family.FP_IV and fp.branch == 1]
        if not branches:
            raise DomainError(f"FP-IV does not exist at V={params.V}, gamma={params.gamma}")
        center = branches[0].location
    ensemble = sample_initial(center, params.S, n_samples, seed)
    result = evolve_twa(ensemble, params, t_grid, dt=dt, seed=seed)

    memory = np.abs(result.minus_mean[:, 2])
    lost = np.nonzero(memory < threshold)[0]
    censored = lost.size == 0
    dwell = float(result.times[-1] if censored else result.times[lost[0]])
    return DwellResult(S=params.S, dwell_time=dwell, censored=censored, initial_minus_z=float(result.minus_mean[0, 2]))
