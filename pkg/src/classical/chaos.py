from __future__ import annotations

from typing import List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp

from classical.classical_types import DecorrelatorSeries, LyapunovResult, RegionSpec
from classical.constants import (
    DEFAULT_ATOL,
    DEFAULT_EPSILON,
    DEFAULT_RTOL,
    ENSEMBLE_BLOCK_SIZE,
    ESCAPE_TOL,
    INTEGRATOR_METHOD,
    LYAPUNOV_ATOL,
    LYAPUNOV_DISCARD,
    LYAPUNOV_RENORM_INTERVAL,
    LYAPUNOV_RTOL,
    LYAPUNOV_TOTAL_TIME,
)
from classical.integrate import draw_members, evolve_batch
from errors import DomainError, IntegratorError
from model import ModelParams, canonical_to_cartesian, cartesian_drift, cartesian_jacobian
from utils.accumulate import KahanSum
from utils.logger import LoggerFactory
from utils.parallel import map_blocks
from utils.seeding import block_slices, derive_rng

logger = LoggerFactory.get_logger(name="CLASSICAL_DYNAMICS")


def random_tangent(spins: NDArray, rng: np.random.Generator) -> NDArray:
    """Unit vectors orthogonal to each Bloch vector, drawn isotropically in the tangent plane.

    Args:
        spins (NDArray): Unit vectors of shape (..., 3).
        rng (np.random.Generator): Source of randomness.

    Returns:
        NDArray: Tangent unit vectors of the same shape.
    """
    draw = rng.standard_normal(spins.shape)
    draw -= np.sum(draw * spins, axis=-1, keepdims=True) * spins
    return draw / np.linalg.norm(draw, axis=-1, keepdims=True)


def rotate_about_axis(spins: NDArray, axes: NDArray, angle: float) -> NDArray:
    """Rotates unit vectors by ``angle`` about axes orthogonal to them."""
    return spins * np.cos(angle) + np.cross(axes, spins) * np.sin(angle)


def perturbed_copies(spins0: NDArray, epsilon: float, rng: np.random.Generator) -> NDArray:
    """Copy ``b`` of each member: every spin rotated by ``epsilon`` about a random orthogonal axis."""
    spins = spins0.reshape(-1, 2, 3)
    axes = random_tangent(spins, rng)
    return rotate_about_axis(spins, axes, epsilon).reshape(-1, 6)


def pair_decorrelation(spins_a: NDArray, spins_b: NDArray) -> NDArray:
    """``D_i = 1 - s_a·s_b`` evaluated as ``|s_a - s_b|²/2``; shape (..., 2)."""
    diff = (spins_a - spins_b).reshape(*spins_a.shape[:-1], 2, 3)
    return 0.5 * np.sum(diff**2, axis=-1)


def _decorrelator_block(
    spins_a: NDArray, spins_b: NDArray, params: ModelParams, times: NDArray, tol: float
) -> NDArray:
    both = evolve_batch(np.concatenate([spins_a, spins_b]), params, times, tol, DEFAULT_ATOL)
    n = spins_a.shape[0]
    return pair_decorrelation(both[:, :n], both[:, n:]).sum(axis=1)


def decorrelator(
    region: RegionSpec,
    params: ModelParams,
    t_grid: ArrayLike,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    tol: float = DEFAULT_RTOL,
    block_size: int = ENSEMBLE_BLOCK_SIZE,
) -> DecorrelatorSeries:
    """Ensemble-averaged decorrelator of paired trajectories.

    Every member is duplicated; in copy ``b`` each spin is rotated by
    ``epsilon`` about a random axis orthogonal to it. Both copies of a block
    are integrated in the same ODE system.

    Args:
        region (RegionSpec): Region the members are drawn from.
        params (ModelParams): Model couplings.
        t_grid (ArrayLike): Output times, starting at the perturbation time.
        epsilon (float): Rotation angle in radians.
        seed (int): Master seed.
        tol (float): Relative integrator tolerance.
        block_size (int): Members per parallel block.

    Returns:
        DecorrelatorSeries: ``D_1(t)`` and ``D_2(t)`` averaged over the members.
    """
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    times = np.asarray(t_grid, dtype=float)
    spins_a = canonical_to_cartesian(draw_members(region, params, seed, tag="classical/decorrelator-region"))
    spins_b = perturbed_copies(spins_a, epsilon, derive_rng(seed, "classical/decorrelator-axis"))

    blocks = block_slices(spins_a.shape[0], block_size)
    tasks = [(spins_a[block], spins_b[block], params, times, tol) for block in blocks]
    accumulator = KahanSum((times.size, 2))
    for partial, block in zip(map_blocks(_decorrelator_block, tasks, label="decorrelator blocks"), blocks):
        accumulator.add(partial, weight=block.stop - block.start)
    mean = accumulator.mean()
    return DecorrelatorSeries(
        times=times, D1=mean[:, 0], D2=mean[:, 1], epsilon=epsilon, ensemble_size=spins_a.shape[0]
    )


def _tangent_rhs(y: NDArray, params: ModelParams) -> NDArray:
    state = y.reshape(-1, 12)
    s, ds = state[:, :6], state[:, 6:]
    drift = cartesian_drift(s, params)
    tangent = np.einsum("nij,nj->ni", cartesian_jacobian(s, params), ds)
    return np.concatenate([drift, tangent], axis=1).ravel()


def _project_tangent(s: NDArray, ds: NDArray) -> NDArray:
    spins = s.reshape(-1, 2, 3)
    vectors = ds.reshape(-1, 2, 3)
    radial = np.sum(vectors * spins, axis=-1, keepdims=True) / np.sum(spins**2, axis=-1, keepdims=True)
    return (vectors - radial * spins).reshape(-1, 6)


def _lyapunov_block(
    spins0: NDArray,
    tangents0: NDArray,
    params: ModelParams,
    total_time: float,
    interval: float,
    discard: float,
) -> Tuple[NDArray, NDArray]:
    n = spins0.shape[0]
    s = spins0.copy()
    ds = _project_tangent(s, tangents0)
    ds /= np.linalg.norm(ds, axis=1, keepdims=True)
    log_sum = np.zeros(n)
    alive = np.ones(n, dtype=bool)

    n_steps = int(round(total_time / interval))
    for step in range(n_steps):
        t0 = step * interval
        y0 = np.concatenate([s, ds], axis=1)
        y0[~alive] = 0.0
        solution = solve_ivp(
            lambda _t, y: _tangent_rhs(y, params),
            (t0, t0 + interval),
            y0.ravel(),
            method=INTEGRATOR_METHOD,
            rtol=LYAPUNOV_RTOL,
            atol=LYAPUNOV_ATOL,
        )
        if not solution.success:
            raise IntegratorError(f"tangent integration failed at t={t0}: {solution.message}")
        y = solution.y[:, -1].reshape(n, 12)
        s, ds = y[:, :6], _project_tangent(y[:, :6], y[:, 6:])

        norms_s = np.linalg.norm(s.reshape(n, 2, 3), axis=-1)
        growth = np.linalg.norm(ds, axis=1)
        escaped = ~np.isfinite(growth) | np.any(np.abs(norms_s - 1.0) > ESCAPE_TOL, axis=1) | (growth <= 0.0)
        alive &= ~escaped

        if t0 + interval > discard:
            log_sum[alive] += np.log(growth[alive])
        safe = np.where(alive & (growth > 0.0), growth, 1.0)
        ds = ds / safe[:, None]
    return log_sum / (total_time - discard), alive


def lyapunov_exponent(
    region: RegionSpec,
    params: ModelParams,
    total_time: float = LYAPUNOV_TOTAL_TIME,
    renormalization_interval: float = LYAPUNOV_RENORM_INTERVAL,
    transient_discard: float = LYAPUNOV_DISCARD,
    seed: int = 0,
    block_size: int = ENSEMBLE_BLOCK_SIZE,
) -> LyapunovResult:
    """Maximal Lyapunov exponent by tangent-vector renormalization, averaged over an ensemble.

    Tangent vectors live in the tangent planes of the two spheres; the radial
    direction is neutral for the drift and excluded. The logarithmic growth is
    accumulated after ``transient_discard``. Members whose spins leave the unit
    sphere or become non-finite are discarded and counted.

    Raises:
        DomainError: If the integration time is shorter than ten renormalization intervals
            or does not exceed the discarded transient.
    """
    if total_time < 10.0 * renormalization_interval:
        raise DomainError("integration time must be at least 10 renormalization intervals")
    if total_time <= transient_discard:
        raise DomainError("integration time must exceed the discarded transient")

    spins0 = canonical_to_cartesian(draw_members(region, params, seed, tag="classical/lyapunov-region"))
    tangents0 = random_tangent(spins0.reshape(-1, 2, 3), derive_rng(seed, "classical/lyapunov-tangent")).reshape(-1, 6)

    blocks = block_slices(spins0.shape[0], block_size)
    tasks = [
        (spins0[block], tangents0[block], params, total_time, renormalization_interval, transient_discard)
        for block in blocks
    ]
    exponents: List[float] = []
    n_escaped = 0
    for values, alive in map_blocks(_lyapunov_block, tasks, label="Lyapunov blocks"):
        exponents.extend(values[alive].tolist())
        n_escaped += int(np.count_nonzero(~alive))
    if n_escaped:
        logger.warning(f"Discarded {n_escaped} escaped sample(s) from the Lyapunov ensemble")
    if not exponents:
        raise IntegratorError("every Lyapunov sample escaped")

    values = np.asarray(exponents)
    return LyapunovResult(
        Lambda_l=float(values.mean()),
        std=float(values.std()),
        exponents=exponents,
        transient_discard=transient_discard,
        renormalization_interval=renormalization_interval,
        total_time=total_time,
        n_escaped=n_escaped,
    )
