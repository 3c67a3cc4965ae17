from __future__ import annotations

from typing import List, Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp

from classical.classical_types import RegionSpec, Trajectory
from classical.constants import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    ENSEMBLE_BLOCK_SIZE,
    INTEGRATOR_METHOD,
    ISLAND_IMBALANCE,
    ISLAND_OVERSAMPLING,
    ISLAND_SCREEN_SAMPLES,
    ISLAND_SCREEN_TIME,
)
from errors import EmptyRegionError, IntegratorError, PoleError
from model import (
    ClassicalState,
    ModelParams,
    Representation,
    canonical_rhs,
    canonical_to_cartesian,
    cartesian_drift,
)
from utils.accumulate import KahanSum
from utils.logger import LoggerFactory
from utils.parallel import map_blocks
from utils.seeding import block_slices, derive_rng

logger = LoggerFactory.get_logger(name="CLASSICAL_DYNAMICS")

InitialState = Union[ClassicalState, ArrayLike]


def _check_grid(t_grid: ArrayLike) -> NDArray:
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0.0):
        raise ValueError("t_grid must be a strictly increasing 1-D grid with at least two points")
    return times


def _initial_spins(x0: InitialState) -> NDArray:
    if isinstance(x0, ClassicalState):
        return x0.to_cartesian()
    spins = np.asarray(x0, dtype=float)
    if spins.shape[-1] == 4:
        return canonical_to_cartesian(spins)
    if spins.shape[-1] != 6:
        raise ValueError(f"initial state must have 4 canonical or 6 Cartesian components, got {spins.shape}")
    return spins


_SPIN_SWAP = np.array([3, 4, 5, 0, 1, 2])
_CANONICAL_SWAP = np.array([2, 3, 0, 1])


def _species_flipped(spins0: NDArray) -> bool:
    # integration always runs with the lexicographically smaller species first
    return tuple(spins0[3:]) < tuple(spins0[:3])


def _solve(fun, y0: NDArray, times: NDArray, rtol: float, atol: float) -> NDArray:
    solution = solve_ivp(
        fun,
        (times[0], times[-1]),
        y0,
        method=INTEGRATOR_METHOD,
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not solution.success:
        raise IntegratorError(f"{INTEGRATOR_METHOD} failed: {solution.message}")
    return solution.y.T


def _evolve_canonical(x0: NDArray, params: ModelParams, times: NDArray, rtol: float, atol: float) -> NDArray:
    values = _solve(lambda _t, y: canonical_rhs(y, params), x0, times, rtol, atol)
    return canonical_to_cartesian(values)


def evolve_classical(
    x0: InitialState,
    params: ModelParams,
    t_grid: ArrayLike,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    chart: Representation = Representation.CARTESIAN,
) -> Trajectory:
    """Integrates the mean-field equations of motion.

    The Cartesian Bloch chart is used by default because it has no poles. The
    canonical chart can be requested for cross-checks; if it hits a pole or the
    integrator gives up, the run is repeated in the Cartesian chart and the
    switch is logged. The species are integrated in a fixed canonical order and
    swapped back afterwards, so exchanging the species of ``x0`` exchanges
    them in the result bit for bit.

    Args:
        x0 (InitialState): A ``ClassicalState`` or a 4-component canonical / 6-component Cartesian array.
        params (ModelParams): Model couplings.
        t_grid (ArrayLike): Strictly increasing output times.
        tol (float): Relative tolerance of the adaptive integrator.
        atol (float): Absolute tolerance of the adaptive integrator.
        chart (Representation): Chart to integrate in.

    Returns:
        Trajectory: Spins sampled on ``t_grid``.

    Raises:
        IntegratorError: If the Cartesian integration fails.
    """
    times = _check_grid(t_grid)
    spins0 = _initial_spins(x0)
    flipped = _species_flipped(spins0)
    order = _SPIN_SWAP if flipped else np.arange(6)

    if chart == Representation.CANONICAL:
        canonical0 = (
            x0.as_array() if isinstance(x0, ClassicalState) else ClassicalState.from_cartesian(spins0).as_array()
        )
        if flipped:
            canonical0 = canonical0[_CANONICAL_SWAP]
        try:
            spins = _evolve_canonical(canonical0, params, times, tol, atol)
            return Trajectory(times=times, spins=spins[:, order], representation=Representation.CANONICAL)
        except (PoleError, IntegratorError) as error:
            logger.warning(f"Canonical chart failed ({error}); switching to the Cartesian chart")

    spins = _solve(lambda _t, y: cartesian_drift(y, params), spins0[order], times, tol, atol)
    return Trajectory(times=times, spins=spins[:, order], representation=Representation.CARTESIAN)


def _ensemble_drift(y: NDArray, params: ModelParams) -> NDArray:
    return cartesian_drift(y.reshape(-1, 6), params).ravel()


def evolve_batch(
    spins0: NDArray,
    params: ModelParams,
    t_grid: ArrayLike,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> NDArray:
    """Integrates several Cartesian initial states in one ODE system.

    Returns:
        NDArray: Spins of shape (n_times, n_members, 6).
    """
    times = _check_grid(t_grid)
    spins0 = np.asarray(spins0, dtype=float).reshape(-1, 6)
    values = _solve(lambda _t, y: _ensemble_drift(y, params), spins0.ravel(), times, tol, atol)
    return values.reshape(times.size, spins0.shape[0], 6)


def evolve_ensemble(
    spins0: NDArray,
    params: ModelParams,
    t_grid: ArrayLike,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    block_size: int = ENSEMBLE_BLOCK_SIZE,
) -> NDArray:
    """Evolves an ensemble in fixed-size blocks, in parallel across blocks.

    Block boundaries depend only on the ensemble size, so the result is the
    same for any worker count.
    """
    spins0 = np.asarray(spins0, dtype=float).reshape(-1, 6)
    blocks = block_slices(spins0.shape[0], block_size)
    tasks = [(spins0[block], params, t_grid, tol, atol) for block in blocks]
    parts = map_blocks(evolve_batch, tasks, label="classical blocks")
    return np.concatenate(parts, axis=1)


def sample_region(region: RegionSpec, seed: int, tag: str = "classical/region") -> NDArray:
    """Draws ``region.n_members`` canonical states uniformly from ``region``.

    Returns:
        NDArray: Canonical states of shape (n_members, 4).
    """
    rng = derive_rng(seed, tag)
    n = region.n_members
    columns = 1 if region.symmetric else 2
    z = rng.uniform(region.z_min, region.z_max, size=(n, columns))
    phi = rng.uniform(region.phi_min, region.phi_max, size=(n, columns))
    if region.symmetric:
        z = np.repeat(z, 2, axis=1)
        phi = np.repeat(phi, 2, axis=1)
    return np.stack([z[:, 0], phi[:, 0], z[:, 1], phi[:, 1]], axis=-1)


def island_mask(
    spins0: NDArray,
    params: ModelParams,
    screen_time: float = ISLAND_SCREEN_TIME,
    threshold: float = ISLAND_IMBALANCE,
) -> NDArray:
    """Flags members trapped on the regular orbits around the FP-IV centers.

    Each member is evolved to ``screen_time``; it is self-trapped when the mean
    of ``z₋ = (s1z - s2z)/2`` over the second half of that interval exceeds
    ``threshold`` in magnitude. Members relaxing to FP-III, or still chaotic,
    average ``z₋`` to about zero.

    Args:
        spins0 (NDArray): Cartesian initial states, shape (n_members, 6).
        params (ModelParams): Model couplings.
        screen_time (float): Integration time of the screen.
        threshold (float): Minimum mean antiferromagnetic imbalance of a trapped member.

    Returns:
        NDArray: Boolean mask, True for self-trapped members.
    """
    times = np.concatenate([[0.0], np.linspace(0.5 * screen_time, screen_time, ISLAND_SCREEN_SAMPLES)])
    spins = evolve_ensemble(spins0, params, times)[1:]
    z_minus = 0.5 * (spins[..., 2] - spins[..., 5])
    return np.abs(z_minus.mean(axis=0)) > threshold


def draw_members(region: RegionSpec, params: ModelParams, seed: int, tag: str = "classical/region") -> NDArray:
    """Canonical ensemble members of ``region`` for the flow at ``params``.

    Without ``region.exclude_islands`` this is ``sample_region``. Otherwise
    ``ISLAND_OVERSAMPLING`` times as many candidates are drawn, self-trapped ones
    are rejected with ``island_mask`` and the first ``n_members`` survivors are
    kept, so the result is a pure function of the seed.

    Raises:
        EmptyRegionError: If fewer than ``n_members`` candidates lie in the chaotic region.
    """
    if not region.exclude_islands:
        return sample_region(region, seed, tag)
    wanted = region.n_members
    candidates = sample_region(region.model_copy(update={"n_members": ISLAND_OVERSAMPLING * wanted}), seed, tag)
    trapped = island_mask(canonical_to_cartesian(candidates), params)
    kept = candidates[~trapped]
    logger.info(f"Island screen rejected {int(trapped.sum())} of {trapped.size} candidates at V={params.V}")
    if kept.shape[0] < wanted:
        raise EmptyRegionError(f"only {kept.shape[0]} of {wanted} requested members lie in the chaotic region")
    return kept[:wanted]


def _symmetric_drift(s: NDArray, params: ModelParams) -> NDArray:
    return cartesian_drift(np.concatenate([s, s], axis=-1), params)[..., :3]


def evolve_symmetric(
    z_plus: float,
    phi_plus: float,
    params: ModelParams,
    t_grid: ArrayLike,
    tol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Trajectory:
    """Integrates the reduced single-spin flow of the symmetric dynamical class.

    With ``z1 = z2`` and ``φ1 = φ2`` the two species move as one top with a
    self-interaction ``V s_z``; the returned trajectory duplicates it into both
    species slots.
    """
    times = _check_grid(t_grid)
    s0 = canonical_to_cartesian(np.array([z_plus, phi_plus, z_plus, phi_plus]))[:3]
    values = _solve(lambda _t, y: _symmetric_drift(y, params), s0, times, tol, atol)
    return Trajectory(times=times, spins=np.concatenate([values, values], axis=1))


def ensemble_mean(spins: NDArray, block_size: int = ENSEMBLE_BLOCK_SIZE) -> NDArray:
    """Compensated mean over the member axis of (n_times, n_members, ...) data."""
    accumulator: Optional[KahanSum] = None
    for block in block_slices(spins.shape[1], block_size):
        partial = spins[:, block].sum(axis=1)
        if accumulator is None:
            accumulator = KahanSum(partial.shape)
        accumulator.add(partial, weight=block.stop - block.start)
    assert accumulator is not None
    return accumulator.mean()


def final_states(spins: NDArray) -> List[ClassicalState]:
    return [ClassicalState.from_cartesian(s) for s in spins[-1]]
