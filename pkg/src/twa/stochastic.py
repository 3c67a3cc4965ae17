from __future__ import annotations

from typing import List, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from errors import StepSizeError
from model import ModelParams, cartesian_drift
from twa.constants import MAX_DT, NOISE_CHUNK_STEPS, NORM_DRIFT_TOL, SAMPLE_BLOCK_SIZE
from twa.twa_types import TwaEnsemble, TwaResult
from utils.accumulate import KahanSum
from utils.grids import record_steps
from utils.logger import LoggerFactory
from utils.parallel import map_blocks
from utils.seeding import block_slices, derive_rng

logger = LoggerFactory.get_logger(name="TWA")


def noise_increment(s: NDArray, dW: NDArray, amplitude: float) -> NDArray:
    """Multiplicative dissipation noise ``g(s)·dW``.

    ``dW`` holds ``(ξ1_1, ξ2_1, ξ1_2, ξ2_2)`` increments per sample and must
    broadcast against ``s[..., :4]``. The increment is orthogonal to each spin.
    """
    parts = []
    for species in range(2):
        sx, sy, sz = (s[..., 3 * species + k] for k in range(3))
        xi1, xi2 = dW[..., 2 * species], dW[..., 2 * species + 1]
        parts.extend([sz * xi1, -sz * xi2, -(sx * xi1 - sy * xi2)])
    return amplitude * np.stack(parts, axis=-1)


def heun_step(s: NDArray, dW: NDArray, params: ModelParams, dt: float, amplitude: float) -> NDArray:
    """One Stratonovich-consistent Heun step of the TWA Langevin equations."""
    drift0 = cartesian_drift(s, params)
    kick0 = noise_increment(s, dW, amplitude) if amplitude else 0.0
    predictor = s + drift0 * dt + kick0
    drift1 = cartesian_drift(predictor, params)
    kick1 = noise_increment(predictor, dW, amplitude) if amplitude else 0.0
    return s + 0.5 * (drift0 + drift1) * dt + 0.5 * (kick0 + kick1)


def evolve_block(
    spins: NDArray,
    params: ModelParams,
    dt: float,
    steps: NDArray,
    seed: int,
    block_index: int,
) -> NDArray:
    """Propagates one block of samples and returns the spins at the recorded steps.

    ``spins`` has shape (n, copies, 6); all copies of a sample share one noise
    realization. The noise stream depends only on ``(seed, block_index)``.

    Returns:
        NDArray: Spins of shape (n_records, n, copies, 6).

    Raises:
        StepSizeError: If a step moves any spin off the unit sphere by more than ``NORM_DRIFT_TOL``.
    """
    s = np.array(spins, dtype=float, copy=True)
    n = s.shape[0]
    amplitude = float(np.sqrt(params.gamma / params.S))
    rng = derive_rng(seed, "twa/noise", block_index)
    records = np.empty((steps.size,) + s.shape)

    pointer = 0
    while pointer < steps.size and steps[pointer] == 0:
        records[pointer] = s
        pointer += 1

    total = int(steps[-1])
    noise: Optional[NDArray] = None
    for step in range(1, total + 1):
        offset = (step - 1) % NOISE_CHUNK_STEPS
        if amplitude and offset == 0:
            count = min(NOISE_CHUNK_STEPS, total - step + 1)
            noise = rng.standard_normal((count, n, 1, 4)) * np.sqrt(dt)
        dW = noise[offset] if amplitude else np.zeros((n, 1, 4))

        s = heun_step(s, dW, params, dt, amplitude)
        norms = np.linalg.norm(s.reshape(*s.shape[:-1], 2, 3), axis=-1)
        drift = float(np.max(np.abs(norms - 1.0)))
        if drift > NORM_DRIFT_TOL:
            raise StepSizeError(f"TWA norm drift {drift:.2e} per step exceeds {NORM_DRIFT_TOL} at dt={dt}")
        s = (s.reshape(*s.shape[:-1], 2, 3) / norms[..., None]).reshape(s.shape)

        while pointer < steps.size and steps[pointer] == step:
            records[pointer] = s
            pointer += 1
    return records


def run_blocks(
    spins: NDArray,
    params: ModelParams,
    dt: float,
    t_grid: ArrayLike,
    seed: int,
    block_size: int = SAMPLE_BLOCK_SIZE,
) -> List[NDArray]:
    """Splits (n, copies, 6) samples into fixed blocks and propagates them in parallel."""
    if dt > MAX_DT / params.J:
        raise StepSizeError(f"dt={dt} exceeds the admissible {MAX_DT / params.J}")
    steps = record_steps(t_grid, dt)
    blocks = block_slices(spins.shape[0], block_size)
    tasks = [(spins[block], params, dt, steps, seed, index) for index, block in enumerate(blocks)]
    return map_blocks(evolve_block, tasks, label="TWA blocks")


def _block_moments(records: NDArray) -> NDArray:
    s = records[:, :, 0, :]
    minus = 0.5 * (s[..., :3] - s[..., 3:])
    phases = np.arctan2(s[..., [1, 4]], s[..., [0, 3]])
    return np.concatenate(
        [s.sum(axis=1), (s**2).sum(axis=1), (minus**2).sum(axis=1), phases.sum(axis=1)], axis=-1
    )


def evolve_twa(
    ensemble: TwaEnsemble,
    params: ModelParams,
    t_grid: ArrayLike,
    dt: float = MAX_DT,
    seed: Optional[int] = None,
    block_size: int = SAMPLE_BLOCK_SIZE,
    keep_samples: bool = False,
) -> TwaResult:
    """Integrates the TWA Langevin equations for every sample of ``ensemble``.

    Heun stepping of the drift plus multiplicative noise with discretized
    variance ``1/dt`` per channel, followed by renormalization of each spin.
    Moments are reduced per block with compensated summation in block order.

    Args:
        ensemble (TwaEnsemble): Initial samples.
        params (ModelParams): Model couplings; ``params.S`` sets the noise amplitude.
        t_grid (ArrayLike): Output times, starting at 0, on the ``dt`` lattice.
        dt (float): Step size, at most ``1e-3 / J``.
        seed (Optional[int]): Noise seed. Defaults to the ensemble seed.
        block_size (int): Samples per noise block.
        keep_samples (bool): Also return per-sample spins.

    Returns:
        TwaResult: Means and second moments on ``t_grid``.

    Raises:
        StepSizeError: If ``dt`` is too large.
        GridError: If ``t_grid`` is off the ``dt`` lattice.
    """
    noise_seed = ensemble.seed if seed is None else seed
    if params.S != ensemble.S:
        logger.debug(f"Using the ensemble spin magnitude S={ensemble.S} for the noise amplitude")
        params = params.with_updates(S=ensemble.S)
    times = np.asarray(t_grid, dtype=float)
    parts = run_blocks(ensemble.samples[:, None, :], params, dt, times, noise_seed, block_size)

    accumulator = KahanSum((times.size, 17))
    for records in parts:
        accumulator.add(_block_moments(records), weight=records.shape[1])
    moments = accumulator.mean()
    samples = np.concatenate([records[:, :, 0, :] for records in parts], axis=1) if keep_samples else None
    logger.debug(f"TWA run: {ensemble.n_samples} samples, {times[-1] / dt:.0f} steps, S={params.S}")
    return TwaResult(
        times=times,
        mean=moments[:, :6],
        second_moment=moments[:, 6:12],
        minus_second_moment=moments[:, 12:15],
        mean_phase=moments[:, 15:17],
        n_samples=ensemble.n_samples,
        samples=samples,
    )
