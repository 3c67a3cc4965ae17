from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse

from errors import DomainError, StepSizeError
from hilbert import Operator, build_hamiltonian, jump_operators
from hilbert.constants import DENSE_MAX_S
from model import ModelParams
from trajectories.constants import MAX_JUMP_PROBABILITY, NORM_TOL, UNIFORM_CHUNK_STEPS, JumpScheme
from trajectories.trajectories_types import EnsembleResult, JumpRecord, TrajectoryConfig, TrajectoryPath
from utils.accumulate import KahanSum
from utils.grids import record_steps
from utils.logger import LoggerFactory
from utils.parallel import map_blocks, worker_count
from utils.seeding import block_slices, derive_rng

logger = LoggerFactory.get_logger(name="QUANTUM_TRAJECTORIES")

JUMP_STREAM = "trajectories/jumps"


class NoJumpPropagator:
    """Fourth-order Runge-Kutta step of ``d|ψ>/dt = -i H_NH |ψ>`` plus the jump channels.

    ``H_NH = H - (i/2) Σ_i O_i† O_i``. For the linear generator the RK4 step is
    the degree-4 Taylor polynomial of ``exp(-i H_NH dt)``; it is precomputed as a
    dense matrix for small ``S`` and applied by Horner matrix-vector products
    on the sparse path.
    """

    def __init__(self, params: ModelParams, dt: float) -> None:
        self.dt = dt
        use_sparse = params.S > DENSE_MAX_S
        hamiltonian = build_hamiltonian(params, use_sparse)
        self.jumps: List[Operator] = jump_operators(params, use_sparse)
        decay = self.jumps[0].conj().T @ self.jumps[0]
        for op in self.jumps[1:]:
            decay = decay + op.conj().T @ op
        generator = -1j * hamiltonian - 0.5 * decay
        self._generator = sparse.csr_matrix(generator) if use_sparse else None
        self._step: Optional[NDArray] = None
        if not use_sparse:
            identity = np.eye(params.dim**2, dtype=complex)
            step = identity
            for order in (4, 3, 2, 1):
                step = identity + (dt / order) * (generator @ step)
            self._step = step

    def advance(self, states: NDArray) -> NDArray:
        """Applies one no-jump step to the columns of ``states`` (unnormalized)."""
        if self._step is not None:
            return self._step @ states
        result = states
        for order in (4, 3, 2, 1):
            result = states + (self.dt / order) * (self._generator @ result)
        return result

    def jumped(self, states: NDArray) -> Tuple[List[NDArray], NDArray]:
        """``O_i|ψ>`` for every channel and the per-step probabilities ``δP_i``, shape (2, n)."""
        images = [np.asarray(op @ states) for op in self.jumps]
        probabilities = self.dt * np.stack([np.sum(np.abs(image) ** 2, axis=0) for image in images])
        return images, probabilities


def _normalize(states: NDArray) -> NDArray:
    return states / np.linalg.norm(states, axis=0)


def _uniform_chunks(rngs: List[np.random.Generator], n_steps: int, draw: bool):
    """Yields ``(offset, count, uniforms)``; ``uniforms`` has one row per trajectory, drawn from its own stream."""
    for offset in range(0, n_steps, UNIFORM_CHUNK_STEPS):
        count = min(UNIFORM_CHUNK_STEPS, n_steps - offset)
        yield offset, count, np.stack([rng.random(count) for rng in rngs]) if draw else None


def _check_ket(psi0: ArrayLike, dim: int) -> NDArray:
    psi = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi.size != dim:
        raise DomainError(f"initial state has length {psi.size}, expected {dim}")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise DomainError(f"initial state is not normalized (norm {np.linalg.norm(psi):.12f})")
    return psi


class _Recorder:
    """Accumulates the quantities requested at each output time for a batch of columns."""

    def __init__(
        self,
        n_times: int,
        dim: int,
        n_columns: int,
        keep_rho: bool,
        keep_reduced: bool,
        operators: Mapping[str, Operator],
        track_first: bool,
        keep_states: bool,
    ) -> None:
        self.dim = dim
        self.local = int(round(np.sqrt(dim)))
        self.rho = np.zeros((n_times, dim, dim), dtype=complex) if keep_rho else None
        self.reduced = (
            [np.zeros((n_times, self.local, self.local), dtype=complex) for _ in range(2)] if keep_reduced else None
        )
        self.operators = dict(operators)
        self.sums = {name: np.zeros(n_times) for name in self.operators}
        self.squares = {name: np.zeros(n_times) for name in self.operators}
        self.first = {name: np.zeros(n_times) for name in self.operators} if track_first else None
        self.states = np.zeros((n_times, dim, n_columns), dtype=complex) if keep_states else None

    def record(self, index: int, states: NDArray) -> None:
        if self.rho is not None:
            self.rho[index] = states @ states.conj().T
        if self.reduced is not None:
            blocks = states.T.reshape(-1, self.local, self.local)
            self.reduced[0][index] = np.einsum("nab,ncb->ac", blocks, blocks.conj())
            self.reduced[1][index] = np.einsum("nab,nac->bc", blocks, blocks.conj())
        for name, op in self.operators.items():
            values = np.real(np.sum(states.conj() * np.asarray(op @ states), axis=0))
            self.sums[name][index] = values.sum()
            self.squares[name][index] = np.sum(values**2)
            if self.first is not None:
                self.first[name][index] = values[0]
        if self.states is not None:
            self.states[index] = states


def _propagate(
    states: NDArray,
    propagator: NoJumpPropagator,
    scheme: JumpScheme,
    steps: NDArray,
    rngs: List[np.random.Generator],
    recorder: _Recorder,
    log_jumps: bool = False,
) -> Tuple[NDArray, List[List[Tuple[int, int]]]]:
    """Advances the columns of ``states`` to the last recorded step.

    Returns the jump counts per column and channel, shape (n, 2), and, when
    ``log_jumps`` is set, the ``(step, channel)`` events of every column.
    """
    n_columns = states.shape[1]
    counts = np.zeros((n_columns, 2), dtype=np.int64)
    events: List[List[Tuple[int, int]]] = [[] for _ in range(n_columns)]
    columns = np.arange(n_columns)
    total_steps = int(steps[-1])
    next_record = 0
    thresholds = np.array([rng.random() for rng in rngs]) if scheme is JumpScheme.WAITING_TIME else None

    def apply_jumps(step: int, states: NDArray, images: List[NDArray], channel_mask: NDArray) -> None:
        for channel in (0, 1):
            hits = columns[channel_mask[channel]]
            if hits.size == 0:
                continue
            image = images[channel][:, hits]
            states[:, hits] = image / np.linalg.norm(image, axis=0)
            counts[hits, channel] += 1
            if log_jumps:
                for column in hits:
                    events[column].append((step, channel + 1))

    while steps[next_record] == 0:
        recorder.record(next_record, _normalize(states))
        next_record += 1
        if next_record == steps.size:
            return counts, events

    for offset, count, uniforms in _uniform_chunks(rngs, total_steps, scheme is JumpScheme.FIRST_ORDER):
        for local_step in range(count):
            step = offset + local_step
            if scheme is JumpScheme.FIRST_ORDER:
                images, probabilities = propagator.jumped(states)
                total = probabilities.sum(axis=0)
                if np.any(total > MAX_JUMP_PROBABILITY):
                    raise StepSizeError(
                        f"jump probability {total.max():.3f} in one step exceeds {MAX_JUMP_PROBABILITY}; reduce dt"
                    )
                u = uniforms[:, local_step]
                first = u < probabilities[0]
                second = ~first & (u < total)
                advanced = _normalize(propagator.advance(states))
                jumping = first | second
                states = np.where(jumping[None, :], states, advanced)
                apply_jumps(step, states, images, np.stack([first, second]))
            else:
                states = propagator.advance(states)
                norms = np.sum(np.abs(states) ** 2, axis=0)
                firing = norms <= thresholds
                if np.any(firing):
                    images, probabilities = propagator.jumped(states)
                    share = np.array([rngs[column].random() for column in columns[firing]])
                    weight = probabilities[:, firing]
                    choose_first = share * weight.sum(axis=0) < weight[0]
                    first = np.zeros(n_columns, dtype=bool)
                    second = np.zeros(n_columns, dtype=bool)
                    first[columns[firing][choose_first]] = True
                    second[columns[firing][~choose_first]] = True
                    apply_jumps(step, states, images, np.stack([first, second]))
                    thresholds[firing] = [rngs[column].random() for column in columns[firing]]
            while next_record < steps.size and steps[next_record] == step + 1:
                recorder.record(next_record, _normalize(states))
                next_record += 1
    return counts, events


def evolve_trajectory(
    psi0: ArrayLike,
    params: ModelParams,
    config: TrajectoryConfig,
    stream: np.random.Generator,
    t_grid: ArrayLike,
) -> TrajectoryPath:
    """Samples a single pure-state path.

    Args:
        psi0 (ArrayLike): Normalized initial ket over the two-spin basis.
        params (ModelParams): Model couplings.
        config (TrajectoryConfig): Step and jump scheme; ``n_traj`` and ``seed`` are not used.
        stream (np.random.Generator): Source of the per-step uniform variates.
        t_grid (ArrayLike): Output times on the ``dt`` lattice, starting at 0.

    Returns:
        TrajectoryPath: Normalized states on ``t_grid`` and the jump record.

    Raises:
        StepSizeError: If a single step would jump with probability above 0.1.
    """
    config.check(params)
    psi = _check_ket(psi0, params.dim**2)
    steps = record_steps(t_grid, config.dt)
    propagator = NoJumpPropagator(params, config.dt)
    recorder = _Recorder(steps.size, params.dim**2, 1, False, False, {}, False, True)
    _, events = _propagate(psi[:, None].copy(), propagator, config.scheme, steps, [stream], recorder, log_jumps=True)
    jump_steps = np.array([step for step, _ in events[0]], dtype=np.int64)
    jumps = JumpRecord(
        times=(jump_steps + 1) * config.dt,
        channels=np.array([channel for _, channel in events[0]], dtype=np.int64),
    )
    return TrajectoryPath(times=np.asarray(t_grid, dtype=float), states=recorder.states[:, :, 0], jumps=jumps)


def _ensemble_batch(
    psi0: NDArray,
    params: ModelParams,
    config: TrajectoryConfig,
    steps: NDArray,
    members: slice,
    keep_rho: bool,
    keep_reduced: bool,
    operators: Dict[str, Operator],
) -> Dict[str, object]:
    rngs = [derive_rng(config.seed, JUMP_STREAM, index) for index in range(members.start, members.stop)]
    n_columns = members.stop - members.start
    states = np.repeat(psi0[:, None], n_columns, axis=1)
    recorder = _Recorder(
        steps.size, params.dim**2, n_columns, keep_rho, keep_reduced, operators, members.start == 0, False
    )
    counts, _ = _propagate(states, NoJumpPropagator(params, config.dt), config.scheme, steps, rngs, recorder)
    return {
        "rho": recorder.rho,
        "reduced": recorder.reduced,
        "sums": recorder.sums,
        "squares": recorder.squares,
        "first": recorder.first,
        "counts": counts,
    }


def ensemble_evolve(
    psi0: ArrayLike,
    params: ModelParams,
    config: TrajectoryConfig,
    t_grid: ArrayLike,
    keep_rho: bool = True,
    keep_reduced: bool = False,
    operators: Optional[Mapping[str, Operator]] = None,
    n_jobs: Optional[int] = None,
) -> EnsembleResult:
    """Averages ``config.n_traj`` stochastic wave-function trajectories.

    Trajectory ``j`` draws its variates from the stream derived from
    ``(config.seed, "trajectories/jumps", j)``. Trajectories are propagated in
    fixed batches and the per-batch sums are merged in batch order with
    compensated summation, so the result does not depend on ``n_jobs``.

    Args:
        psi0 (ArrayLike): Normalized initial ket.
        params (ModelParams): Model couplings.
        config (TrajectoryConfig): Ensemble settings.
        t_grid (ArrayLike): Output times on the ``dt`` lattice, starting at 0.
        keep_rho (bool): Accumulate the full ``ρ(t)``.
        keep_reduced (bool): Accumulate ``ρ_1(t)`` and ``ρ_2(t)``.
        operators (Optional[Mapping[str, Operator]]): Hermitian operators whose
            mean and spread across trajectories are recorded.
        n_jobs (Optional[int]): Worker count; defaults to the runtime configuration.

    Returns:
        EnsembleResult: Averages on ``t_grid``.
    """
    config.check(params)
    psi = _check_ket(psi0, params.dim**2)
    steps = record_steps(t_grid, config.dt)
    operators = dict(operators or {})
    batches = block_slices(config.n_traj, config.batch_size)
    workers = worker_count(n_jobs)
    logger.info(
        f"Ensemble of {config.n_traj} trajectories ({config.scheme.value}, dt={config.dt}, "
        f"D={params.dim**2}) in {len(batches)} batch(es)"
    )

    n_times = steps.size
    dim, local = params.dim**2, params.dim
    rho_sum = KahanSum((n_times, dim, dim), dtype=np.complex128) if keep_rho else None
    reduced_sums = [KahanSum((n_times, local, local), dtype=np.complex128) for _ in range(2)] if keep_reduced else None
    value_sums = {name: KahanSum((n_times,)) for name in operators}
    square_sums = {name: KahanSum((n_times,)) for name in operators}
    counts: List[NDArray] = []
    first: Dict[str, NDArray] = {}

    # Memory stays bounded by merging one round of worker results at a time.
    for start in range(0, len(batches), workers):
        round_batches = batches[start : start + workers]
        partials = map_blocks(
            _ensemble_batch,
            [(psi, params, config, steps, members, keep_rho, keep_reduced, operators) for members in round_batches],
            n_jobs=workers,
            label="trajectory batches",
        )
        for members, partial in zip(round_batches, partials):
            size = members.stop - members.start
            if rho_sum is not None:
                rho_sum.add(partial["rho"], weight=size)
            if reduced_sums is not None:
                for accumulator, value in zip(reduced_sums, partial["reduced"]):
                    accumulator.add(value, weight=size)
            for name in operators:
                value_sums[name].add(partial["sums"][name], weight=size)
                square_sums[name].add(partial["squares"][name], weight=size)
            if partial["first"] is not None:
                first = partial["first"]
            counts.append(partial["counts"])

    expectations = {name: value_sums[name].mean() for name in operators}
    spreads = {
        name: np.sqrt(np.maximum(square_sums[name].mean() - expectations[name] ** 2, 0.0)) for name in operators
    }
    jump_counts = np.concatenate(counts, axis=0)
    logger.info(f"Ensemble finished: {int(jump_counts.sum())} jumps in total")
    return EnsembleResult(
        times=np.asarray(t_grid, dtype=float),
        n_traj=config.n_traj,
        S=params.S,
        rho=rho_sum.mean() if rho_sum is not None else None,
        reduced=[accumulator.mean() for accumulator in reduced_sums] if reduced_sums is not None else None,
        expectations=expectations,
        spreads=spreads,
        jump_counts=jump_counts,
        single_trajectory=first,
    )
