from __future__ import annotations

from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from errors import DomainError, PositivityError
from hilbert import coherent_state
from hilbert.constants import POSITIVITY_TOL
from model import wrap_phase
from observables.constants import FLAT_TOL, HUSIMI_GRID, HUSIMI_PREFACTOR
from observables.observables_types import HusimiGrid, PhaseDistribution


def _spectrum(rho_i: ArrayLike) -> NDArray:
    """Eigenvalues of (a stack of) density matrices with tiny negatives clipped."""
    matrix = np.asarray(rho_i, dtype=complex)
    eigenvalues = np.linalg.eigvalsh(0.5 * (matrix + np.swapaxes(matrix.conj(), -1, -2)))
    smallest = float(np.min(eigenvalues))
    if smallest < -POSITIVITY_TOL:
        raise PositivityError(f"density matrix has eigenvalue {smallest:.3e}")
    return np.clip(eigenvalues, 0.0, None)


def _scalar_or_array(value: NDArray) -> Union[float, NDArray]:
    return float(value) if np.ndim(value) == 0 else value


def von_neumann_entropy(rho_i: ArrayLike) -> Union[float, NDArray]:
    """``-Tr ρ ln ρ`` in nats; accepts one matrix or a stack of matrices.

    Raises:
        PositivityError: If an eigenvalue lies below ``-1e-8``.
    """
    p = _spectrum(rho_i)
    terms = np.where(p > 0.0, -p * np.log(np.where(p > 0.0, p, 1.0)), 0.0)
    return _scalar_or_array(terms.sum(axis=-1))


def purity(rho_i: ArrayLike) -> Union[float, NDArray]:
    """``Tr ρ²``; accepts one matrix or a stack of matrices."""
    p = _spectrum(rho_i)
    return _scalar_or_array(np.sum(p**2, axis=-1))


def phase_grid(S: float) -> NDArray:
    dim = int(round(2.0 * S)) + 1
    return -np.pi + 2.0 * np.pi * np.arange(dim) / dim


@lru_cache(maxsize=16)
def phase_states(S: float) -> NDArray:
    """Columns ``|φ_m>`` in the m-descending basis: ``<k|φ_m> = e^{ikφ_m}/sqrt(2S+1)`` with ``k = S - m``."""
    grid = phase_grid(S)
    k = np.arange(grid.size)
    states = np.exp(1j * np.outer(k, grid)) / np.sqrt(grid.size)
    states.setflags(write=False)
    return states


def phase_statistics(rho_i: ArrayLike, S: float) -> PhaseDistribution:
    """Distribution ``p(φ_m) = <φ_m|ρ_i|φ_m>`` with its circular-shift mean and variance.

    Before the moments are taken the distribution is rolled so that its mode
    sits on the central node; the mean is rolled back and wrapped onto
    ``(-π, π]``. Flat distributions are not rolled.

    Args:
        rho_i (ArrayLike): Single-spin density matrix of dimension ``2S + 1``.
        S (float): Spin magnitude.

    Returns:
        PhaseDistribution: Grid, probabilities and moments.
    """
    rho = np.asarray(rho_i, dtype=complex)
    states = phase_states(S)
    if rho.shape != (states.shape[0], states.shape[0]):
        raise DomainError(f"expected a {states.shape[0]}x{states.shape[0]} matrix, got {rho.shape}")
    grid = phase_grid(S)
    p = np.real(np.einsum("km,kl,lm->m", states.conj(), rho, states))
    p = np.clip(p, 0.0, None)
    p = p / p.sum()

    center = grid.size // 2
    shift = 0 if np.ptp(p) <= FLAT_TOL else center - int(np.argmax(p))
    rolled = np.roll(p, shift)
    shifted_mean = float(np.sum(grid * rolled))
    variance = float(np.sum((grid - shifted_mean) ** 2 * rolled))
    mean = wrap_phase(shifted_mean - shift * 2.0 * np.pi / grid.size)
    return PhaseDistribution(grid=grid, probabilities=p, mean=mean, variance=variance, shifted=shift != 0)


def husimi_q(
    rho_i: ArrayLike,
    S: float,
    grid: Tuple[int, int] = HUSIMI_GRID,
    z: Optional[ArrayLike] = None,
    phi: Optional[ArrayLike] = None,
) -> HusimiGrid:
    """Husimi function ``(1/π) <θ,φ|ρ_i|θ,φ>`` with ``θ = arccos z``.

    The nodes default to ``n_z`` points spanning ``[-1, 1]`` and ``n_φ``
    periodic points starting at ``-π``; explicit node arrays override them.
    """
    rho = np.asarray(rho_i, dtype=complex)
    n_z, n_phi = grid
    z_nodes = np.linspace(-1.0, 1.0, n_z) if z is None else np.asarray(z, dtype=float)
    phi_nodes = -np.pi + 2.0 * np.pi * np.arange(n_phi) / n_phi if phi is None else np.asarray(phi, dtype=float)
    dim = rho.shape[0]
    phases = np.exp(1j * np.outer(phi_nodes, np.arange(dim)))
    values = np.empty((z_nodes.size, phi_nodes.size))
    for row, z_value in enumerate(z_nodes):
        magnitudes = coherent_state(float(np.arccos(np.clip(z_value, -1.0, 1.0))), 0.0, S)
        kets = phases * magnitudes
        values[row] = np.real(np.einsum("pk,kl,pl->p", kets.conj(), rho, kets))
    return HusimiGrid(z=z_nodes, phi=phi_nodes, values=HUSIMI_PREFACTOR * np.clip(values, 0.0, None), S=S)
