from __future__ import annotations

from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from errors import DomainError
from trajectories.constants import Species


def _local_dim(total: int) -> int:
    local = int(round(np.sqrt(total)))
    if local * local != total:
        raise DomainError(f"dimension {total} is not the square of a single-spin dimension")
    return local


def reduced_density(rho: ArrayLike, which: Union[Species, int]) -> NDArray:
    """Partial trace over the complementary species.

    Accepts a ket of length ``d²``, a density matrix ``(d², d²)`` or a stack
    ``(..., d², d²)``; species 1 is the major index of the product basis.

    Args:
        rho (ArrayLike): Two-spin state.
        which (Union[Species, int]): Species to keep, 1 or 2.

    Returns:
        NDArray: ``ρ_i`` with shape ``(..., d, d)``.
    """
    species = Species(which)
    state = np.asarray(rho, dtype=complex)
    if state.ndim == 1:
        local = _local_dim(state.size)
        amplitudes = state.reshape(local, local)
        if species is Species.FIRST:
            return amplitudes @ amplitudes.conj().T
        return amplitudes.T @ amplitudes.conj()
    if state.shape[-1] != state.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {state.shape}")
    local = _local_dim(state.shape[-1])
    blocks = state.reshape(state.shape[:-2] + (local, local, local, local))
    if species is Species.FIRST:
        return np.einsum("...abcb->...ac", blocks)
    return np.einsum("...abae->...be", blocks)


def coherence_mass(rho_i: ArrayLike) -> Union[float, NDArray]:
    """Sum of ``|ρ_nm|`` over ``n ≠ m`` in the population-imbalance basis."""
    matrix = np.asarray(rho_i)
    total = np.abs(matrix).sum(axis=(-2, -1))
    diagonal = np.abs(np.diagonal(matrix, axis1=-2, axis2=-1)).sum(axis=-1)
    mass = total - diagonal
    return float(mass) if np.ndim(mass) == 0 else mass
