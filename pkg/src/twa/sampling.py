import numpy as np
from numpy.typing import NDArray

from errors import DomainError
from model import ClassicalState
from twa.twa_types import TwaEnsemble
from utils.seeding import derive_rng


def tangent_basis(center: ClassicalState) -> NDArray:
    """Orthonormal (e_θ, e_φ) pair at each spin of ``center``, shape (2, 2, 3)."""
    basis = []
    for z, phi in ((center.z1, center.phi1), (center.z2, center.phi2)):
        theta = np.arccos(np.clip(z, -1.0, 1.0))
        e_theta = np.array([np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)])
        e_phi = np.array([-np.sin(phi), np.cos(phi), 0.0])
        basis.append((e_theta, e_phi))
    return np.asarray(basis)


def sample_initial(center: ClassicalState, S: float, n_samples: int, seed: int) -> TwaEnsemble:
    """Gaussian Wigner samples around a product coherent state.

    Each spin receives independent Gaussian displacements of variance ``1/(2S)``
    along the two tangent directions at its centre and is then projected back
    onto the unit sphere.

    Args:
        center (ClassicalState): Coherent centre of both spins.
        S (float): Spin magnitude.
        n_samples (int): Number of samples, at least 2.
        seed (int): Master seed.

    Returns:
        TwaEnsemble: The normalized samples.

    Raises:
        DomainError: If ``n_samples < 2`` or ``S <= 0``.
    """
    if n_samples < 2:
        raise DomainError(f"TWA needs at least two samples, got {n_samples}")
    if S <= 0:
        raise DomainError(f"spin magnitude must be positive, got {S}")

    rng = derive_rng(seed, "twa/initial")
    width = 1.0 / np.sqrt(2.0 * S)
    basis = tangent_basis(center)
    centre_spins = center.to_cartesian().reshape(2, 3)

    kicks = rng.standard_normal((n_samples, 2, 2)) * width
    spins = centre_spins[None] + np.einsum("nik,ikc->nic", kicks, basis)
    spins /= np.linalg.norm(spins, axis=-1, keepdims=True)
    return TwaEnsemble(samples=spins.reshape(n_samples, 6), S=S, seed=seed, center=center)
