from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from utils.seeding import derive_rng


def ginibre_spectrum(n: int, seed: int) -> NDArray:
    """Eigenvalues of an ``n x n`` complex Ginibre matrix with unit-disk support."""
    rng = derive_rng(seed, "spectra/ginibre")
    matrix = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0 * n)
    return linalg.eigvals(matrix)


def poisson_cloud(n: int, seed: int) -> NDArray:
    """``n`` i.i.d. points uniform in the unit disk."""
    rng = derive_rng(seed, "spectra/poisson")
    radius = np.sqrt(rng.random(n))
    angle = 2.0 * np.pi * rng.random(n)
    return radius * np.exp(1j * angle)
