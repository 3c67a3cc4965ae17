from __future__ import annotations

from typing import Tuple, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import trapezoid

from classical.classical_types import PhaseSpaceHistogram, RegionSpec, Trajectory
from classical.constants import DEFAULT_RTOL
from classical.integrate import draw_members, evolve_ensemble
from errors import DomainError, SingularInputError
from model import ClassicalState, ModelParams, canonical_to_cartesian, cartesian_to_canonical

SINGULAR_TOL = 1e-14


def _log_argument(z_plus: ArrayLike, phi_plus: ArrayLike, params: ModelParams) -> NDArray:
    z = np.asarray(z_plus, dtype=float)
    phi = np.asarray(phi_plus, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("conserved quantity requires |z_plus| < 1")
    w = 1j * np.sqrt(1.0 - z**2) * np.exp(-1j * phi) + params.J / (params.gamma - 1j * params.V)
    if np.any(np.abs(w) < SINGULAR_TOL):
        raise SingularInputError("logarithm argument of the conserved quantity vanishes")
    return w


def conserved_R(z_plus: float, phi_plus: float, params: ModelParams) -> float:
    """Constant of motion of the symmetric dynamical class.

    ``ℛ = 2 Re[(iγ - V) ln w]`` with ``w = i sqrt(1 - z₊²) e^{-iφ₊} + J/(γ - iV)``,
    using the principal branch of the logarithm. Along the symmetric flow
    ``d ln w / dt = z₊ (γ - iV)``, which the prefactor ``iγ - V`` projects out.

    Raises:
        DomainError: If ``|z_plus| >= 1``.
        SingularInputError: If ``w`` vanishes.
    """
    w = complex(_log_argument(z_plus, phi_plus, params))
    return float(2.0 * (-params.V * np.log(abs(w)) - params.gamma * np.angle(w)))


def conserved_R_series(z_plus: ArrayLike, phi_plus: ArrayLike, params: ModelParams) -> NDArray:
    """``ℛ`` along a sampled orbit with the logarithm branch tracked continuously.

    The series starts on the principal branch; ``arg w`` is unwrapped so orbits
    that wind around the branch point show no jumps of ``2π γ``.
    """
    w = _log_argument(z_plus, phi_plus, params)
    return 2.0 * (-params.V * np.log(np.abs(w)) - params.gamma * np.unwrap(np.angle(w)))


def atomic_current(
    state: Union[ClassicalState, Trajectory, ArrayLike], params: ModelParams
) -> NDArray:
    """Normalized left-to-right current ``j_i = -J s_iy`` of each species.

    Returns:
        NDArray: Shape (2,) for a single state, (n_times, 2) for a trajectory.
    """
    if isinstance(state, ClassicalState):
        spins = state.to_cartesian()
    elif isinstance(state, Trajectory):
        spins = state.spins
    else:
        spins = np.asarray(state, dtype=float)
        if spins.shape[-1] == 4:
            spins = canonical_to_cartesian(spins)
    return -params.J * spins[..., [1, 4]]


def time_averaged_current(trajectory: Trajectory, params: ModelParams, t_min: float = 0.0) -> NDArray:
    """Trapezoidal time average of ``atomic_current`` over ``t >= t_min``."""
    mask = trajectory.times >= t_min
    times = trajectory.times[mask]
    if times.size < 2:
        raise DomainError(f"no samples after t_min={t_min}")
    current = atomic_current(trajectory, params)[mask]
    return trapezoid(current, times, axis=0) / (times[-1] - times[0])


def participation_ratio(density: ArrayLike) -> float:
    """Inverse participation ``1 / Σ p²`` of a normalized histogram, in cells."""
    p = np.asarray(density, dtype=float).ravel()
    total = p.sum()
    if total <= 0.0:
        raise DomainError("participation ratio of an empty histogram")
    p = p / total
    return float(1.0 / np.sum(p**2))


def histogram_plane(
    canonical: NDArray,
    n_z: int,
    n_phi: int,
    species: int = 1,
) -> Tuple[NDArray, NDArray, NDArray]:
    """Normalized 2-D histogram of one species' (z, φ) coordinates."""
    column = 0 if species == 1 else 2
    counts, z_edges, phi_edges = np.histogram2d(
        canonical[:, column],
        canonical[:, column + 1],
        bins=(n_z, n_phi),
        range=((-1.0, 1.0), (-np.pi, np.pi)),
    )
    return counts / counts.sum(), z_edges, phi_edges


def phase_space_density(
    ensemble: Union[RegionSpec, ArrayLike],
    params: ModelParams,
    t_snapshot: float,
    grid: Tuple[int, int] = (50, 50),
    seed: int = 0,
    species: int = 1,
    tol: float = DEFAULT_RTOL,
) -> PhaseSpaceHistogram:
    """Histogram of the ensemble in one species' (z, φ) plane at ``t_snapshot``.

    Args:
        ensemble (Union[RegionSpec, ArrayLike]): Region to sample from, or explicit
            initial states (canonical (n, 4) or Cartesian (n, 6)).
        params (ModelParams): Model couplings.
        t_snapshot (float): Snapshot time; 0 histograms the initial ensemble.
        grid (Tuple[int, int]): Bins along z and φ.
        seed (int): Master seed used when sampling a region.
        species (int): 1 or 2.
        tol (float): Relative integrator tolerance.

    Returns:
        PhaseSpaceHistogram: Normalized density on a uniform (z, φ) grid.
    """
    if isinstance(ensemble, RegionSpec):
        spins0 = canonical_to_cartesian(draw_members(ensemble, params, seed, tag="classical/density-region"))
    else:
        initial = np.atleast_2d(np.asarray(ensemble, dtype=float))
        spins0 = canonical_to_cartesian(initial) if initial.shape[-1] == 4 else initial

    if t_snapshot > 0.0:
        spins = evolve_ensemble(spins0, params, [0.0, t_snapshot], tol=tol)[-1]
    else:
        spins = spins0
    density, z_edges, phi_edges = histogram_plane(cartesian_to_canonical(spins), grid[0], grid[1], species)
    return PhaseSpaceHistogram(
        z_edges=z_edges, phi_edges=phi_edges, density=density, t_snapshot=t_snapshot, species=species
    )
