from __future__ import annotations

from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats
from scipy.spatial import cKDTree

from errors import FitError, SpectrumSizeError
from spectra.constants import (
    BOUNDARY_FRACTION,
    DEGENERACY_TOL,
    GINIBRE_MIN_ANISOTROPY,
    GINIBRE_REFERENCE_SAMPLES,
    GINIBRE_REFERENCE_SEED,
    GINIBRE_REFERENCE_SIZE,
    POISSON_MAX_ANISOTROPY,
    SMALL_SPACING_WINDOW,
    UNFOLDING_NEIGHBOURS,
    ZERO_MODE_TOL,
    Regime,
)
from spectra.ensembles import ginibre_spectrum
from spectra.spectra_types import SpacingRatios, SpectrumRecord
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="LIOUVILLIAN_SPECTRA")


def _points(values: NDArray) -> NDArray:
    return np.column_stack([values.real, values.imag])


def prepare_eigenvalues(eigenvalues: ArrayLike, drop_zero: bool = True) -> NDArray:
    """Removes the zero mode and collapses eigenvalues closer than ``1e-10``.

    Of every cluster of near-coincident eigenvalues the one with the lowest
    index survives.
    """
    values = np.asarray(eigenvalues, dtype=complex).ravel()
    if drop_zero:
        values = values[np.abs(values) > ZERO_MODE_TOL]
    if values.size < 2:
        return values
    pairs = cKDTree(_points(values)).query_pairs(DEGENERACY_TOL, output_type="ndarray")
    if pairs.size:
        keep = np.ones(values.size, dtype=bool)
        keep[pairs.max(axis=1)] = False
        values = values[keep]
    return values


def _neighbours(values: NDArray, k: int) -> Tuple[NDArray, NDArray]:
    """Distances and indices of the ``k`` nearest neighbours, self in column 0.

    Equal distances are ordered by eigenvalue index.
    """
    distances, indices = cKDTree(_points(values)).query(_points(values), k=k + 1)
    order = np.lexsort((indices, distances), axis=-1)
    return np.take_along_axis(distances, order, axis=-1), np.take_along_axis(indices, order, axis=-1)


def _interior(density: NDArray, boundary_fraction: float) -> NDArray:
    """Mask dropping the eigenvalues with the lowest local density."""
    if boundary_fraction <= 0.0:
        return np.ones(density.size, dtype=bool)
    return density >= np.quantile(density, boundary_fraction)


def _local_analysis(
    eigenvalues: ArrayLike, k: int, drop_zero: bool
) -> Tuple[NDArray, NDArray, NDArray, NDArray]:
    values = prepare_eigenvalues(eigenvalues, drop_zero=drop_zero)
    if values.size < k + 2:
        raise SpectrumSizeError(f"{values.size} usable eigenvalues, at least {k + 2} needed for k={k}")
    distances, indices = _neighbours(values, k)
    density = k / (np.pi * distances[:, k] ** 2)
    return values, distances, indices, density


def unfold_spacings(
    eigenvalues: ArrayLike,
    k: int = UNFOLDING_NEIGHBOURS,
    boundary_fraction: float = BOUNDARY_FRACTION,
    drop_zero: bool = True,
) -> NDArray:
    """Nearest-neighbour spacings unfolded by the k-NN local density.

    Each spacing is the Euclidean distance to the nearest neighbour times
    ``sqrt(k / (π R_k²))``. The lowest-density fraction of the eigenvalues is
    excluded and the remaining spacings are rescaled to unit mean.

    Args:
        eigenvalues (ArrayLike): Complex spectrum.
        k (int): Neighbours used for the local density.
        boundary_fraction (float): Fraction of lowest-density eigenvalues dropped.
        drop_zero (bool): Remove eigenvalues within ``1e-8`` of zero first.

    Returns:
        NDArray: Spacings with mean 1.

    Raises:
        SpectrumSizeError: If fewer than ``k + 2`` eigenvalues remain.
    """
    _, distances, _, density = _local_analysis(eigenvalues, k, drop_zero)
    spacings = (distances[:, 1] * np.sqrt(density))[_interior(density, boundary_fraction)]
    return spacings / spacings.mean()


def complex_spacing_ratios(
    eigenvalues: ArrayLike,
    k: int = UNFOLDING_NEIGHBOURS,
    boundary_fraction: float = BOUNDARY_FRACTION,
    drop_zero: bool = True,
) -> SpacingRatios:
    """``ξ_ν = (λ_NN - λ_ν)/(λ_NNN - λ_ν)`` with exact neighbours in the complex plane."""
    values, _, indices, density = _local_analysis(eigenvalues, k, drop_zero)
    ratios = (values[indices[:, 1]] - values) / (values[indices[:, 2]] - values)
    ratios = ratios[_interior(density, boundary_fraction)]
    return SpacingRatios(
        ratios=ratios,
        mean_r=float(np.mean(np.abs(ratios))),
        mean_cos_theta=float(np.mean(np.cos(np.angle(ratios)))),
    )


def poisson_spacing_cdf(spacing: ArrayLike) -> NDArray:
    """CDF of ``P(δ) = (π/2) δ exp(-πδ²/4)``."""
    return 1.0 - np.exp(-np.pi * np.asarray(spacing) ** 2 / 4.0)


def ks_distance_poisson(spacings: ArrayLike) -> float:
    return float(stats.kstest(np.asarray(spacings), poisson_spacing_cdf).statistic)


@lru_cache(maxsize=1)
def ginibre_reference_spacings() -> NDArray:
    """Pooled unfolded spacings of a fixed-seed Ginibre sample, the reference law for KS tests."""
    pooled = [
        unfold_spacings(ginibre_spectrum(GINIBRE_REFERENCE_SIZE, GINIBRE_REFERENCE_SEED + sample))
        for sample in range(GINIBRE_REFERENCE_SAMPLES)
    ]
    reference = np.sort(np.concatenate(pooled))
    reference.setflags(write=False)
    return reference


def ks_distance_ginibre(spacings: ArrayLike) -> float:
    return float(stats.ks_2samp(np.asarray(spacings), ginibre_reference_spacings()).statistic)


def small_spacing_exponent(spacings: ArrayLike, window: Tuple[float, float] = SMALL_SPACING_WINDOW) -> float:
    """Exponent β of ``P(δ) ~ δ^β``: the log-log slope of the empirical CDF minus one.

    Raises:
        FitError: If fewer than three spacings fall inside ``window``.
    """
    ordered = np.sort(np.asarray(spacings, dtype=float))
    cdf = np.arange(1, ordered.size + 1) / ordered.size
    inside = (ordered >= window[0]) & (ordered <= window[1])
    if np.count_nonzero(inside) < 3:
        raise FitError(f"only {np.count_nonzero(inside)} spacings inside {window}")
    fit = stats.linregress(np.log(ordered[inside]), np.log(cdf[inside]))
    return float(fit.slope - 1.0)


def classify_regime(record: SpectrumRecord) -> Regime:
    """Poisson-like for ``-<cos θ> ≤ 0.08``, Ginibre-like for ``-<cos θ> ≥ 0.16``."""
    anisotropy = -record.mean_cos_theta
    if anisotropy <= POISSON_MAX_ANISOTROPY:
        return Regime.POISSON
    if anisotropy >= GINIBRE_MIN_ANISOTROPY:
        return Regime.GINIBRE
    return Regime.INCONCLUSIVE


def analyze_spectrum(
    eigenvalues: ArrayLike,
    sector: Optional[int] = None,
    k: int = UNFOLDING_NEIGHBOURS,
) -> SpectrumRecord:
    """Spacings, ratios, KS distances and regime label of one sector's spectrum."""
    values = np.asarray(eigenvalues, dtype=complex).ravel()
    spacings = unfold_spacings(values, k=k)
    ratios = complex_spacing_ratios(values, k=k)
    try:
        exponent: Optional[float] = small_spacing_exponent(spacings)
    except FitError as error:
        logger.warning(f"Small-spacing exponent unavailable: {error}")
        exponent = None
    record = SpectrumRecord(
        eigenvalues=values,
        sector=sector,
        spacings=spacings,
        ratios=ratios.ratios,
        mean_r=ratios.mean_r,
        mean_cos_theta=ratios.mean_cos_theta,
        ks_poisson=ks_distance_poisson(spacings),
        ks_ginibre=ks_distance_ginibre(spacings),
        small_spacing_exponent=exponent,
    )
    record.classification = classify_regime(record)
    logger.info(
        f"Sector {sector}: {values.size} eigenvalues, <r>={record.mean_r:.3f}, "
        f"-<cos θ>={-record.mean_cos_theta:.3f} -> {record.classification.value}"
    )
    return record
