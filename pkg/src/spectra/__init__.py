from spectra.constants import Regime
from spectra.ensembles import ginibre_spectrum, poisson_cloud
from spectra.liouvillian import (
    build_liouvillian,
    exchange_permutation,
    exchange_sectors,
    liouvillian_spectrum,
    sector_spectra,
    steady_state,
)
from spectra.spectra_types import SpacingRatios, SpectrumRecord, Superoperator
from spectra.statistics import (
    analyze_spectrum,
    classify_regime,
    complex_spacing_ratios,
    ginibre_reference_spacings,
    ks_distance_ginibre,
    ks_distance_poisson,
    poisson_spacing_cdf,
    prepare_eigenvalues,
    small_spacing_exponent,
    unfold_spacings,
)

__all__ = [
    "Regime",
    "SpacingRatios",
    "SpectrumRecord",
    "Superoperator",
    "analyze_spectrum",
    "build_liouvillian",
    "classify_regime",
    "complex_spacing_ratios",
    "exchange_permutation",
    "exchange_sectors",
    "ginibre_reference_spacings",
    "ginibre_spectrum",
    "ks_distance_ginibre",
    "ks_distance_poisson",
    "liouvillian_spectrum",
    "poisson_cloud",
    "poisson_spacing_cdf",
    "prepare_eigenvalues",
    "sector_spectra",
    "small_spacing_exponent",
    "steady_state",
    "unfold_spacings",
]
