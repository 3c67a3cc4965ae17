from classical.chaos import decorrelator, lyapunov_exponent, pair_decorrelation, perturbed_copies, random_tangent
from classical.classical_types import (
    DecorrelatorSeries,
    GrowthFit,
    LyapunovResult,
    PhaseSpaceHistogram,
    RegionSpec,
    SeriesBundle,
    Trajectory,
)
from classical.fitting import growth_rate, growth_window
from classical.integrate import (
    draw_members,
    ensemble_mean,
    evolve_batch,
    evolve_classical,
    evolve_ensemble,
    evolve_symmetric,
    island_mask,
    sample_region,
)
from classical.invariants import (
    atomic_current,
    conserved_R,
    conserved_R_series,
    participation_ratio,
    phase_space_density,
    time_averaged_current,
)

__all__ = [
    "DecorrelatorSeries",
    "GrowthFit",
    "LyapunovResult",
    "PhaseSpaceHistogram",
    "RegionSpec",
    "SeriesBundle",
    "Trajectory",
    "atomic_current",
    "conserved_R",
    "conserved_R_series",
    "decorrelator",
    "draw_members",
    "ensemble_mean",
    "evolve_batch",
    "evolve_classical",
    "evolve_ensemble",
    "evolve_symmetric",
    "growth_rate",
    "growth_window",
    "island_mask",
    "lyapunov_exponent",
    "pair_decorrelation",
    "participation_ratio",
    "perturbed_copies",
    "phase_space_density",
    "random_tangent",
    "sample_region",
    "time_averaged_current",
]
