from twa.diagnostics import (
    antisymmetric_copies,
    average_fluctuation,
    fluctuation_measure,
    fp4_dwell_time,
    twa_decorrelator,
)
from twa.sampling import sample_initial, tangent_basis
from twa.stochastic import evolve_block, evolve_twa, heun_step, noise_increment
from twa.twa_types import DwellResult, FluctuationSeries, TwaDecorrelator, TwaEnsemble, TwaResult

__all__ = [
    "DwellResult",
    "FluctuationSeries",
    "TwaDecorrelator",
    "TwaEnsemble",
    "TwaResult",
    "antisymmetric_copies",
    "average_fluctuation",
    "evolve_block",
    "evolve_twa",
    "fluctuation_measure",
    "fp4_dwell_time",
    "heun_step",
    "noise_increment",
    "sample_initial",
    "tangent_basis",
]
