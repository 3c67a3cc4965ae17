from observables.observables_types import FourierSpectrum, HusimiGrid, PhaseDistribution, PopulationObservables
from observables.populations import population_from_expectations, population_observables, population_operators
from observables.spectrum import fourier_spectrum
from observables.states import husimi_q, phase_grid, phase_states, phase_statistics, purity, von_neumann_entropy

__all__ = [
    "FourierSpectrum",
    "HusimiGrid",
    "PhaseDistribution",
    "PopulationObservables",
    "fourier_spectrum",
    "husimi_q",
    "phase_grid",
    "phase_states",
    "phase_statistics",
    "population_from_expectations",
    "population_observables",
    "population_operators",
    "purity",
    "von_neumann_entropy",
]
