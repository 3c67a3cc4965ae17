from trajectories.constants import JumpScheme, Species
from trajectories.reduced import coherence_mass, reduced_density
from trajectories.trajectories_types import EnsembleResult, JumpRecord, TrajectoryConfig, TrajectoryPath
from trajectories.unraveling import NoJumpPropagator, ensemble_evolve, evolve_trajectory

__all__ = [
    "EnsembleResult",
    "JumpRecord",
    "JumpScheme",
    "NoJumpPropagator",
    "Species",
    "TrajectoryConfig",
    "TrajectoryPath",
    "coherence_mass",
    "ensemble_evolve",
    "evolve_trajectory",
    "reduced_density",
]
