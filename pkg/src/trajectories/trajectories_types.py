from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import StepSizeError
from model import ModelParams
from trajectories.constants import BATCH_SIZE, DEFAULT_DT, JUMP_BUDGET, JumpScheme


class TrajectoryConfig(BaseModel):
    """Numerical settings of a stochastic wave-function ensemble."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(default=DEFAULT_DT, gt=0.0, description="Fixed step in units of 1/J.")
    n_traj: int = Field(default=100, ge=1, description="Number of trajectories.")
    seed: int = Field(ge=0, description="Master seed; trajectory j uses the stream derived from (seed, j).")
    scheme: JumpScheme = Field(default=JumpScheme.FIRST_ORDER, description="Jump sampling rule.")
    batch_size: int = Field(default=BATCH_SIZE, ge=1, description="Trajectories propagated together.")

    def max_channel_rate(self, params: ModelParams) -> float:
        """Largest ``<O_i†O_i>`` of one channel, ``γ/S · max_m [S(S+1) - m(m-1)]``."""
        m = params.S - np.arange(params.dim)
        return float(params.gamma / params.S * np.max(params.S * (params.S + 1.0) - m * (m - 1.0)))

    def check(self, params: ModelParams) -> None:
        """Raises StepSizeError when ``dt · max<O†O>`` exceeds the jump budget."""
        budget = self.dt * self.max_channel_rate(params)
        if budget > JUMP_BUDGET:
            raise StepSizeError(
                f"dt={self.dt} gives a per-step jump probability up to {budget:.3f} "
                f"(limit {JUMP_BUDGET}); reduce dt below {JUMP_BUDGET / self.max_channel_rate(params):.3e}"
            )


class JumpRecord(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Jump times.")
    channels: np.ndarray = Field(description="Channel (1 or 2) of every jump.")

    def counts(self) -> np.ndarray:
        return np.array([np.sum(self.channels == 1), np.sum(self.channels == 2)], dtype=np.int64)


class TrajectoryPath(BaseModel):
    """One pure-state path sampled on the output grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Output times.")
    states: np.ndarray = Field(description="Normalized kets, shape (n_times, D).")
    jumps: JumpRecord = Field(description="Every jump of the path.")


class EnsembleResult(BaseModel):
    """Ensemble averages of a stochastic wave-function run.

    ``rho`` is kept only when requested; large ``S`` runs store reduced
    matrices and expectation series instead.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Output times.")
    n_traj: int = Field(description="Ensemble size.")
    S: float = Field(description="Spin magnitude per species.")
    rho: Optional[np.ndarray] = Field(default=None, description="ρ(t), shape (n_times, D, D).")
    reduced: Optional[List[np.ndarray]] = Field(
        default=None, description="[ρ_1(t), ρ_2(t)], each of shape (n_times, d, d)."
    )
    expectations: Dict[str, np.ndarray] = Field(default_factory=dict, description="Ensemble mean of each operator.")
    spreads: Dict[str, np.ndarray] = Field(
        default_factory=dict, description="Standard deviation of each operator across trajectories."
    )
    jump_counts: np.ndarray = Field(description="Jumps per trajectory and channel, shape (n_traj, 2).")
    single_trajectory: Dict[str, np.ndarray] = Field(
        default_factory=dict, description="Expectation series along trajectory 0."
    )

    def standard_error(self, name: str) -> np.ndarray:
        return self.spreads[name] / np.sqrt(self.n_traj)

    def mean_jump_rate(self) -> float:
        """Mean number of jumps per trajectory and unit time."""
        duration = float(self.times[-1] - self.times[0])
        return float(self.jump_counts.sum(axis=1).mean() / duration)
