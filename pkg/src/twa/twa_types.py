from __future__ import annotations

from typing import Dict, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from classical import GrowthFit
from model import ClassicalState


class TwaEnsemble(BaseModel):
    """Initial Wigner samples around a coherent centre."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    samples: np.ndarray = Field(description="Unit Bloch-vector pairs, shape (n_samples, 6).")
    S: float = Field(description="Spin magnitude setting the sampling width.")
    seed: int = Field(description="Master seed the samples were drawn with.")
    center: ClassicalState = Field(description="Classical phase-space point the samples surround.")

    @property
    def n_samples(self) -> int:
        return int(self.samples.shape[0])


class TwaResult(BaseModel):
    """Ensemble moments of a TWA run on its output grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Output times.")
    mean: np.ndarray = Field(description="<s> per component, shape (n_times, 6).")
    second_moment: np.ndarray = Field(description="<s_a²> per component, shape (n_times, 6).")
    minus_second_moment: np.ndarray = Field(
        description="<s_-a²> with s_- = (s1 - s2)/2, shape (n_times, 3)."
    )
    mean_phase: np.ndarray = Field(description="<φ_i> of both species, shape (n_times, 2).")
    n_samples: int = Field(description="Ensemble size.")
    samples: Optional[np.ndarray] = Field(
        default=None, description="Per-sample spins (n_times, n_samples, 6) when requested."
    )

    @property
    def minus_mean(self) -> NDArray:
        return 0.5 * (self.mean[:, :3] - self.mean[:, 3:])

    @property
    def minus_variance(self) -> NDArray:
        return self.minus_second_moment - self.minus_mean**2

    def to_columns(self) -> Dict[str, NDArray]:
        columns: Dict[str, NDArray] = {"t": self.times}
        for index, name in enumerate(("s1x", "s1y", "s1z", "s2x", "s2y", "s2z")):
            columns[f"mean_{name}"] = self.mean[:, index]
        columns["mean_phi1"] = self.mean_phase[:, 0]
        columns["mean_phi2"] = self.mean_phase[:, 1]
        minus = self.minus_mean
        columns["mean_s_minus_z"] = minus[:, 2]
        return columns


class FluctuationSeries(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Output times.")
    F: np.ndarray = Field(description="Centre-averaged fluctuation measure F̄(t) >= 0.")
    components: np.ndarray = Field(description="Centre-averaged (Δs_-a)², shape (n_times, 3).")
    n_centers: int = Field(default=1, description="Number of symmetric-class centres averaged over.")
    fit: Optional[GrowthFit] = Field(default=None, description="Log-linear fit giving λ_F.")

    @property
    def rate(self) -> Optional[float]:
        return None if self.fit is None else self.fit.rate

    def to_columns(self) -> Dict[str, NDArray]:
        return {
            "t": self.times,
            "F": self.F,
            "var_s_minus_x": self.components[:, 0],
            "var_s_minus_y": self.components[:, 1],
            "var_s_minus_z": self.components[:, 2],
        }


class TwaDecorrelator(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Output times.")
    D1: np.ndarray = Field(description="Decorrelator of species 1.")
    D2: np.ndarray = Field(description="Decorrelator of species 2.")
    epsilon: float = Field(description="Initial rotation angle.")
    ensemble_size: int = Field(description="Number of paired samples.")
    fit: Optional[GrowthFit] = Field(default=None, description="Log-linear fit giving λ_D; None when no fit exists.")

    @property
    def rate(self) -> Optional[float]:
        return None if self.fit is None else self.fit.rate

    def to_columns(self) -> Dict[str, NDArray]:
        return {"t": self.times, "D1": self.D1, "D2": self.D2}


class DwellResult(BaseModel):
    S: float = Field(description="Spin magnitude of the run.")
    dwell_time: float = Field(description="First time |<s_-z>| dropped below the threshold; t_max if never.")
    censored: bool = Field(description="True when the memory outlived the simulated window.")
    initial_minus_z: float = Field(description="<s_-z> at t = 0.")
