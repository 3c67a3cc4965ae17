from __future__ import annotations

import math
from typing import Dict, List, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import EmptyRegionError
from model import ClassicalState, Representation, cartesian_to_canonical


class RegionSpec(BaseModel):
    """Box in the (z, φ) plane from which ensemble members are drawn uniformly.

    Uniform sampling in ``z`` is uniform in solid angle. With ``symmetric`` both
    species start at the same point (the symmetric dynamical class). With
    ``exclude_islands`` the draw is restricted to the chaotic region: the
    regular orbits encircling the FP-IV centers never relax, so members that
    stay self-trapped there are rejected.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    z_min: float = Field(default=-0.9, ge=-1.0, le=1.0, description="Lower imbalance bound.")
    z_max: float = Field(default=0.9, ge=-1.0, le=1.0, description="Upper imbalance bound.")
    phi_min: float = Field(default=-math.pi, description="Lower phase bound.")
    phi_max: float = Field(default=math.pi, description="Upper phase bound.")
    n_members: int = Field(default=50, description="Number of ensemble members.")
    symmetric: bool = Field(default=False, description="Start both species at the same point.")
    exclude_islands: bool = Field(
        default=False,
        description="Keep only members of the chaotic region by rejecting self-trapped orbits around FP-IV.",
    )

    @model_validator(mode="after")
    def _non_empty(self) -> RegionSpec:
        if self.n_members < 1:
            raise EmptyRegionError(f"ensemble needs at least one member, got {self.n_members}")
        if self.z_max <= self.z_min or self.phi_max <= self.phi_min:
            raise EmptyRegionError(
                f"empty region z in [{self.z_min}, {self.z_max}], phi in [{self.phi_min}, {self.phi_max}]"
            )
        return self


class Trajectory(BaseModel):
    """Sampled mean-field trajectory; the Cartesian spins are the primary data."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Strictly increasing sample times in units of 1/J.")
    spins: np.ndarray = Field(description="Bloch vectors, shape (n_times, 6).")
    representation: Representation = Field(
        default=Representation.CARTESIAN, description="Chart the trajectory was integrated in."
    )

    @property
    def canonical(self) -> NDArray:
        """``(z1, φ1, z2, φ2)`` per sample, shape (n_times, 4)."""
        return cartesian_to_canonical(self.spins)

    @property
    def z_plus(self) -> NDArray:
        return 0.5 * (self.spins[:, 2] + self.spins[:, 5])

    @property
    def z_minus(self) -> NDArray:
        return 0.5 * (self.spins[:, 2] - self.spins[:, 5])

    def state_at(self, index: int) -> ClassicalState:
        return ClassicalState.from_cartesian(self.spins[index])

    def norms(self) -> NDArray:
        return np.linalg.norm(self.spins.reshape(-1, 2, 3), axis=-1)

    def to_columns(self) -> Dict[str, NDArray]:
        canonical = self.canonical
        columns: Dict[str, NDArray] = {
            "t": self.times,
            "z1": canonical[:, 0],
            "phi1": canonical[:, 1],
            "z2": canonical[:, 2],
            "phi2": canonical[:, 3],
        }
        for index, name in enumerate(("s1x", "s1y", "s1z", "s2x", "s2y", "s2z")):
            columns[name] = self.spins[:, index]
        return columns


class DecorrelatorSeries(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Sample times.")
    D1: np.ndarray = Field(description="Ensemble-averaged decorrelator of species 1, in [0, 2].")
    D2: np.ndarray = Field(description="Ensemble-averaged decorrelator of species 2, in [0, 2].")
    epsilon: float = Field(description="Initial rotation angle between the two copies.")
    ensemble_size: int = Field(description="Number of paired members.")

    @property
    def mean(self) -> NDArray:
        return 0.5 * (self.D1 + self.D2)

    def to_columns(self) -> Dict[str, NDArray]:
        return {"t": self.times, "D1": self.D1, "D2": self.D2}


class LyapunovResult(BaseModel):
    Lambda_l: float = Field(description="Ensemble-mean maximal Lyapunov exponent in units of J.")
    std: float = Field(description="Standard deviation over the retained members.")
    exponents: List[float] = Field(description="Per-member exponents of the retained members.")
    transient_discard: float = Field(description="Initial time excluded from the average.")
    renormalization_interval: float = Field(description="Time between tangent-vector renormalizations.")
    total_time: float = Field(description="Integration time per member.")
    n_escaped: int = Field(default=0, description="Members discarded because they left the sphere.")


class GrowthFit(BaseModel):
    rate: float = Field(description="Fitted exponential rate.")
    intercept: float = Field(description="Fitted log-intercept.")
    t_start: float = Field(description="Start of the fit window.")
    t_end: float = Field(description="End of the fit window.")
    n_points: int = Field(description="Samples inside the window.")
    fallback: bool = Field(
        default=False, description="True when the automatic window was empty and the whole series was fitted."
    )


class PhaseSpaceHistogram(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    z_edges: np.ndarray = Field(description="Bin edges along z.")
    phi_edges: np.ndarray = Field(description="Bin edges along φ.")
    density: np.ndarray = Field(description="Normalized counts, shape (n_z, n_phi), summing to 1.")
    t_snapshot: float = Field(description="Time at which the ensemble was sampled.")
    species: int = Field(default=1, description="Species whose (z, φ) plane is histogrammed.")

    @property
    def occupied_cells(self) -> int:
        return int(np.count_nonzero(self.density))

    def to_columns(self) -> Dict[str, NDArray]:
        z_centers = 0.5 * (self.z_edges[1:] + self.z_edges[:-1])
        phi_centers = 0.5 * (self.phi_edges[1:] + self.phi_edges[:-1])
        zz, pp = np.meshgrid(z_centers, phi_centers, indexing="ij")
        return {"z": zz.ravel(), "phi": pp.ravel(), "density": self.density.ravel()}


class SeriesBundle(BaseModel):
    """Named time series sharing one grid, e.g. ℛ(t) or currents."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Sample times.")
    series: Dict[str, np.ndarray] = Field(description="Series by column name.")
    note: Optional[str] = Field(default=None, description="Free-form provenance.")

    def to_columns(self) -> Dict[str, NDArray]:
        return {"t": self.times, **self.series}
