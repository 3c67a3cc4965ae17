from __future__ import annotations

from typing import Dict, List

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from classical import participation_ratio


class PhaseDistribution(BaseModel):
    """Discrete relative-phase distribution of one species."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: np.ndarray = Field(description="φ_m = -π + 2πm/(2S+1), m = 0..2S.")
    probabilities: np.ndarray = Field(description="p(φ_m), summing to 1.")
    mean: float = Field(description="<φ>, wrapped onto (-π, π].")
    variance: float = Field(description="(Δφ)² about the mean.")
    shifted: bool = Field(default=False, description="The distribution was rolled to centre its mode.")

    def to_columns(self) -> Dict[str, NDArray]:
        return {"phi": self.grid, "p": self.probabilities}


class HusimiGrid(BaseModel):
    """``Q(z, φ) = (1/π) <z,φ|ρ_i|z,φ>`` on a rectangular (z, φ) grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    z: np.ndarray = Field(description="z nodes from -1 to 1, endpoints included.")
    phi: np.ndarray = Field(description="Periodic φ nodes starting at -π.")
    values: np.ndarray = Field(description="Q values, shape (n_z, n_phi).")
    S: float = Field(description="Spin magnitude.")

    def normalization(self) -> float:
        """``(2S+1)/(4π) ∫ <z,φ|ρ|z,φ> dz dφ``; 1 up to quadrature error."""
        d_phi = 2.0 * np.pi / self.phi.size
        integral = trapezoid(self.values.sum(axis=1) * d_phi, self.z)
        return float((2.0 * self.S + 1.0) / 4.0 * integral)

    def participation_ratio(self) -> float:
        return participation_ratio(self.values)

    def to_columns(self) -> Dict[str, NDArray]:
        zz, pp = np.meshgrid(self.z, self.phi, indexing="ij")
        return {"z": zz.ravel(), "phi": pp.ravel(), "Q": self.values.ravel()}


class FourierSpectrum(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    omega: np.ndarray = Field(description="Angular frequencies of the padded transform.")
    magnitude: np.ndarray = Field(description="Window-normalized magnitude |F(ω)|.")
    peaks: List[float] = Field(description="Interpolated peak frequencies, strongest first.")
    resolution: float = Field(description="Δω = 2π / record length.")

    def to_columns(self) -> Dict[str, NDArray]:
        return {"omega": self.omega, "F": self.magnitude}


class PopulationObservables(BaseModel):
    """Imbalances and currents, scalars or time series."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    z1: np.ndarray = Field(description="<S1z>/S.")
    z2: np.ndarray = Field(description="<S2z>/S.")
    z_plus: np.ndarray = Field(description="(<z1> + <z2>)/2.")
    z_minus: np.ndarray = Field(description="(<z1> - <z2>)/2.")
    delta_z_minus: np.ndarray = Field(description="Standard deviation of z₋.")
    current1: np.ndarray = Field(description="-J<S1y>/S.")
    current2: np.ndarray = Field(description="-J<S2y>/S.")

    def to_columns(self) -> Dict[str, NDArray]:
        return {name: np.atleast_1d(value) for name, value in self.model_dump().items()}
