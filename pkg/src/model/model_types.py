from __future__ import annotations

import math
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import DomainError
from model.constants import POLE_CLAMP, Family, Stability


def wrap_phase(phi: float) -> float:
    """Maps an angle onto (-π, π]."""
    return math.pi - math.fmod(math.fmod(math.pi - phi, 2.0 * math.pi) + 2.0 * math.pi, 2.0 * math.pi)


def wrap_phase_array(phi: NDArray) -> NDArray:
    """Vectorized ``wrap_phase``."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2.0 * np.pi)


class ModelParams(BaseModel):
    """Couplings of the two-species junction and the spin magnitude per species.

    All rates are measured in units of the hopping amplitude ``J``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    J: float = Field(default=1.0, gt=0.0, description="Hopping amplitude; unit of all rates.")
    V: float = Field(default=0.0, description="Interspecies coupling in units of J.")
    gamma: float = Field(default=0.0, ge=0.0, description="Dissipation rate in units of J.")
    omega_z: float = Field(default=0.0, description="Tilt amplitude in units of J.")
    S: float = Field(
        default=10.0,
        ge=0.5,
        description="Spin magnitude per species; positive half-integer, boson number N = 2S.",
    )

    @field_validator("S")
    @classmethod
    def _half_integer(cls, value: float) -> float:
        if abs(2.0 * value - round(2.0 * value)) > 1e-12:
            raise ValueError(f"S must be a half-integer, got {value}")
        return float(round(2.0 * value)) / 2.0

    @property
    def dim(self) -> int:
        """Dimension 2S + 1 of one spin."""
        return int(round(2.0 * self.S)) + 1

    def with_updates(self, **changes: float) -> ModelParams:
        return self.model_validate({**self.model_dump(), **changes})


class ClassicalState(BaseModel):
    """Mean-field state of both species in the canonical (z, φ) chart.

    Phases are wrapped onto (-π, π] on construction. The Cartesian Bloch
    vectors are derived through ``z = s_z``, ``tan φ = s_y / s_x``.
    """

    model_config = ConfigDict(frozen=True)

    z1: float = Field(ge=-1.0, le=1.0, description="Population imbalance of species 1.")
    phi1: float = Field(description="Relative phase of species 1.")
    z2: float = Field(ge=-1.0, le=1.0, description="Population imbalance of species 2.")
    phi2: float = Field(description="Relative phase of species 2.")

    @field_validator("phi1", "phi2")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_phase(value)

    @classmethod
    def symmetric(cls, z: float, phi: float) -> ClassicalState:
        return cls(z1=z, phi1=phi, z2=z, phi2=phi)

    @classmethod
    def from_array(cls, values: NDArray) -> ClassicalState:
        z1, phi1, z2, phi2 = (float(v) for v in values)
        return cls(z1=float(np.clip(z1, -1.0, 1.0)), phi1=phi1, z2=float(np.clip(z2, -1.0, 1.0)), phi2=phi2)

    @classmethod
    def from_cartesian(cls, spins: NDArray) -> ClassicalState:
        """Builds the canonical state from Bloch vectors of shape (2, 3) or (6,)."""
        s = np.asarray(spins, dtype=float).reshape(2, 3)
        norms = np.linalg.norm(s, axis=1, keepdims=True)
        s = s / norms
        return cls(
            z1=float(np.clip(s[0, 2], -1.0, 1.0)),
            phi1=float(np.arctan2(s[0, 1], s[0, 0])),
            z2=float(np.clip(s[1, 2], -1.0, 1.0)),
            phi2=float(np.arctan2(s[1, 1], s[1, 0])),
        )

    def as_array(self) -> NDArray:
        return np.array([self.z1, self.phi1, self.z2, self.phi2])

    def to_cartesian(self) -> NDArray:
        """Unit Bloch vectors as a flat array ``[s1x, s1y, s1z, s2x, s2y, s2z]``."""
        return canonical_to_cartesian(self.as_array())

    def swapped(self) -> ClassicalState:
        return ClassicalState(z1=self.z2, phi1=self.phi2, z2=self.z1, phi2=self.phi1)

    @property
    def z_plus(self) -> float:
        return 0.5 * (self.z1 + self.z2)

    @property
    def z_minus(self) -> float:
        return 0.5 * (self.z1 - self.z2)


def canonical_to_cartesian(x: NDArray) -> NDArray:
    """Converts ``(..., 4)`` canonical arrays into ``(..., 6)`` Bloch-vector arrays."""
    x = np.asarray(x, dtype=float)
    z = np.clip(x[..., [0, 2]], -1.0 + POLE_CLAMP, 1.0 - POLE_CLAMP)
    phi = x[..., [1, 3]]
    r = np.sqrt(1.0 - z**2)
    spins = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    return spins.reshape(*x.shape[:-1], 6)


def cartesian_to_canonical(s: NDArray) -> NDArray:
    """Converts ``(..., 6)`` Bloch-vector arrays into ``(..., 4)`` canonical arrays."""
    s = np.asarray(s, dtype=float).reshape(*np.shape(s)[:-1], 2, 3)
    norms = np.linalg.norm(s, axis=-1)
    z = np.clip(s[..., 2] / norms, -1.0 + POLE_CLAMP, 1.0 - POLE_CLAMP)
    phi = np.arctan2(s[..., 1], s[..., 0])
    return np.stack([z[..., 0], phi[..., 0], z[..., 1], phi[..., 1]], axis=-1)


class FixedPoint(BaseModel):
    """A stationary point of the mean-field flow together with its linear stability."""

    model_config = ConfigDict(frozen=True)

    family: Family = Field(description="Fixed-point family tag.")
    location: ClassicalState = Field(description="Location in the canonical chart.")
    eigenvalues: List[complex] = Field(description="Eigenvalues of the 4x4 Jacobian at the location.")
    classification: Stability = Field(description="Stability class derived from the eigenvalue real parts.")
    residual: float = Field(default=0.0, description="Max-norm of the flow at the location.")
    branch: int = Field(default=0, description="Sign of z1 for branch-carrying families, 0 otherwise.")

    @property
    def max_real(self) -> float:
        return max(ev.real for ev in self.eigenvalues)

    @model_validator(mode="after")
    def _four_eigenvalues(self) -> FixedPoint:
        if len(self.eigenvalues) != 4:
            raise DomainError(f"expected 4 stability eigenvalues, got {len(self.eigenvalues)}")
        return self


class StabilityResult(BaseModel):
    eigenvalues: List[complex] = Field(description="Jacobian eigenvalues sorted by descending real part.")
    classification: Stability = Field(description="Stability class.")


class Frequencies(BaseModel):
    """Small-oscillation frequencies of the in-phase and out-of-phase modes."""

    omega_plus: float = Field(description="Frequency ω+ of the stiffer mode.")
    omega_minus: float = Field(description="Frequency ω- of the softer mode; 0 when unstable.")
    growth_rate: Optional[float] = Field(
        default=None, description="Real growth rate |Im ω-| when V exceeds the critical coupling."
    )

    @property
    def unstable(self) -> bool:
        return self.growth_rate is not None


class RootSearchFailure(BaseModel):
    seed: Tuple[float, float, float, float] = Field(description="Starting point (z1, φ1, z2, φ2).")
    reason: str = Field(description="Why the damped Newton iteration gave up.")


class BifurcationBranch(BaseModel):
    V: float = Field(description="Interspecies coupling of this slice.")
    family: Family = Field(description="Fixed-point family.")
    z1: float = Field(description="Imbalance of species 1 at the fixed point.")
    z2: float = Field(description="Imbalance of species 2 at the fixed point.")
    classification: Stability = Field(description="Stability class.")


class PhaseBoundary(BaseModel):
    gamma: float = Field(description="Dissipation rate.")
    V_c: float = Field(description="Critical coupling of the dissipative phase transition.")
    V_tilde_c: Optional[float] = Field(
        default=None, description="Coupling at which FP-IV loses stability; None when no crossing exists."
    )
