from __future__ import annotations

from typing import Dict, Optional, Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from spectra.constants import VECTORIZATION, Regime


class Superoperator(BaseModel):
    """Liouvillian matrix acting on column-stacked density matrices."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    matrix: Union[np.ndarray, sparse.spmatrix] = Field(
        description="Dense or CSR matrix of dimension D² (or a sector)."
    )
    S: float = Field(description="Spin magnitude per species.")
    sector: Optional[int] = Field(default=None, description="Exchange parity of the block, None for the full space.")
    convention: str = Field(default=VECTORIZATION, description="Vectorization convention.")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    def dense(self) -> NDArray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def apply(self, rho: NDArray) -> NDArray:
        """``L(ρ)`` for a full-space superoperator."""
        local = rho.shape[0]
        return np.asarray(self.matrix @ rho.ravel(order="F")).reshape(local, local, order="F")


class SpacingRatios(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    ratios: np.ndarray = Field(description="ξ_ν = (λ_NN - λ_ν)/(λ_NNN - λ_ν).")
    mean_r: float = Field(description="<|ξ|>.")
    mean_cos_theta: float = Field(description="<cos arg ξ>.")


class SpectrumRecord(BaseModel):
    """Spectral statistics of one exchange sector."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    eigenvalues: np.ndarray = Field(description="Complex eigenvalues of the sector.")
    sector: Optional[int] = Field(default=None, description="Exchange parity Π_s.")
    spacings: np.ndarray = Field(description="Unfolded nearest-neighbour spacings.")
    ratios: np.ndarray = Field(description="Complex spacing ratios.")
    mean_r: float = Field(description="<r>.")
    mean_cos_theta: float = Field(description="<cos θ>.")
    ks_poisson: float = Field(description="KS distance of the spacings to the 2D-Poisson law.")
    ks_ginibre: float = Field(description="KS distance of the spacings to the sampled Ginibre law.")
    small_spacing_exponent: Optional[float] = Field(default=None, description="β in P(δ) ~ δ^β at small δ.")
    classification: Regime = Field(default=Regime.INCONCLUSIVE, description="Regime label.")

    def summary(self) -> Dict[str, object]:
        return {
            "sector": self.sector,
            "n_eigenvalues": int(self.eigenvalues.size),
            "mean_r": self.mean_r,
            "mean_cos_theta": self.mean_cos_theta,
            "ks_poisson": self.ks_poisson,
            "ks_ginibre": self.ks_ginibre,
            "small_spacing_exponent": self.small_spacing_exponent,
            "classification": self.classification.value,
        }

    def to_columns(self) -> Dict[str, NDArray]:
        return {
            "re": self.eigenvalues.real,
            "im": self.eigenvalues.imag,
            "sector": np.full(self.eigenvalues.size, float(self.sector or 0)),
        }
