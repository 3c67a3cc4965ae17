from __future__ import annotations

from typing import Union

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

Operator = Union[np.ndarray, sparse.spmatrix]


class SpinOperatorSet(BaseModel):
    """Single-spin matrices in the basis ``m = S, S-1, ..., -S``."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    S: float = Field(description="Spin magnitude.")
    Sx: np.ndarray = Field(description="x component.")
    Sy: np.ndarray = Field(description="y component.")
    Sz: np.ndarray = Field(description="z component, diag(S, ..., -S).")
    Sp: np.ndarray = Field(description="Raising operator.")
    Sm: np.ndarray = Field(description="Lowering operator, the adjoint of Sp.")

    @property
    def dim(self) -> int:
        return self.Sz.shape[0]


class TwoSpinOperators(BaseModel):
    """Single-spin operators embedded in the product space, species 1 major."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    S: float = Field(description="Spin magnitude per species.")
    S1x: Operator = Field(description="Sx ⊗ I.")
    S1y: Operator = Field(description="Sy ⊗ I.")
    S1z: Operator = Field(description="Sz ⊗ I.")
    S1m: Operator = Field(description="S- ⊗ I.")
    S2x: Operator = Field(description="I ⊗ Sx.")
    S2y: Operator = Field(description="I ⊗ Sy.")
    S2z: Operator = Field(description="I ⊗ Sz.")
    S2m: Operator = Field(description="I ⊗ S-.")

    @property
    def dim(self) -> int:
        return self.S1z.shape[0]


class DensitySeries(BaseModel):
    """Density matrices on a time grid."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    times: np.ndarray = Field(description="Sample times.")
    rhos: np.ndarray = Field(description="Density matrices, shape (n_times, D, D).")
    S: float = Field(description="Spin magnitude per species.")

    def trace(self) -> NDArray:
        return np.real(np.trace(self.rhos, axis1=1, axis2=2))
