from __future__ import annotations

from typing import Dict, Mapping

import numpy as np
from numpy.typing import ArrayLike

from errors import DomainError
from hilbert import Operator, expectation, two_spin_operators
from observables.constants import S1Y, S2Y, Z1, Z2, Z_MINUS_SQ
from observables.observables_types import PopulationObservables


def population_operators(S: float, use_sparse: bool = False) -> Dict[str, Operator]:
    """Operators whose expectations determine ``population_observables``."""
    ops = two_spin_operators(S, use_sparse)
    z_minus = (ops.S1z - ops.S2z) / (2.0 * S)
    return {
        Z1: ops.S1z / S,
        Z2: ops.S2z / S,
        Z_MINUS_SQ: z_minus @ z_minus,
        S1Y: ops.S1y,
        S2Y: ops.S2y,
    }


def population_from_expectations(values: Mapping[str, ArrayLike], S: float, J: float = 1.0) -> PopulationObservables:
    """Assembles imbalances and currents from precomputed expectation values.

    Scalar expectations give 0-d arrays, so single states and time series share one type.
    """
    z1 = np.asarray(values[Z1], dtype=float)
    z2 = np.asarray(values[Z2], dtype=float)
    z_minus = np.asarray(0.5 * (z1 - z2))
    variance = np.asarray(values[Z_MINUS_SQ], dtype=float) - z_minus**2
    return PopulationObservables(
        z1=z1,
        z2=z2,
        z_plus=np.asarray(0.5 * (z1 + z2)),
        z_minus=z_minus,
        delta_z_minus=np.asarray(np.sqrt(np.clip(variance, 0.0, None))),
        current1=np.asarray(-J * np.asarray(values[S1Y], dtype=float) / S),
        current2=np.asarray(-J * np.asarray(values[S2Y], dtype=float) / S),
    )


def population_observables(state: ArrayLike, S: float, J: float = 1.0) -> PopulationObservables:
    """Imbalances ``<z_i>``, ``<z±>``, ``Δz₋`` and currents ``-J<S_iy>/S``.

    ``state`` is a ket, a density matrix or a stack of density matrices over
    the two-spin basis.
    """
    array = np.asarray(state)
    dim = (int(round(2.0 * S)) + 1) ** 2
    if array.shape[-1] != dim:
        raise DomainError(f"state dimension {array.shape[-1]} does not match S={S}")
    values = {name: np.real(expectation(op, array)) for name, op in population_operators(S).items()}
    return population_from_expectations(values, S, J)
