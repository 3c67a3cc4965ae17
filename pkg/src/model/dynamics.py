"""Mean-field flow of the two-species junction in both charts.

Canonical arrays are ordered ``(z1, φ1, z2, φ2)``; Cartesian arrays are
``(s1x, s1y, s1z, s2x, s2y, s2z)``. Every function broadcasts over leading
axes so ensembles can be evaluated in one call.
"""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.typing import NDArray

from errors import PoleError
from model.constants import FINITE_DIFFERENCE_STEP, POLE_TOL
from model.model_types import ClassicalState, ModelParams


def canonical_rhs(x: NDArray, params: ModelParams) -> NDArray:
    """Time derivative of ``(z1, φ1, z2, φ2)``.

    Raises:
        PoleError: If any imbalance is within ``POLE_TOL`` of ±1.
    """
    x = np.asarray(x, dtype=float)
    z = x[..., [0, 2]]
    phi = x[..., [1, 3]]
    one_minus = 1.0 - z**2
    if np.any(one_minus < 2.0 * POLE_TOL):
        raise PoleError("canonical chart evaluated at |z| -> 1; use the Cartesian chart")
    root = np.sqrt(one_minus)
    J, V, gamma = params.J, params.V, params.gamma

    z_dot = -J * root * np.sin(phi) - gamma * one_minus
    phi_dot = J * z * np.cos(phi) / root + V * z[..., ::-1] + params.omega_z
    return np.stack([z_dot[..., 0], phi_dot[..., 0], z_dot[..., 1], phi_dot[..., 1]], axis=-1)


def equations_of_motion(state: ClassicalState, params: ModelParams) -> NDArray:
    """Instantaneous ``(ż1, φ̇1, ż2, φ̇2)`` at ``state``."""
    return canonical_rhs(state.as_array(), params)


def jacobian(x: NDArray, params: ModelParams) -> NDArray:
    """Closed-form Jacobian of ``canonical_rhs``, shape ``(..., 4, 4)``.

    Raises:
        PoleError: If any imbalance is within ``POLE_TOL`` of ±1.
    """
    x = np.asarray(x, dtype=float)
    z = x[..., [0, 2]]
    phi = x[..., [1, 3]]
    one_minus = 1.0 - z**2
    if np.any(one_minus < 2.0 * POLE_TOL):
        raise PoleError("Jacobian evaluated at |z| -> 1; use the Cartesian chart")
    root = np.sqrt(one_minus)
    sin, cos = np.sin(phi), np.cos(phi)
    J, gamma = params.J, params.gamma

    dzdot_dz = J * z * sin / root + 2.0 * gamma * z
    dzdot_dphi = -J * root * cos
    dphidot_dz = J * cos / one_minus**1.5
    dphidot_dphi = -J * z * sin / root

    jac = np.zeros(x.shape[:-1] + (4, 4))
    for species, (row_z, row_phi) in enumerate(((0, 1), (2, 3))):
        other_z = 2 if species == 0 else 0
        jac[..., row_z, row_z] = dzdot_dz[..., species]
        jac[..., row_z, row_phi] = dzdot_dphi[..., species]
        jac[..., row_phi, row_z] = dphidot_dz[..., species]
        jac[..., row_phi, row_phi] = dphidot_dphi[..., species]
        jac[..., row_phi, other_z] = params.V
    return jac


def numerical_jacobian(
    func: Callable[[NDArray], NDArray], x: NDArray, step: float = FINITE_DIFFERENCE_STEP
) -> NDArray:
    """Central-difference Jacobian of ``func`` at a single point ``x``."""
    x = np.asarray(x, dtype=float)
    columns = []
    for index in range(x.size):
        offset = np.zeros_like(x)
        offset[index] = step
        columns.append((func(x + offset) - func(x - offset)) / (2.0 * step))
    return np.stack(columns, axis=-1)


def cartesian_drift(s: NDArray, params: ModelParams) -> NDArray:
    """Deterministic Bloch-vector drift; preserves each ``|s_i|`` exactly."""
    s = np.asarray(s, dtype=float)
    s1x, s1y, s1z, s2x, s2y, s2z = (s[..., k] for k in range(6))
    J, V, gamma, w = params.J, params.V, params.gamma, params.omega_z
    return np.stack(
        [
            -V * s1y * s2z + gamma * s1x * s1z - w * s1y,
            J * s1z + V * s1x * s2z + gamma * s1y * s1z + w * s1x,
            -J * s1y - gamma * (s1x**2 + s1y**2),
            -V * s2y * s1z + gamma * s2x * s2z - w * s2y,
            J * s2z + V * s2x * s1z + gamma * s2y * s2z + w * s2x,
            -J * s2y - gamma * (s2x**2 + s2y**2),
        ],
        axis=-1,
    )


def cartesian_jacobian(s: NDArray, params: ModelParams) -> NDArray:
    """Jacobian of ``cartesian_drift``, shape ``(..., 6, 6)``."""
    s = np.asarray(s, dtype=float)
    J, V, gamma, w = params.J, params.V, params.gamma, params.omega_z
    jac = np.zeros(s.shape[:-1] + (6, 6))
    for own, other in ((0, 3), (3, 0)):
        sx, sy, sz = s[..., own], s[..., own + 1], s[..., own + 2]
        oz = s[..., other + 2]
        x, y, zz = own, own + 1, own + 2
        jac[..., x, x] = gamma * sz
        jac[..., x, y] = -V * oz - w
        jac[..., x, zz] = gamma * sx
        jac[..., x, other + 2] = -V * sy
        jac[..., y, x] = V * oz + w
        jac[..., y, y] = gamma * sz
        jac[..., y, zz] = J + gamma * sy
        jac[..., y, other + 2] = V * sx
        jac[..., zz, x] = -2.0 * gamma * sx
        jac[..., zz, y] = -J - 2.0 * gamma * sy
    return jac


def energy(s: NDArray, params: ModelParams) -> NDArray:
    """Mean-field energy per spin, conserved when ``gamma == 0``."""
    s = np.asarray(s, dtype=float)
    return (
        -params.J * (s[..., 0] + s[..., 3])
        + params.V * s[..., 2] * s[..., 5]
        + params.omega_z * (s[..., 2] + s[..., 5])
    )
