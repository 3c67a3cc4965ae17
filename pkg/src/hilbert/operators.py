from __future__ import annotations

from functools import lru_cache
from typing import List, Union

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from scipy.special import gammaln

from errors import DomainError
from hilbert.constants import DENSE_MAX_S
from hilbert.hilbert_types import Operator, SpinOperatorSet, TwoSpinOperators
from model import ClassicalState, ModelParams


def _check_spin(S: float) -> int:
    twice = 2.0 * S
    if S < 0.5 or abs(twice - round(twice)) > 1e-12:
        raise DomainError(f"S must be a positive half-integer, got {S}")
    return int(round(twice)) + 1


@lru_cache(maxsize=32)
def build_spin_operators(S: float) -> SpinOperatorSet:
    """Spin matrices of magnitude ``S`` in the ``m``-descending basis.

    ``<m+1|S+|m> = sqrt(S(S+1) - m(m+1))``.

    Raises:
        DomainError: If ``2S`` is not a positive integer.
    """
    dim = _check_spin(S)
    m = S - np.arange(dim)
    ladder = np.sqrt(S * (S + 1.0) - m[1:] * (m[1:] + 1.0))
    Sp = np.diag(ladder, k=1).astype(complex)
    Sm = Sp.conj().T
    ops = SpinOperatorSet(
        S=S,
        Sx=0.5 * (Sp + Sm),
        Sy=-0.5j * (Sp - Sm),
        Sz=np.diag(m).astype(complex),
        Sp=Sp,
        Sm=Sm,
    )
    for matrix in (ops.Sx, ops.Sy, ops.Sz, ops.Sp, ops.Sm):
        matrix.setflags(write=False)
    return ops


@lru_cache(maxsize=16)
def two_spin_operators(S: float, use_sparse: bool = False) -> TwoSpinOperators:
    """Embeds the single-spin operators into the two-species product space.

    Args:
        S (float): Spin magnitude per species.
        use_sparse (bool): Return CSR matrices instead of dense arrays.

    Returns:
        TwoSpinOperators: Operators with species 1 as the major index.
    """
    ops = build_spin_operators(S)
    if not use_sparse and S > DENSE_MAX_S:
        use_sparse = True
    kron = sparse.kron if use_sparse else np.kron
    identity = sparse.identity(ops.dim, dtype=complex, format="csr") if use_sparse else np.eye(ops.dim, dtype=complex)

    def embed(matrix: NDArray, first: bool) -> Operator:
        single = sparse.csr_matrix(matrix) if use_sparse else matrix
        product = kron(single, identity) if first else kron(identity, single)
        return sparse.csr_matrix(product) if use_sparse else product

    return TwoSpinOperators(
        S=S,
        S1x=embed(ops.Sx, True),
        S1y=embed(ops.Sy, True),
        S1z=embed(ops.Sz, True),
        S1m=embed(ops.Sm, True),
        S2x=embed(ops.Sx, False),
        S2y=embed(ops.Sy, False),
        S2z=embed(ops.Sz, False),
        S2m=embed(ops.Sm, False),
    )


def to_dense(op: Operator) -> NDArray:
    return op.toarray() if sparse.issparse(op) else np.asarray(op)


def build_hamiltonian(params: ModelParams, use_sparse: bool = False) -> Operator:
    """Coupled-top Hamiltonian ``-J(S1x + S2x) + (V/S) S1z S2z + ω_z (S1z + S2z)``."""
    ops = two_spin_operators(params.S, use_sparse)
    return (
        -params.J * (ops.S1x + ops.S2x)
        + (params.V / params.S) * (ops.S1z @ ops.S2z)
        + params.omega_z * (ops.S1z + ops.S2z)
    )


def jump_operators(params: ModelParams, use_sparse: bool = False) -> List[Operator]:
    """Collective decay channels ``O_i = sqrt(γ/S) S_i-`` of both species."""
    ops = two_spin_operators(params.S, use_sparse)
    rate = np.sqrt(params.gamma / params.S)
    return [rate * ops.S1m, rate * ops.S2m]


@lru_cache(maxsize=16)
def species_swap(S: float) -> NDArray:
    """Permutation ``Π |m1, m2> = |m2, m1>`` on the product basis."""
    dim = _check_spin(S)
    k1, k2 = np.divmod(np.arange(dim * dim), dim)
    swap = np.zeros((dim * dim, dim * dim))
    swap[k2 * dim + k1, k1 * dim + k2] = 1.0
    swap.setflags(write=False)
    return swap


def coherent_state(theta: float, phi: float, S: float) -> NDArray:
    """Spin coherent state pointing along ``(sinθ cosφ, sinθ sinφ, cosθ)``.

    Closed binomial form ``<S-k|θ,φ> = sqrt(C(2S,k)) cos^{2S-k}(θ/2) sin^k(θ/2) e^{ikφ}``
    evaluated in log space, so large ``S`` near the south pole does not underflow.

    Raises:
        DomainError: If ``theta`` lies outside ``[0, π]`` or ``S`` is invalid.
    """
    dim = _check_spin(S)
    if not 0.0 <= theta <= np.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    state = np.zeros(dim, dtype=complex)
    if theta == 0.0:
        state[0] = 1.0
        return state
    if theta == np.pi:
        state[-1] = np.exp(1j * (dim - 1) * phi)
        return state

    n = dim - 1
    k = np.arange(dim)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_amp = 0.5 * log_binom + (n - k) * np.log(np.cos(0.5 * theta)) + k * np.log(np.sin(0.5 * theta))
    state = np.exp(log_amp) * np.exp(1j * k * phi)
    return state / np.linalg.norm(state)


def product_coherent_state(state: ClassicalState, S: float) -> NDArray:
    """``|θ1,φ1> ⊗ |θ2,φ2>`` for the classical point ``state`` with ``θ_i = arccos z_i``."""
    first = coherent_state(float(np.arccos(np.clip(state.z1, -1.0, 1.0))), state.phi1, S)
    second = coherent_state(float(np.arccos(np.clip(state.z2, -1.0, 1.0))), state.phi2, S)
    return np.kron(first, second)


def expectation(op: Operator, state: NDArray) -> Union[complex, NDArray]:
    """``<ψ|A|ψ>`` for vectors (columns batch) or ``Tr(Aρ)`` for matrices.

    A 1-D ``state`` is a single ket; a 2-D square ``state`` is a density matrix;
    a 3-D ``state`` is a stack of density matrices.
    """
    state = np.asarray(state)
    if state.ndim == 1:
        return complex(np.vdot(state, op @ state))
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        return complex(np.sum((op @ state).diagonal()))
    if state.ndim == 3:
        dense = op.toarray() if sparse.issparse(op) else np.asarray(op)
        return np.einsum("ij,tji->t", dense, state)
    raise DomainError(f"cannot take an expectation value over an array of shape {state.shape}")
