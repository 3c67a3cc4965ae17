from __future__ import annotations

from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.linalg import lstsq

from errors import DomainError, IntegratorError, PositivityError
from hilbert.constants import HERMITICITY_TOL, LINDBLAD_ATOL, LINDBLAD_RTOL, POSITIVITY_TOL, TRACE_TOL
from hilbert.hilbert_types import DensitySeries, Operator
from hilbert.operators import build_hamiltonian, jump_operators, to_dense
from model import ModelParams
from utils.logger import LoggerFactory

logger = LoggerFactory.get_logger(name="QUANTUM_HILBERT")


@lru_cache(maxsize=8)
def _generator(params: ModelParams) -> Tuple[NDArray, List[NDArray], NDArray]:
    hamiltonian = to_dense(build_hamiltonian(params))
    jumps = [to_dense(op) for op in jump_operators(params)]
    decay = sum(op.conj().T @ op for op in jumps)
    return hamiltonian, jumps, decay


def check_density_matrix(rho: ArrayLike) -> NDArray:
    """Validates Hermiticity, unit trace and numerical positivity.

    Raises:
        DomainError: If ``rho`` is not square, not Hermitian or not unit-trace.
        PositivityError: If an eigenvalue lies below ``-POSITIVITY_TOL``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > TRACE_TOL:
        raise DomainError(f"density matrix trace is {np.trace(rho).real}, expected 1")
    smallest = float(np.linalg.eigvalsh(rho)[0])
    if smallest < -POSITIVITY_TOL:
        raise PositivityError(f"density matrix has eigenvalue {smallest:.3e}")
    return rho


def lindblad_rhs(rho: NDArray, params: ModelParams) -> NDArray:
    """``dρ/dt = -i[H, ρ] + Σ_i (O_i ρ O_i† - ½{O_i† O_i, ρ})``."""
    hamiltonian, jumps, decay = _generator(params)
    drho = -1j * (hamiltonian @ rho - rho @ hamiltonian)
    for op in jumps:
        drho += op @ rho @ op.conj().T
    drho -= 0.5 * (decay @ rho + rho @ decay)
    return drho


def lindblad_evolve(
    rho0: ArrayLike,
    params: ModelParams,
    t_grid: ArrayLike,
    tol: float = LINDBLAD_RTOL,
    atol: float = LINDBLAD_ATOL,
) -> DensitySeries:
    """Integrates the master equation directly; the exactness oracle for trajectories.

    Args:
        rho0 (ArrayLike): Initial density matrix, or a ket that is turned into one.
        params (ModelParams): Model couplings.
        t_grid (ArrayLike): Strictly increasing output times.
        tol (float): Relative tolerance.
        atol (float): Absolute tolerance.

    Returns:
        DensitySeries: ``ρ(t)`` on ``t_grid``.

    Raises:
        IntegratorError: If the integrator reports a failure.
    """
    state = np.asarray(rho0, dtype=complex)
    if state.ndim == 1:
        state = np.outer(state, state.conj())
    rho0 = check_density_matrix(state)
    dim = rho0.shape[0]
    times = np.asarray(t_grid, dtype=float)

    def rhs(_t: float, y: NDArray) -> NDArray:
        return lindblad_rhs(y.reshape(dim, dim, order="F"), params).ravel(order="F")

    solution = solve_ivp(
        rhs, (times[0], times[-1]), rho0.ravel(order="F"), method="DOP853", t_eval=times, rtol=tol, atol=atol
    )
    if not solution.success:
        raise IntegratorError(f"Lindblad integration failed: {solution.message}")
    rhos = solution.y.T.reshape(times.size, dim, dim, order="F")
    logger.debug(f"Lindblad oracle: {times.size} samples, D={dim}, {solution.nfev} evaluations")
    return DensitySeries(times=times, rhos=rhos, S=params.S)


def vectorized_generator(params: ModelParams, use_sparse: bool = False) -> Operator:
    """Column-stacking superoperator with ``vec(AρB) = (Bᵀ ⊗ A) vec(ρ)``.

    ``L = -i(I ⊗ H - Hᵀ ⊗ I) + Σ_i [O_i* ⊗ O_i - ½ I ⊗ O_i†O_i - ½ (O_i†O_i)ᵀ ⊗ I]``,
    dense or CSR.
    """
    if use_sparse:
        hamiltonian = sparse.csr_matrix(build_hamiltonian(params, use_sparse=True))
        jumps = [sparse.csr_matrix(op) for op in jump_operators(params, use_sparse=True)]
        decay = sum((op.conj().T @ op for op in jumps[1:]), jumps[0].conj().T @ jumps[0])
        identity = sparse.identity(hamiltonian.shape[0], dtype=complex, format="csr")
        kron = sparse.kron
    else:
        hamiltonian, jumps, decay = _generator(params)
        identity = np.eye(hamiltonian.shape[0], dtype=complex)
        kron = np.kron
    superop = -1j * (kron(identity, hamiltonian) - kron(hamiltonian.T, identity))
    for op in jumps:
        superop = superop + kron(op.conj(), op)
    superop = superop - 0.5 * (kron(identity, decay) + kron(decay.T, identity))
    return sparse.csr_matrix(superop) if use_sparse else superop


def lindblad_steady_state(params: ModelParams) -> NDArray:
    """Steady state from ``L vec(ρ) = 0`` with one equation replaced by ``Tr ρ = 1``."""
    superop = vectorized_generator(params)
    dim = int(round(np.sqrt(superop.shape[0])))
    system = superop.copy()
    rhs = np.zeros(superop.shape[0], dtype=complex)
    system[0, :] = np.eye(dim, dtype=complex).ravel(order="F")
    rhs[0] = 1.0
    solution = lstsq(system, rhs)[0]
    rho = solution.reshape(dim, dim, order="F")
    return 0.5 * (rho + rho.conj().T)
