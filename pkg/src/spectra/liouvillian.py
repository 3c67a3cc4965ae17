from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, sparse
from scipy.sparse.linalg import spsolve

from errors import SizeBudgetError, SymmetryError
from hilbert import species_swap, vectorized_generator
from model import ModelParams
from spectra.constants import COMMUTATOR_TOL, DENSE_BUDGET_BYTES
from spectra.spectra_types import Superoperator
from utils.logger import LoggerFactory
from utils.parallel import map_blocks

logger = LoggerFactory.get_logger(name="LIOUVILLIAN_SPECTRA")

COMPLEX_BYTES = np.dtype(np.complex128).itemsize


def dense_bytes(dim: int) -> int:
    return dim * dim * COMPLEX_BYTES


def _check_budget(dim: int, budget_bytes: int, what: str) -> None:
    required = dense_bytes(dim)
    if required > budget_bytes:
        raise SizeBudgetError(required, budget_bytes, what=f"Dense {what} of dimension {dim}")


def build_liouvillian(
    params: ModelParams,
    use_sparse: bool = False,
    budget_bytes: int = DENSE_BUDGET_BYTES,
) -> Superoperator:
    """Vectorized Lindblad generator in the column-stacking convention.

    Args:
        params (ModelParams): Model couplings.
        use_sparse (bool): Build a CSR matrix, bypassing the dense budget.
        budget_bytes (int): Memory available to a dense matrix.

    Returns:
        Superoperator: ``L`` of dimension ``(2S+1)^4``.

    Raises:
        SizeBudgetError: If the dense matrix does not fit ``budget_bytes``.
    """
    dim = params.dim**4
    if not use_sparse:
        _check_budget(dim, budget_bytes, "Liouvillian")
    logger.debug(f"Building {'sparse' if use_sparse else 'dense'} Liouvillian of dimension {dim}")
    return Superoperator(matrix=vectorized_generator(params, use_sparse=use_sparse), S=params.S)


def exchange_permutation(S: float) -> NDArray:
    """Index map of ``Π_s = Π ⊗ Π*`` on column-stacked indices: ``(Π_s v)[i] = v[perm[i]]``."""
    swap = species_swap(S)
    local = np.argmax(swap, axis=1)
    dim = local.size
    column, row = np.divmod(np.arange(dim * dim), dim)
    # vec index row + D·column holds ρ[row, column]; (ΠρΠ)[a, b] = ρ[π(a), π(b)]
    return local[row] + dim * local[column]


def _sector_isometries(perm: NDArray) -> Dict[int, sparse.csr_matrix]:
    """Orthonormal bases of the ``Π_s = ±1`` eigenspaces of a permutation of order two."""
    size = perm.size
    index = np.arange(size)
    fixed = index[perm == index]
    pairs = index[perm > index]
    partners = perm[pairs]
    half = 1.0 / np.sqrt(2.0)
    n_plus = fixed.size + pairs.size

    plus_rows = np.concatenate([fixed, pairs, partners])
    paired = fixed.size + np.arange(pairs.size)
    plus_cols = np.concatenate([np.arange(fixed.size), paired, paired])
    plus_data = np.concatenate([np.ones(fixed.size), np.full(pairs.size, half), np.full(pairs.size, half)])
    minus_rows = np.concatenate([pairs, partners])
    minus_cols = np.concatenate([np.arange(pairs.size), np.arange(pairs.size)])
    minus_data = np.concatenate([np.full(pairs.size, half), np.full(pairs.size, -half)])
    return {
        1: sparse.csr_matrix((plus_data.astype(complex), (plus_rows, plus_cols)), shape=(size, n_plus)),
        -1: sparse.csr_matrix((minus_data.astype(complex), (minus_rows, minus_cols)), shape=(size, pairs.size)),
    }


def _max_abs(matrix) -> float:
    if sparse.issparse(matrix):
        return float(abs(matrix).max()) if matrix.nnz else 0.0
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


def exchange_sectors(
    L: Superoperator,
    sectors: Iterable[int] = (1, -1),
    budget_bytes: int = DENSE_BUDGET_BYTES,
) -> Dict[int, Superoperator]:
    """Splits ``L`` into the blocks of the weak exchange symmetry ``Π_s = Π ⊗ Π*``.

    The commutator ``[L, Π_s]`` is checked before projecting. Blocks are
    returned dense.

    Args:
        L (Superoperator): Full-space Liouvillian, dense or sparse.
        sectors (Iterable[int]): Parities to project onto.
        budget_bytes (int): Memory available to one dense block.

    Returns:
        Dict[int, Superoperator]: Block per requested parity.

    Raises:
        SymmetryError: If ``‖[L, Π_s]‖_max`` exceeds ``1e-12``.
        SizeBudgetError: If a dense block does not fit ``budget_bytes``.
    """
    perm = exchange_permutation(L.S)
    if perm.size != L.dim:
        raise SymmetryError(f"superoperator dimension {L.dim} does not match S={L.S}")
    commutator = _max_abs(L.matrix[perm][:, perm] - L.matrix)
    if commutator > COMMUTATOR_TOL:
        raise SymmetryError(f"||[L, Pi_s]||_max = {commutator:.3e} exceeds {COMMUTATOR_TOL}")

    isometries = _sector_isometries(perm)
    blocks: Dict[int, Superoperator] = {}
    for parity in sectors:
        basis = isometries[parity]
        _check_budget(basis.shape[1], budget_bytes, f"sector {parity:+d}")
        block = basis.conj().T @ (L.matrix @ basis)
        dense = block.toarray() if sparse.issparse(block) else np.asarray(block)
        blocks[parity] = Superoperator(matrix=dense, S=L.S, sector=parity)
        logger.debug(f"Sector {parity:+d}: dimension {basis.shape[1]}")
    return blocks


def liouvillian_spectrum(L: Superoperator) -> NDArray:
    """All eigenvalues of a dense (block of a) Liouvillian, general non-Hermitian solver."""
    return linalg.eigvals(L.dense(), overwrite_a=False, check_finite=True)


def _sector_eigenvalues(params: ModelParams, parity: int, budget_bytes: int) -> NDArray:
    blocks = exchange_sectors(build_liouvillian(params, use_sparse=True), sectors=(parity,), budget_bytes=budget_bytes)
    return liouvillian_spectrum(blocks[parity])


def sector_spectra(
    params: ModelParams,
    sectors: Tuple[int, ...] = (1,),
    budget_bytes: int = DENSE_BUDGET_BYTES,
    n_jobs: Optional[int] = None,
) -> Dict[int, NDArray]:
    """Eigenvalues of the requested exchange sectors, one sector per worker."""
    results: List[NDArray] = map_blocks(
        _sector_eigenvalues,
        [(params, parity, budget_bytes) for parity in sectors],
        n_jobs=n_jobs,
        label="Liouvillian sectors",
    )
    return dict(zip(sectors, results))


def steady_state(L: Superoperator) -> NDArray:
    """Zero mode of ``L`` as a Hermitian unit-trace density matrix.

    Dense superoperators use the eigenvector of the eigenvalue closest to 0;
    sparse ones solve ``L vec(ρ) = 0`` with one row replaced by ``Tr ρ = 1``.
    """
    local = int(round(np.sqrt(L.dim)))
    if L.is_sparse:
        system = L.matrix.tolil(copy=True)
        system[0, :] = np.eye(local, dtype=complex).ravel(order="F")
        rhs = np.zeros(L.dim, dtype=complex)
        rhs[0] = 1.0
        vector = spsolve(system.tocsc(), rhs)
    else:
        eigenvalues, eigenvectors = linalg.eig(L.dense())
        vector = eigenvectors[:, int(np.argmin(np.abs(eigenvalues)))]
    rho = vector.reshape(local, local, order="F")
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
