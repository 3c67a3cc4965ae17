from enum import Enum


class Regime(str, Enum):
    POISSON = "poisson-like"
    GINIBRE = "ginibre-like"
    INCONCLUSIVE = "inconclusive"


VECTORIZATION = "column-stacking: vec(A rho B) = (B^T kron A) vec(rho)"
# bytes available to one dense superoperator (or one dense sector block)
DENSE_BUDGET_BYTES = 4 * 1024**3
COMMUTATOR_TOL = 1e-12
DEGENERACY_TOL = 1e-10
ZERO_MODE_TOL = 1e-8
UNFOLDING_NEIGHBOURS = 30
BOUNDARY_FRACTION = 0.05
POISSON_MAX_ANISOTROPY = 0.08
GINIBRE_MIN_ANISOTROPY = 0.16
SMALL_SPACING_WINDOW = (0.05, 0.3)
GINIBRE_REFERENCE_SIZE = 1000
GINIBRE_REFERENCE_SAMPLES = 8
GINIBRE_REFERENCE_SEED = 20240101
