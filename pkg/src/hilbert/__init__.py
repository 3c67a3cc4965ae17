from hilbert.hilbert_types import DensitySeries, Operator, SpinOperatorSet, TwoSpinOperators
from hilbert.lindblad import (
    check_density_matrix,
    lindblad_evolve,
    lindblad_rhs,
    lindblad_steady_state,
    vectorized_generator,
)
from hilbert.operators import (
    build_hamiltonian,
    build_spin_operators,
    coherent_state,
    expectation,
    jump_operators,
    product_coherent_state,
    species_swap,
    to_dense,
    two_spin_operators,
)

__all__ = [
    "DensitySeries",
    "Operator",
    "SpinOperatorSet",
    "TwoSpinOperators",
    "build_hamiltonian",
    "build_spin_operators",
    "check_density_matrix",
    "coherent_state",
    "expectation",
    "jump_operators",
    "lindblad_evolve",
    "lindblad_rhs",
    "lindblad_steady_state",
    "product_coherent_state",
    "species_swap",
    "to_dense",
    "two_spin_operators",
    "vectorized_generator",
]
