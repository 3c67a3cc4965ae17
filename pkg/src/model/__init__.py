from model.constants import Family, Representation, Stability
from model.dynamics import (
    canonical_rhs,
    cartesian_drift,
    cartesian_jacobian,
    energy,
    equations_of_motion,
    jacobian,
    numerical_jacobian,
)
from model.model_types import (
    BifurcationBranch,
    ClassicalState,
    FixedPoint,
    Frequencies,
    ModelParams,
    PhaseBoundary,
    StabilityResult,
    canonical_to_cartesian,
    cartesian_to_canonical,
    wrap_phase,
    wrap_phase_array,
)
from model.stability import (
    analytic_fixed_points,
    bifurcation_diagram,
    classify,
    critical_coupling,
    find_numeric_fixed_points,
    fixed_points,
    fp4_max_real,
    fp4_stability_boundary,
    linear_stability,
    oscillation_frequencies,
    phase_diagram,
    refine_fixed_point,
    self_trapped_imbalance,
)

__all__ = [
    "analytic_fixed_points",
    "BifurcationBranch",
    "ClassicalState",
    "Family",
    "FixedPoint",
    "Frequencies",
    "ModelParams",
    "PhaseBoundary",
    "Representation",
    "Stability",
    "StabilityResult",
    "bifurcation_diagram",
    "canonical_rhs",
    "canonical_to_cartesian",
    "cartesian_drift",
    "cartesian_jacobian",
    "cartesian_to_canonical",
    "classify",
    "critical_coupling",
    "energy",
    "equations_of_motion",
    "find_numeric_fixed_points",
    "fixed_points",
    "fp4_max_real",
    "fp4_stability_boundary",
    "jacobian",
    "linear_stability",
    "numerical_jacobian",
    "oscillation_frequencies",
    "phase_diagram",
    "refine_fixed_point",
    "self_trapped_imbalance",
    "wrap_phase",
    "wrap_phase_array",
]
