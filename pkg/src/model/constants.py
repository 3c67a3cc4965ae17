from enum import Enum


class Family(str, Enum):
    FP_I = "FP-I"
    FP_II = "FP-II"
    FP_III = "FP-III"
    FP_IV = "FP-IV"
    NUMERIC = "numeric"


class Stability(str, Enum):
    CENTER = "center"
    ATTRACTOR = "attractor"
    UNSTABLE = "unstable"
    # some directions contract while others are neutral
    MARGINAL = "marginal"


class Representation(str, Enum):
    CANONICAL = "canonical"
    CARTESIAN = "cartesian"


# |Re λ| below this (in units of J) counts as zero
STABILITY_TOL = 1e-8
RESIDUAL_TOL = 1e-10
# 1 - |z| below this is treated as sitting on a pole of the canonical chart
POLE_TOL = 1e-8
POLE_CLAMP = 1e-12
FINITE_DIFFERENCE_STEP = 1e-6

NEWTON_LATTICE = 16
NEWTON_MAX_ITER = 100
NEWTON_DEDUP_RADIUS = 1e-6

BOUNDARY_SCAN_POINTS = 200
BOUNDARY_V_MAX = 10.0
BOUNDARY_XTOL = 1e-9
