from enum import Enum


class Scenario(str, Enum):
    CLASSICAL = "classical"
    TWA = "twa"
    QUANTUM_TRAJECTORY = "quantum-trajectory"
    LIOUVILLIAN = "liouvillian"
    PHASE_DIAGRAM = "phase-diagram"


class InitialKind(str, Enum):
    COHERENT = "coherent"
    FIXED_POINT = "fixed-point"
    REGION = "region"


class DynamicalRegime(str, Enum):
    OSCILLATORY = "oscillatory"
    SELF_TRAPPED = "self-trapped-attractor"
    TRANSIENT_CHAOS = "transient-chaos"
    STEADY_STATE_CHAOS = "steady-state-chaos"


class CriterionStatus(str, Enum):
    PASSED = "passed"
    FAILED = "failed"
    SKIPPED = "skipped"


GRID_AXES = ("V", "gamma", "omega_z", "S")
MANIFEST_FILE = "manifest.json"
RUN_LOG_FILE = "run.log"
SWEEP_FILE = "sweep.csv"
# Λ_l above this counts as a chaotic attractor
LYAPUNOV_CHAOS_THRESHOLD = 0.02
# early decorrelator rate above this counts as transient sensitivity
EARLY_GROWTH_THRESHOLD = 0.2
# largest S for which reduced density matrices are accumulated on every output time
REDUCED_MAX_S = 20.0
