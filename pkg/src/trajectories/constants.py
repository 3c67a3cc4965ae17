from enum import Enum


class JumpScheme(str, Enum):
    FIRST_ORDER = "first-order"
    WAITING_TIME = "norm-waiting-time"


class Species(int, Enum):
    FIRST = 1
    SECOND = 2


DEFAULT_DT = 2e-3
# dt * max <O†O> of a single channel
JUMP_BUDGET = 0.05
# δP1 + δP2 in any single step
MAX_JUMP_PROBABILITY = 0.1
BATCH_SIZE = 32
UNIFORM_CHUNK_STEPS = 4096
NORM_TOL = 1e-10
