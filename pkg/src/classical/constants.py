INTEGRATOR_METHOD = "DOP853"
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
NORM_TOL = 1e-9

DEFAULT_EPSILON = 1e-6

LYAPUNOV_RENORM_INTERVAL = 1.0
LYAPUNOV_DISCARD = 50.0
LYAPUNOV_TOTAL_TIME = 2000.0
LYAPUNOV_RTOL = 1e-9
LYAPUNOV_ATOL = 1e-11
# |s_i| drift beyond this marks a sample as escaped
ESCAPE_TOL = 1e-6

# growth-fit window: from this multiple of the initial value ...
FIT_LOWER_FACTOR = 10.0
# ... up to this fraction of the peak
FIT_UPPER_FRACTION = 0.1
FIT_MIN_POINTS = 3

ENSEMBLE_BLOCK_SIZE = 16

# FP-IV island screen: members whose late-window mean z₋ exceeds this stay self-trapped
ISLAND_IMBALANCE = 0.25
ISLAND_SCREEN_TIME = 500.0
ISLAND_SCREEN_SAMPLES = 101
ISLAND_OVERSAMPLING = 2
