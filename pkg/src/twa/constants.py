# largest admissible step in units of 1/J
MAX_DT = 1e-3
DEFAULT_DT = 1e-3
# | |s| - 1 | after a step, before renormalization
NORM_DRIFT_TOL = 1e-4
SAMPLE_BLOCK_SIZE = 256
NOISE_CHUNK_STEPS = 512
# fraction of FP-IV imbalance memory that counts as retained
DWELL_THRESHOLD = 0.5
