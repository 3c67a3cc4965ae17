import numpy as np

HUSIMI_PREFACTOR = 1.0 / np.pi
HUSIMI_GRID = (101, 100)
PADDING_FACTOR = 4
SPECTRUM_WINDOW = "hann"
# spread of p(φ_m) below which a distribution has no mode to centre
FLAT_TOL = 1e-12

Z1 = "z1"
Z2 = "z2"
Z_MINUS_SQ = "z_minus_sq"
S1Y = "s1y"
S2Y = "s2y"
