# dense two-spin matrices are built up to this spin magnitude
DENSE_MAX_S = 6.0
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
LINDBLAD_RTOL = 1e-10
LINDBLAD_ATOL = 1e-12
