"""Caps, tolerances and numerical steps used across the lab."""

# Geometry
MAX_SITES = 2**32

# Exact enumeration and spectral solvers (site counts, state space is 2**n)
ENUMERATION_MAX_SITES = 20
GENERATOR_MAX_SITES = 20
DENSE_EIG_MAX_SITES = 14
SPARSE_GAP_MAX_SITES = 20
LSI_MAX_SITES = 12
SEMIGROUP_DENSE_MAX_SITES = 14
SEMIGROUP_MAX_SITES = 20
AXIOM_EXHAUSTIVE_MAX_SITES = 16

# Tolerances
NORMALIZATION_TOL = 1e-12
DETAILED_BALANCE_TOL = 1e-12
ROW_SUM_TOL = 1e-12
STATIONARITY_TOL = 1e-10
IDENTITY_TOL = 1e-10
INEQUALITY_RTOL = 1e-9
LSI_CERTIFICATE_TOL = 1e-8
LSI_REFINE_TOL = 1e-6
GAP_LSI_TOL = 1e-6
SOLVER_AGREEMENT_TOL = 1e-8

# de Bruijn check: central differences
FD_STEP = 1e-5
FD_TOL = 1e-6

# beta_c(d=2) by bisection on sinh(2 beta) = 1
BETA_C_XTOL = 1e-12

# Literature estimates, documented only (no assertion depends on them)
LITERATURE_BETA_C = {3: 0.221654626, 4: 0.149694}

# Results
SCHEMA_VERSION = 1
