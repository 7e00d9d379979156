"""
Constants and fixed values for the rank-based repeated-measures test engine
"""

# ============================================================================
# DESIGN LIMITS
# ============================================================================

# Smallest observed count per group x occasion cell; the variance
# denominator lambda * (lambda - 1) must be positive.
MIN_CELL_COUNT = 2

# Row sums of user supplied contrast matrices must vanish to this tolerance
CONTRAST_ROW_SUM_TOL = 1e-10

# Projection matrices are checked for idempotence to this tolerance
PROJECTION_TOL = 1e-10

# Entries of C p below this multiple of max|C| * max|p| are rounding noise and set to zero
EFFECT_NOISE_TOL = 1e-10

# ============================================================================
# DATA GENERATION
# ============================================================================

# Autoregressive covariance setting: rho ** |l - j|
AR_RHO = 0.6

# Chi-square marginal degrees of freedom
CHISQ_MARGINAL_DOF = 15

# Ordinal generator: int(4 * (c * Z + Y) / (c + 1)) + 1
ORDINAL_CATEGORIES = 4

# MAR1: 2-sigma bands (lower tail, middle, upper tail)
MAR1_BAND_WIDTH = 2.0
MAR1_TAIL_RATE = 0.15
MAR1_MIDDLE_RATE = 0.30

# MAR2: split at the median of the determining occasion
MAR2_LOWER_RATE = 0.10
MAR2_UPPER_RATE = 0.30

# Determining/target occasion pairs (1-based) used by the MAR injectors
DEFAULT_MAR_PAIRS = {
    4: [(1, 2), (3, 4)],
    8: [(1, 2), (1, 3), (6, 7), (6, 8)],
}

# Shift parameter grid for power studies
ZETA_GRID = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]

# ============================================================================
# REPORTING
# ============================================================================

REPORT_SCHEMA_VERSION = "1.0"
SIMULATION_SCHEMA_VERSION = "1.0"

# Decimals used when rendering p-value tables
TABLE_DECIMALS = 4

# Column labels of the p-value table, in display order
METHOD_LABELS = {
    "wts": "T_W",
    "ats": "T_A",
    "wts_boot": "T_W*",
    "ats_boot": "T_A*",
    "mats_boot": "T_M*",
}

# ============================================================================
# EXIT CODES
# ============================================================================

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3

# ============================================================================
# ERROR MESSAGES
# ============================================================================

ERROR_EMPTY_CELL = "Cell(s) with fewer than {minimum} observations: {cells}"
ERROR_INVALID_DESIGN = "Hypothesis '{kind}' is not testable with a={a} groups and d={d} occasions"
ERROR_DEGENERATE_TRACE = "tr(T V) = {trace:.3g} <= 0: no variability under the hypothesis projection"
ERROR_ZERO_DIAGONAL = "Zero variance estimate on diagonal entries {indices}"
