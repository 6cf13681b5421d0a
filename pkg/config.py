# =========================
# config.py
# Centralized configuration file for the project
# =========================

"""
==============================================================================
CONFIGURATION MODULE - .env file + environment variables
==============================================================================
Priority:
1. Environment variables (ABW_*)
2. .env file in the project root
3. Default values

Only runtime concerns (threads, log/cache folders, verbosity) come from the
environment. Numeric tolerances are fixed constants below.
==============================================================================
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def get_setting(key: str, default=None):
    """Read a setting from the environment, falling back to default."""
    value = os.getenv(key)
    if value is None or value == "":
        return default
    return value


def get_flag(key: str, default: bool) -> bool:
    """Read a boolean setting ("true"/"false")."""
    return str(get_setting(key, "true" if default else "false")).lower() == "true"


# =========================
# PROJECT PATHS
# =========================

BASE_DIR = Path(__file__).resolve().parent
GOLDEN_DIR = BASE_DIR / "golden"
LOG_DIR = get_setting("ABW_LOG_DIR", "./logs")
CACHE_DIR = get_setting("ABW_CACHE_DIR")  # None = in-memory structure constants only

# =========================
# RUNTIME
# =========================

THREAD_COUNT = max(1, int(get_setting("ABW_THREADS", "1")))
VERBOSE = get_flag("ABW_VERBOSE", False)
ENABLE_MONITORING = get_flag("ABW_MONITORING", True)

# =========================
# NUMERIC TOLERANCES
# =========================

UNITARITY_TOL = 1e-10
DETERMINANT_TOL = 1e-8
ALCOVE_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9
EIGEN_RESIDUAL_TOL = 1e-9
EIGEN_MAX_ITER = 500
NORMALITY_TOL = 1e-6  # off-diagonal Schur mass accepted in the eigen fallback
FRAME_TOL = 1e-10
BRIDGE_TOL = 1e-12
CONSISTENCY_TOL = 1e-6  # estimate may sit this far below the certified bound

# Largest coefficient stored in a class (64-bit signed)
COEFFICIENT_BOUND = 2**63 - 1

# =========================
# OPTIMIZER
# =========================

DEFAULT_SEED = 20240101
DEFAULT_STARTS = 32
DEFAULT_BUDGET = 20000
INITIAL_STEP = 0.5
MIN_STEP = 1e-5
STEP_GROW = 1.5
STEP_SHRINK = 0.85

# =========================
# LATTICE / K-AREA
# =========================

MIN_MESH = 16
DEFAULT_MESH = 200
DEFAULT_EPSILON = 0.05
BRANCH_CUT_TURNS = 0.45
KAREA_RATIO_BOUND = 1.2

# =========================
# RUN LOG
# =========================

ANOMALY_MIN_RUNS = 5
SLOW_RUN_FACTOR = 3.0  # times the median runtime
SLOW_RUN_FLOOR = 1.0  # seconds
RECENT_RUNS = 20

# =========================
# ENUMERATION LIMITS
# =========================

MIN_N, MAX_N = 2, 6
MIN_L, MAX_L = 2, 5
