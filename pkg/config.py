"""
Configuration management for qsym
"""
import math
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


def _int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


# Logging
LOG_LEVEL = os.getenv("QSYM_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Numerical tolerances
ROOT_OF_UNITY_TOL = _float("QSYM_ROOT_OF_UNITY_TOL", 1e-12)
DEFAULT_TOLERANCE = _float("QSYM_TOLERANCE", 1e-10)
JACKSON_TAIL_TOL = _float("QSYM_JACKSON_TAIL_TOL", 1e-14)
TRIG_SNAP_TOL = 1e-12

# Truncation orders
DEFAULT_ORDER = _int("QSYM_ORDER", 20)
COULOMB_TERMS = _int("QSYM_COULOMB_TERMS", 200)
MAX_REWRITES = _int("QSYM_MAX_REWRITES", 200000)

# Physical constants (natural units)
HBAR = _float("QSYM_HBAR", 1.0)
C_LIGHT = _float("QSYM_C", 1.0)
CHARGE = _float("QSYM_CHARGE", 1.0)
MASS = _float("QSYM_MASS", 1.0)

# Non-commutative plane defaults
NCPLANE_ALPHA = _float("QSYM_NCPLANE_ALPHA", 1.0)
NCPLANE_GRID = {
    "x_min": -1.0,
    "x_max": 1.0,
    "y_min": 0.5,
    "y_max": 3.0,
    "nx": 41,
    "ny": 41,
}

# Coulomb deformation figures
COULOMB_X_GRID = {"x_min": -3.0, "x_max": 3.0, "n": 121}
FIG1_S_VALUES = [0.0, -0.1, -0.25, -0.5, -0.75]
FIG2_S_VALUES = [0.0, -0.15, -0.25, -0.5, -math.pi / 4, -math.pi / 2, -math.pi, -10.0]

# Perturbative sector
DEFAULT_WAVE_VECTOR = (1.0, 1.0, 1.0)
DEFAULT_EPSILON = 0.01

# Ledger
LEDGER_SCHEMA_VERSION = "1.0"
FUZZ_TRIALS = _int("QSYM_FUZZ_TRIALS", 1000)
FUZZ_SEED = _int("QSYM_FUZZ_SEED", 20240521)
