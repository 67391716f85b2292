import os

# Enumeration caps; --unsafe-depth lifts them for a single run.
WORD_DEPTH_CAP = int(os.getenv("FUCHS_WORD_DEPTH_CAP", "12"))
CONJ_DEPTH_CAP = int(os.getenv("FUCHS_CONJ_DEPTH_CAP", "10"))
TILE_RECURSION_MAX_LENGTH = 6

# Numeric tolerances
CLASSIFY_TOL = 1e-9
NORMALIZE_TOL = 1e-12
ENDPOINT_TOL = 1e-12
AXIS_MATCH_TOL = 1e-9
CLUSTER_TOL = 1e-9
POINT_KEY_TOL = 1e-6
FORMULA_TOL = 1e-9
REDUCE_STEP_TOL = 1e-12

# Sweep checks
SWEEP_THRESHOLD = 0.1
SWEEP_TAIL = 10.0
GENERIC_DELTA_MIN = 0.05
FOUR_EDGE_FLOOR = 1e-3
DEFAULT_GRID = (-30.0, 30.0, 0.25)

# Preset defaults
PERTURBATION_DEFAULT = 0.1
SCHOTTKY_DEFAULTS = (2.0, 2.0, 3.0)

CACHE_DIR = os.getenv("FUCHS_CACHE_DIR", "data/cache")
OUTPUT_DIR = os.getenv("FUCHS_OUTPUT_DIR", "output")
DEFAULT_WORKERS = int(os.getenv("FUCHS_WORKERS", "1"))
LOG_LEVEL = os.getenv("FUCHS_LOG_LEVEL", "INFO")
SHOW_PROGRESS = os.getenv("FUCHS_PROGRESS", "0") == "1"

ARTIFACT_VERSION = "1.0.0"
CACHE_FORMAT_VERSION = 1
