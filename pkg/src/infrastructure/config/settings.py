"""Project configuration and constants"""

from pathlib import Path

# Project structure
PROJECT_ROOT = Path(__file__).resolve().parents[3]
SRC_DIR = PROJECT_ROOT / "src"
TESTS_DIR = PROJECT_ROOT / "tests"
DEFAULT_OUTPUT_DIR = PROJECT_ROOT / "harnack_output"

# Heat equation defaults
FD_STEP = 1e-3
HEAT_DEFECT_TOLERANCE = 1e-6
HEAT_GAP_TOLERANCE = 1e-10

# Curve shortening flow defaults
CURVE_SAMPLES = 256
FLOW_DT = 1e-5
FLOW_HORIZON_FRACTION = 0.9  # of the area bound A0 / 2pi
PATH_TIME_SLICES = 200
PATH_ANGLE_NODES = 128

# Grid defaults
BOX_CIRCUMRADII = 6.0  # default box half-width, in circumradii of the initial curve
GRID_RESOLUTION = 201
LEVEL_SET_FLOOR = 1e-8
APEX_EXCLUSION_CELLS = 3
MIDPOINT_PAIRS = 10_000

DEFAULT_SEED = 0

# Grid field binary layout
GRIDFIELD_MAGIC = "HARNACKLAB-GRIDFIELD 1"

# System information
SYSTEM_NAME = "Harnack Lab"
SYSTEM_VERSION = "1.0.0"
SYSTEM_DESCRIPTION = "Numerical verification of differential Harnack inequalities"
