"""Testing configuration"""

import os


class TestingConfig:
    """Coarse settings so the pytest suite runs in minutes"""

    __test__ = False

    DEBUG = True
    TESTING = True

    OUTPUT_DIR = os.getenv("HARNACK_LAB_OUTPUT", "test_output")

    LOG_LEVEL = "WARNING"
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    HEAT_GRID_POINTS = 11
    HEAT_TIME_POINTS = 3
    HEAT_RANDOM_TUPLES = 200
    CURVE_SAMPLES = 64
    FLOW_DT = 1e-4
    SNAPSHOT_EVERY = 5
    HARNACK_LATTICE = (16, 8)
    PATH_RANDOM_TUPLES = 10
    GRID_RESOLUTION = 81
    SIGMA_LATTICE = (6, 4, 3)
    PATH_LATTICE = (50, 64)
