"""Development configuration"""

import os


class DevelopmentConfig:
    """Development environment configuration"""

    DEBUG = True
    TESTING = False

    # File Paths
    OUTPUT_DIR = os.getenv("HARNACK_LAB_OUTPUT", "harnack_output")

    # Logging
    LOG_LEVEL = os.getenv("HARNACK_LAB_LOG_LEVEL", "INFO")
    LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Suite sizes (full acceptance scale)
    HEAT_GRID_POINTS = 41
    HEAT_TIME_POINTS = 5
    HEAT_RANDOM_TUPLES = 1000
    CURVE_SAMPLES = 256
    FLOW_DT = 1e-5
    SNAPSHOT_EVERY = 10
    HARNACK_LATTICE = (64, 40)
    PATH_RANDOM_TUPLES = 200
    GRID_RESOLUTION = 201
    SIGMA_LATTICE = (16, 10, 5)
    PATH_LATTICE = (200, 128)
