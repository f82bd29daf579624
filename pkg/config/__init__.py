"""Environment configuration classes"""

import os

from .development import DevelopmentConfig
from .testing import TestingConfig

_CONFIGS = {
    "development": DevelopmentConfig,
    "testing": TestingConfig,
}


def get_config(env: str = None):
    """Return the config class selected by HARNACK_LAB_ENV (default: development)."""
    name = (env or os.getenv("HARNACK_LAB_ENV", "development")).lower()
    return _CONFIGS.get(name, DevelopmentConfig)
