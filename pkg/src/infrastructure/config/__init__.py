"""Configuration: constants, logging and experiment settings"""
from .experiment_config import ExperimentConfig
from .logging_config import setup_logging
