"""Shared fixtures: coarse configs and cached flows"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from config import TestingConfig  # noqa: E402
from src.domains.curves.services import curve_flow_service as flow  # noqa: E402
from src.infrastructure.config import ExperimentConfig  # noqa: E402


@pytest.fixture
def testing_config(tmp_path):
    """Testing-scale config writing into a temporary folder."""
    config = ExperimentConfig.for_environment(TestingConfig)
    return config.with_overrides(output_dir=str(tmp_path / "out"), stable_output=True)


@pytest.fixture(scope="session")
def unit_circle():
    return flow.make_curve("circle", M=64, radius=1.0)


@pytest.fixture(scope="session")
def ellipse():
    return flow.make_curve("ellipse", M=64, a=2.0, b=1.0)


@pytest.fixture(scope="session")
def circle_flow(unit_circle):
    """Unit circle flowed to 0.45 (extinction at 0.5)."""
    return flow.run_flow(unit_circle, 0.45, dt=1e-4, snapshot_every=5)


@pytest.fixture(scope="session")
def ellipse_flow(ellipse):
    return flow.run_flow(ellipse, 0.5, dt=1e-4, snapshot_every=5)
