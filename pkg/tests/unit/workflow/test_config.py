"""Experiment configuration loading, validation and CLI parsing"""

import json

import pytest

from config import get_config
from main import build_config, build_parser, parse_numbers, parse_sources
from src.core.exceptions import ConfigValidationError
from src.infrastructure.config import ExperimentConfig


def test_defaults_validate():
    config = ExperimentConfig()
    config.validate()
    assert config.suites == ["heat", "csf", "expander", "chain"]


def test_unknown_key_is_named():
    with pytest.raises(ConfigValidationError) as excinfo:
        ExperimentConfig.from_dict({"bogus": 1})
    assert excinfo.value.field == "bogus"


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"dt": -1.0}, "dt"),
        ({"resolution": 80}, "resolution"),
        ({"N_sequence": [5.0, 2.0]}, "N_sequence"),
        ({"chain_N": [0.5]}, "chain_N"),
        ({"curve": "square"}, "curve"),
        ({"sources": [[0.0, -1.0]]}, "sources"),
        ({"curve_samples": 100}, "curve_samples"),
        ({"seed": -3}, "seed"),
        ({"half_width": 0.0}, "half_width"),
    ],
)
def test_invalid_values_name_their_field(overrides, field):
    with pytest.raises(ConfigValidationError) as excinfo:
        ExperimentConfig.from_dict(overrides)
    assert excinfo.value.field == field


def test_generic_curve_needs_samples():
    with pytest.raises(ConfigValidationError) as excinfo:
        ExperimentConfig.from_dict({"curve": "generic"})
    assert excinfo.value.field == "support_samples"


def test_json_lists_become_tuples(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"experiment": "heat", "N_sequence": [1, 3], "sigma_lattice": [4, 4, 2]}))
    config = ExperimentConfig.from_json(path)
    assert config.N_sequence == (1, 3)
    assert config.sigma_lattice == (4, 4, 2)
    assert config.suites == ["heat"]


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigValidationError):
        ExperimentConfig.from_json(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigValidationError):
        ExperimentConfig.from_json(broken)


def test_overrides_ignore_missing_values():
    config = ExperimentConfig().with_overrides(dt=2e-5, radius=None)
    assert config.dt == 2e-5
    assert config.radius == 1.0


def test_environment_scaling():
    config = ExperimentConfig.for_environment(get_config("testing"))
    assert config.curve_samples == 64
    assert config.resolution == 81
    assert get_config("nonsense").__name__ == "DevelopmentConfig"


def test_parse_sources():
    assert parse_sources("(-1,1);(1,1)") == [[-1.0, 1.0], [1.0, 1.0]]
    assert parse_sources("(0,0,2)") == [[0.0, 0.0, 2.0]]
    with pytest.raises(ConfigValidationError):
        parse_sources(" ; ")
    with pytest.raises(ConfigValidationError):
        parse_numbers("1,x", "N")


def test_cli_overrides_reach_the_config(tmp_path):
    args = build_parser().parse_args(
        ["chain", "--env", "testing", "--out", str(tmp_path), "--N", "5,20", "--curve", "ellipse", "--semi-axes", "3,1"]
    )
    config = build_config(args)
    assert config.experiment == "chain"
    assert config.chain_N == (5.0, 20.0)
    assert config.semi_axes == (3.0, 1.0)
    assert config.output_dir == str(tmp_path)


def test_cli_N_targets_the_stretch_sequence_outside_the_chain(tmp_path):
    args = build_parser().parse_args(["expander", "--env", "testing", "--out", str(tmp_path), "--N", "2,4"])
    assert build_config(args).N_sequence == (2.0, 4.0)


def test_box_half_width_defaults_to_the_curve():
    assert ExperimentConfig().half_width is None
    assert ExperimentConfig().with_overrides(half_width=4.0).half_width == 4.0
