"""Experiment configuration: JSON file + CLI overrides, validated before any suite runs"""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.core.exceptions import ConfigValidationError
from src.infrastructure.config import settings

logger = logging.getLogger(__name__)

EXPERIMENTS = ("heat", "csf", "expander", "chain", "all")
CURVE_PRESETS = ("circle", "ellipse", "generic")
SCHEMES = ("semi_implicit", "explicit")
MAX_SEED = 2**64 - 1


def _default_sources() -> List[List[float]]:
    return [[-1.0, 1.0], [0.5, 2.0], [2.0, 0.5]]


@dataclass
class ExperimentConfig:
    """Everything a verification run needs; defaults are the full acceptance scale"""

    experiment: str = "all"

    # Curve preset
    curve: str = "circle"
    radius: float = 1.0
    semi_axes: Tuple[float, float] = (2.0, 1.0)
    support_samples: Optional[List[float]] = None
    curve_samples: int = settings.CURVE_SAMPLES

    # Stretch parameters
    N_sequence: Tuple[float, ...] = (2.0, 5.0, 10.0, 20.0)
    chain_N: Tuple[float, ...] = (5.0, 20.0)
    bound_N: Tuple[float, ...] = (1.0, 5.0, 20.0)
    sigma_N: Tuple[float, ...] = (10.0, 20.0, 50.0, 100.0)

    # Grid
    half_width: Optional[float] = None  # default: BOX_CIRCUMRADII x circumradius of the curve
    resolution: int = settings.GRID_RESOLUTION

    # Curve flow
    dt: float = settings.FLOW_DT
    t_end: Optional[float] = None
    scheme: str = "semi_implicit"
    snapshot_every: int = 10

    # Heat solutions: each source is [location..., weight]
    sources: List[List[float]] = field(default_factory=_default_sources)
    time_shift: float = 0.0
    fd_step: float = settings.FD_STEP

    # Suite sizes
    heat_grid_points: int = 41
    heat_time_points: int = 5
    heat_random_tuples: int = 1000
    harnack_lattice: Tuple[int, int] = (64, 40)
    path_lattice: Tuple[int, int] = (settings.PATH_TIME_SLICES, settings.PATH_ANGLE_NODES)
    path_random_tuples: int = 200
    sigma_lattice: Tuple[int, int, int] = (16, 10, 5)
    midpoint_pairs: int = settings.MIDPOINT_PAIRS

    # Tolerances
    heat_defect_tolerance: float = settings.HEAT_DEFECT_TOLERANCE
    heat_gap_tolerance: float = settings.HEAT_GAP_TOLERANCE

    # Run control
    output_dir: str = str(settings.DEFAULT_OUTPUT_DIR)
    seed: int = settings.DEFAULT_SEED
    stable_output: bool = False
    parallel: bool = False
    write_gridfields: bool = True

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Build and validate; unknown keys are rejected."""
        if not isinstance(data, dict):
            raise ConfigValidationError("config", "top level must be a JSON object")
        known = set(cls.field_names())
        for key in data:
            if key not in known:
                raise ConfigValidationError(key, "unknown configuration key")
        config = cls(**_normalize(data))
        config.validate()
        return config

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigValidationError("config", f"file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigValidationError("config", f"invalid JSON in {path}: {e}")
        logger.debug(f"Loaded experiment config from {path}")
        return cls.from_dict(data)

    @classmethod
    def for_environment(cls, env_config) -> "ExperimentConfig":
        """Defaults scaled to a config/ environment class (development or testing)."""
        config = cls(
            curve_samples=env_config.CURVE_SAMPLES,
            dt=env_config.FLOW_DT,
            snapshot_every=env_config.SNAPSHOT_EVERY,
            resolution=env_config.GRID_RESOLUTION,
            heat_grid_points=env_config.HEAT_GRID_POINTS,
            heat_time_points=env_config.HEAT_TIME_POINTS,
            heat_random_tuples=env_config.HEAT_RANDOM_TUPLES,
            harnack_lattice=tuple(env_config.HARNACK_LATTICE),
            path_lattice=tuple(env_config.PATH_LATTICE),
            path_random_tuples=env_config.PATH_RANDOM_TUPLES,
            sigma_lattice=tuple(env_config.SIGMA_LATTICE),
            output_dir=env_config.OUTPUT_DIR,
        )
        config.validate()
        return config

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Apply CLI overrides; None means "not given"."""
        given = {k: v for k, v in overrides.items() if v is not None}
        known = set(self.field_names())
        for key in given:
            if key not in known:
                raise ConfigValidationError(key, "unknown configuration key")
        config = replace(self, **_normalize(given))
        config.validate()
        return config

    def validate(self) -> None:
        """Raise ConfigValidationError naming the first offending field."""
        _one_of("experiment", self.experiment, EXPERIMENTS)
        _one_of("curve", self.curve, CURVE_PRESETS)
        _one_of("scheme", self.scheme, SCHEMES)
        _positive("radius", self.radius)
        if len(self.semi_axes) != 2:
            raise ConfigValidationError("semi_axes", "expected two semi-axes (a, b)")
        for value in self.semi_axes:
            _positive("semi_axes", value)
        if self.curve == "generic":
            if not self.support_samples:
                raise ConfigValidationError("support_samples", "generic curve needs support samples")
            m = len(self.support_samples)
            if m < 64 or m & (m - 1):
                raise ConfigValidationError("support_samples", f"need a power of two >= 64 samples, got {m}")
        m = self.curve_samples
        if not isinstance(m, int) or m < 64 or m & (m - 1):
            raise ConfigValidationError("curve_samples", "must be a power of two >= 64")

        for name in ("N_sequence", "chain_N", "bound_N", "sigma_N"):
            values = getattr(self, name)
            if not values:
                raise ConfigValidationError(name, "must not be empty")
            if any(v < 1 for v in values):
                raise ConfigValidationError(name, "every N must be >= 1")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigValidationError(name, "must be strictly increasing")

        if self.half_width is not None:
            _positive("half_width", self.half_width)
        if not isinstance(self.resolution, int) or self.resolution < 5 or self.resolution % 2 == 0:
            raise ConfigValidationError("resolution", "must be odd and >= 5")
        _positive("dt", self.dt)
        if self.t_end is not None and self.t_end < 0:
            raise ConfigValidationError("t_end", "must be nonnegative")
        _positive_int("snapshot_every", self.snapshot_every)

        if not self.sources:
            raise ConfigValidationError("sources", "need at least one point source")
        dims = {len(source) - 1 for source in self.sources}
        if len(dims) != 1 or not dims <= {1, 2}:
            raise ConfigValidationError("sources", "sources must all be [x, w] or all be [x, y, w]")
        if any(source[-1] <= 0 for source in self.sources):
            raise ConfigValidationError("sources", "source weights must be positive")
        if self.time_shift < 0:
            raise ConfigValidationError("time_shift", "must be nonnegative")
        if not 0 < self.fd_step < 0.1:
            raise ConfigValidationError("fd_step", "must lie in (0, 0.1)")

        for name in (
            "heat_grid_points",
            "heat_time_points",
            "heat_random_tuples",
            "path_random_tuples",
            "midpoint_pairs",
        ):
            _positive_int(name, getattr(self, name))
        for name, length in (("harnack_lattice", 2), ("path_lattice", 2), ("sigma_lattice", 3)):
            lattice = getattr(self, name)
            if len(lattice) != length:
                raise ConfigValidationError(name, f"expected {length} sizes")
            for value in lattice:
                _positive_int(name, value)
        if self.path_lattice[0] < 2 or self.path_lattice[1] < 4:
            raise ConfigValidationError("path_lattice", "need at least 2 time slices and 4 angle nodes")

        _positive("heat_defect_tolerance", self.heat_defect_tolerance)
        _positive("heat_gap_tolerance", self.heat_gap_tolerance)
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigValidationError("seed", "must be an unsigned 64-bit integer")

    @property
    def suites(self) -> List[str]:
        if self.experiment == "all":
            return ["heat", "csf", "expander", "chain"]
        return [self.experiment]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _normalize(data: Dict[str, Any]) -> Dict[str, Any]:
    """JSON lists become tuples where the dataclass stores tuples."""
    tuple_fields = {
        "semi_axes",
        "N_sequence",
        "chain_N",
        "bound_N",
        "sigma_N",
        "harnack_lattice",
        "path_lattice",
        "sigma_lattice",
    }
    normalized = {}
    for key, value in data.items():
        if key in tuple_fields and value is not None:
            try:
                value = tuple(value)
            except TypeError:
                raise ConfigValidationError(key, "expected a list")
        if key == "sources" and value is not None:
            try:
                value = [list(map(float, source)) for source in value]
            except (TypeError, ValueError):
                raise ConfigValidationError(key, "expected a list of [location..., weight] lists")
        normalized[key] = value
    return normalized


def _one_of(name: str, value, choices) -> None:
    if value not in choices:
        raise ConfigValidationError(name, f"must be one of {', '.join(choices)}; got {value!r}")


def _positive(name: str, value) -> None:
    if not isinstance(value, (int, float)) or not value > 0:
        raise ConfigValidationError(name, f"must be positive, got {value!r}")


def _positive_int(name: str, value) -> None:
    if not isinstance(value, int) or value < 1:
        raise ConfigValidationError(name, f"must be a positive integer, got {value!r}")
