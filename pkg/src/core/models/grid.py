"""Height fields on a square grid, parametrized surfaces and radial profiles"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicSpline, RegularGridInterpolator

from ..exceptions import FlowHorizonError, InvalidDomainError

BOUNDARY_KINDS = ("dirichlet_cone", "linear_extension")


@dataclass(eq=False)
class GridField:
    """Graph of a function over [-L, L]^2; values[i, j] = f(axis[i], axis[j])"""

    half_width: float
    values: np.ndarray
    boundary_kind: str = "dirichlet_cone"
    N: Optional[float] = None
    label: str = ""
    flagged: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.half_width <= 0:
            raise InvalidDomainError(f"box half-width must be positive, got {self.half_width}")
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise InvalidDomainError(f"grid values must be square, got shape {self.values.shape}")
        if self.resolution < 5 or self.resolution % 2 == 0:
            raise InvalidDomainError(f"resolution must be odd and >= 5, got {self.resolution}")
        if self.boundary_kind not in BOUNDARY_KINDS:
            raise InvalidDomainError(f"unknown boundary kind {self.boundary_kind!r}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidDomainError("grid values must be finite")

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.resolution - 1)

    @property
    def tolerance(self) -> float:
        """Grid tolerance used for height comparisons: one cell of slope-one rise."""
        return self.spacing

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.resolution)

    @property
    def center_index(self) -> int:
        return self.resolution // 2

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def lipschitz(self) -> float:
        """Largest difference quotient over axis and diagonal neighbour pairs."""
        f = self.values
        d = self.spacing
        quotients = [
            np.abs(np.diff(f, axis=0)).max() / d,
            np.abs(np.diff(f, axis=1)).max() / d,
            np.abs(f[1:, 1:] - f[:-1, :-1]).max() / (d * np.sqrt(2.0)),
            np.abs(f[1:, :-1] - f[:-1, 1:]).max() / (d * np.sqrt(2.0)),
        ]
        return float(max(quotients))

    def gradient(self) -> Tuple[np.ndarray, np.ndarray]:
        return tuple(np.gradient(self.values, self.spacing, self.spacing, edge_order=2))

    def scaled(self, factor: float, **changes) -> "GridField":
        return replace(self, values=self.values * factor, flagged=dict(self.flagged), **changes)

    def restrict(self, half_width: float) -> "GridField":
        """Sub-box [-l, l]^2 with l rounded down to a whole number of cells."""
        cells = int(np.floor(half_width / self.spacing + 1e-9))
        if cells < 2:
            raise InvalidDomainError(f"sub-box half-width {half_width} is below two grid cells")
        cells = min(cells, self.center_index)
        c = self.center_index
        window = slice(c - cells, c + cells + 1)
        return replace(
            self,
            half_width=cells * self.spacing,
            values=self.values[window, window].copy(),
            flagged=dict(self.flagged),
        )

    def interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator((self.axis, self.axis), self.values, method="linear")

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at points (..., 2) inside the box."""
        points = np.asarray(points, dtype=float)
        if np.any(np.abs(points) > self.half_width + 1e-12):
            raise InvalidDomainError("sample points must lie inside the grid box")
        return self.interpolator()(points)

    def header(self) -> Dict[str, Any]:
        return {
            "L": self.half_width,
            "resolution": self.resolution,
            "boundary_kind": self.boundary_kind,
            "N": self.N,
        }

    def summary(self) -> Dict[str, Any]:
        return {
            **self.header(),
            "label": self.label,
            "min": float(self.values.min()),
            "max": float(self.values.max()),
            "lipschitz": self.lipschitz(),
            "flagged": self.flagged,
        }


@dataclass(eq=False)
class SpaceTimeSurface:
    """Phi(theta, t) = t^(-1/2) (x(theta, t), N) built over a curve flow"""

    N: float
    history: Any  # FlowHistory

    def __post_init__(self):
        if self.N <= 0:
            raise InvalidDomainError(f"stretch N must be positive, got {self.N}")

    @property
    def parameter_box(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        return (0.0, 2.0 * np.pi), (self.history.t_min, self.history.t_max)

    def embed(self, theta, t: float) -> np.ndarray:
        if t <= 0:
            raise FlowHorizonError(f"the surface is only defined for t > 0, got t = {t}")
        x = self.history.point(theta, t)
        height = np.full(x.shape[:-1] + (1,), self.N)
        return np.concatenate([x, height], axis=-1) / np.sqrt(t)

    def __call__(self, params: np.ndarray) -> np.ndarray:
        theta, t = params
        return self.embed(theta, t)


@dataclass(eq=False)
class RadialProfile:
    """Rotationally symmetric self-expander u(r) with asymptotic slope N"""

    N: float
    radii: np.ndarray
    heights: np.ndarray
    slopes: np.ndarray
    details: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.heights = np.asarray(self.heights, dtype=float)
        self.slopes = np.asarray(self.slopes, dtype=float)

    @property
    def apex_height(self) -> float:
        return float(self.heights[0])

    @property
    def R_max(self) -> float:
        return float(self.radii[-1])

    def height_at(self, r) -> np.ndarray:
        """u(r); beyond R_max the profile continues with its last slope."""
        r = np.asarray(r, dtype=float)
        spline = CubicSpline(self.radii, self.heights)
        inside = np.clip(r, self.radii[0], self.R_max)
        value = spline(inside)
        return np.where(r > self.R_max, self.heights[-1] + self.slopes[-1] * (r - self.R_max), value)

    def convexity_margin(self) -> float:
        return float(np.min(np.diff(self.slopes)))

    def summary(self) -> Dict[str, Any]:
        return {"N": self.N, "apex_height": self.apex_height, "R_max": self.R_max, **self.details}
