"""Convex plane curves in support-function form and their flows"""

from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .. import spectral
from ..exceptions import FlowHorizonError, InvalidDomainError, NonConvexCurveError

MIN_SAMPLES = 64


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def frame(theta) -> Tuple[np.ndarray, np.ndarray]:
    """Outward normal n(theta) and tangent tau(theta), stacked on the last axis."""
    theta = np.asarray(theta, dtype=float)
    normal = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    tangent = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return normal, tangent


@dataclass(eq=False)
class SupportCurve:
    """Smooth convex closed curve given by h(theta_j) at theta_j = 2 pi j / M"""

    samples: np.ndarray
    label: str = "generic"

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or not _is_power_of_two(samples.size) or samples.size < MIN_SAMPLES:
            raise InvalidDomainError(
                f"support samples must be a power of two >= {MIN_SAMPLES}, got {samples.size}"
            )
        if not np.all(np.isfinite(samples)):
            raise InvalidDomainError("support samples must be finite")
        samples.setflags(write=False)
        self.samples = samples

    @property
    def M(self) -> int:
        return self.samples.size

    @property
    def thetas(self) -> np.ndarray:
        return spectral.angles(self.M)

    @cached_property
    def h_theta(self) -> np.ndarray:
        return spectral.derivative(self.samples, 1)

    @cached_property
    def h_thetatheta(self) -> np.ndarray:
        return spectral.derivative(self.samples, 2)

    @cached_property
    def radius_of_curvature(self) -> np.ndarray:
        return self.h_thetatheta + self.samples

    @property
    def curvature(self) -> np.ndarray:
        return 1.0 / self.radius_of_curvature

    @property
    def min_radius(self) -> float:
        return float(self.radius_of_curvature.min())

    def check_convex(self) -> None:
        """Raise NonConvexCurveError at the worst angle if h'' + h <= 0 anywhere."""
        r = self.radius_of_curvature
        j = int(np.argmin(r))
        if r[j] <= 0:
            raise NonConvexCurveError(angle=float(self.thetas[j]), margin=float(r[j]))

    def points(self, upsample: int = 1) -> np.ndarray:
        """Curve points x(theta) = h n + h_theta tau, shape (M * upsample, 2)."""
        h = self.samples if upsample == 1 else spectral.upsample(self.samples, upsample)
        h_theta = spectral.derivative(h, 1)
        normal, tangent = frame(spectral.angles(h.size))
        return h[:, None] * normal + h_theta[:, None] * tangent

    def area(self) -> float:
        # A = 1/2 * integral of h (h'' + h)
        return float(0.5 * np.sum(self.samples * self.radius_of_curvature) * 2.0 * np.pi / self.M)

    def length(self) -> float:
        return float(np.sum(self.samples) * 2.0 * np.pi / self.M)

    def isoperimetric_ratio(self) -> float:
        return self.length() ** 2 / (4.0 * np.pi * self.area())

    def radial_function(self, upsample: int = 8) -> Tuple[np.ndarray, np.ndarray]:
        """Polar angle and radius of the boundary, sorted by angle (requires h > 0)."""
        pts = self.points(upsample)
        phi = np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2.0 * np.pi)
        radius = np.hypot(pts[:, 0], pts[:, 1])
        order = np.argsort(phi)
        return phi[order], radius[order]


@dataclass
class HarnackSample:
    """Harnack quantity Z(V, V) at one (theta, t) for V = v * tau"""

    theta: float
    t: float
    v: float
    Z: float
    Z_min: float
    v_star: float
    dH_dt: float
    grad_H: float
    sff_term: float
    time_term: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(eq=False)
class FlowHistory:
    """Snapshots of a curve shortening flow in support form"""

    times: np.ndarray
    samples: np.ndarray  # (K + 1, M)
    dt: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] != self.times.size:
            raise InvalidDomainError("flow history needs one sample row per stored time")
        if np.any(np.diff(self.times) <= 0):
            raise InvalidDomainError("flow history times must be strictly increasing")

    @property
    def M(self) -> int:
        return self.samples.shape[1]

    @property
    def t_min(self) -> float:
        return float(self.times[0])

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return self.times.size

    @property
    def curves(self) -> List[SupportCurve]:
        return [SupportCurve(row, label=self.metadata.get("label", "generic")) for row in self.samples]

    @cached_property
    def _spline(self) -> CubicSpline:
        if self.times.size < 4:
            raise FlowHorizonError("history is too short for time interpolation")
        return CubicSpline(self.times, self.samples, axis=0)

    def require_interior(self, t: float, margin: float = 0.0) -> None:
        if not (self.t_min + margin < t < self.t_max - margin):
            raise FlowHorizonError(
                f"t = {t} must lie strictly inside ({self.t_min + margin}, {self.t_max - margin})"
            )

    def support_at(self, t: float, order: int = 0) -> np.ndarray:
        """Support samples (or their order-th time derivative) at time t."""
        if not (self.t_min <= t <= self.t_max):
            raise FlowHorizonError(f"t = {t} outside history range [{self.t_min}, {self.t_max}]")
        return np.asarray(self._spline(t, order))

    def curve_at(self, t: float) -> SupportCurve:
        return SupportCurve(self.support_at(t), label=self.metadata.get("label", "generic"))

    def index_of(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))

    def point(self, theta, t: float) -> np.ndarray:
        """x(theta, t) on M_t."""
        h = self.support_at(t)
        normal, tangent = frame(theta)
        value = spectral.evaluate(h, theta)
        slope = spectral.evaluate(h, theta, order=1)
        return value[..., None] * normal + slope[..., None] * tangent

    def areas(self) -> np.ndarray:
        return np.array([c.area() for c in self.curves])

    def summary(self) -> Dict[str, Any]:
        return {
            "snapshots": int(self.times.size),
            "t_start": self.t_min,
            "t_end": self.t_max,
            "dt": self.dt,
            **self.metadata,
        }
