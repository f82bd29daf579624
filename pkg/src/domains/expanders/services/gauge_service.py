"""Minkowski gauge of the region bounded by a convex curve, and cones over it"""

import logging
from typing import Optional, Tuple

import numpy as np

from src.core import spectral
from src.core.exceptions import InvalidDomainError
from src.core.models.curve import SupportCurve, frame
from src.core.models.grid import GridField
from src.infrastructure.config.settings import BOX_CIRCUMRADII

logger = logging.getLogger(__name__)

UPSAMPLE = 8
RADIAL_UPSAMPLE = 16
CHUNK = 4096


def _require_origin_inside(curve: SupportCurve) -> None:
    if curve.samples.min() <= 0:
        raise InvalidDomainError(
            f"the curve must enclose the origin (min h = {curve.samples.min():.3g})",
            {"min_h": float(curve.samples.min())},
        )


def _polar_points(curve: SupportCurve, upsample: int = UPSAMPLE) -> np.ndarray:
    """n(theta) / h(theta) on a Fourier-upsampled angle grid: boundary points of the polar body."""
    h = spectral.upsample(curve.samples, upsample)
    normal, _ = frame(spectral.angles(h.size))
    return normal / h[:, None]


def _discrete_max(polar: np.ndarray, flat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Max of <y, polar_k> over k and its index, in chunks of CHUNK points."""
    values = np.empty(len(flat))
    index = np.empty(len(flat), dtype=int)
    for start in range(0, len(flat), CHUNK):
        block = flat[start : start + CHUNK] @ polar.T
        best = np.argmax(block, axis=1)
        index[start : start + CHUNK] = best
        values[start : start + CHUNK] = block[np.arange(len(best)), best]
    return values, index


def gauge_function(curve: SupportCurve, y):
    """
    mu(y) = max_theta <y, n(theta)> / h(theta), clamped at 0.

    The maximum over the upsampled angle grid is refined by a parabola through its
    neighbours, and the refined angle is evaluated on the trigonometric interpolant,
    so the result is smooth away from the origin. Accepts one point or an array of
    points (last axis 2).
    """
    _require_origin_inside(curve)
    y = np.asarray(y, dtype=float)
    flat = y.reshape(-1, 2)
    polar = _polar_points(curve)
    size = len(polar)
    mid, j = _discrete_max(polar, flat)
    left = np.sum(flat * polar[(j - 1) % size], axis=1)
    right = np.sum(flat * polar[(j + 1) % size], axis=1)

    curvature = left - 2.0 * mid + right
    bend = curvature < 0
    offset = np.zeros(len(flat))
    offset[bend] = 0.5 * (left - right)[bend] / curvature[bend]
    theta = spectral.angles(size)[j] + offset * (2.0 * np.pi / size)
    normal, _ = frame(theta)
    refined = np.sum(flat * normal, axis=1) / spectral.evaluate(curve.samples, theta)

    values = np.maximum(np.maximum(refined, mid), 0.0)
    if y.ndim == 1:
        return float(values[0])
    return values.reshape(y.shape[:-1])


def gauge_radial(curve: SupportCurve, points: np.ndarray) -> np.ndarray:
    """Fast gauge |y| / rho(arg y) from the boundary's radial function."""
    _require_origin_inside(curve)
    phi, rho = curve.radial_function(RADIAL_UPSAMPLE)
    points = np.asarray(points, dtype=float)
    radius = np.hypot(points[..., 0], points[..., 1])
    angle = np.mod(np.arctan2(points[..., 1], points[..., 0]), 2.0 * np.pi)
    return radius / np.interp(angle, phi, rho, period=2.0 * np.pi)


def lipschitz_bound(curve: SupportCurve) -> float:
    """max |grad mu| = 1 / min h."""
    _require_origin_inside(curve)
    return float(1.0 / curve.samples.min())


def build_cone(curve: SupportCurve, N: float, L: Optional[float], resolution: int) -> GridField:
    """f_N = N * mu sampled on [-L, L]^2 (L = None picks box_half_width)."""
    if N <= 0:
        raise InvalidDomainError(f"cone slope N must be positive, got {N}")
    _require_origin_inside(curve)
    L = box_half_width(curve, L)
    spacing = 2.0 * L / (resolution - 1)
    if spacing > 0.5 * curve.samples.min():
        raise InvalidDomainError(
            f"resolution {resolution} is too coarse: spacing {spacing:.3g} exceeds half of min h",
            {"spacing": spacing, "min_h": float(curve.samples.min())},
        )
    axis = np.linspace(-L, L, resolution)
    mesh = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)
    values = N * gauge_function(curve, mesh)
    cone = GridField(
        half_width=L,
        values=values,
        boundary_kind="dirichlet_cone",
        N=N,
        label=f"cone({curve.label}, N={N:g})",
    )
    bound = N * lipschitz_bound(curve)
    cone.flagged["lipschitz_bound"] = bound
    logger.debug(f"Built {cone.label}: Lipschitz {cone.lipschitz():.4f} (bound {bound:.4f})")
    return cone


def cone_straightness(field: GridField, apex_cells: int = 3) -> float:
    """max |<z, nu>| = |f - y . grad f| / sqrt(1 + |grad f|^2) away from the apex and the box edge."""
    fx, fy = field.gradient()
    x, y = field.mesh()
    defect = np.abs(field.values - x * fx - y * fy) / np.sqrt(1.0 + fx**2 + fy**2)
    keep = np.hypot(x, y) > apex_cells * field.spacing
    keep[[0, -1], :] = False
    keep[:, [0, -1]] = False
    return float(defect[keep].max())


def inscribed_distance(curve: SupportCurve) -> float:
    """
    d(M0): half the radius of the largest ball centred at (0, 1) missing the
    region below the slope-one cone, i.e. half the distance from (0, 1) to the
    cone's generating rays: 0.5 * min |x| / sqrt(1 + |x|^2).
    """
    _require_origin_inside(curve)
    radii = np.linalg.norm(curve.points(UPSAMPLE), axis=1)
    return float(0.5 * np.min(radii / np.sqrt(1.0 + radii**2)))


def circumradius(curve: SupportCurve) -> float:
    return float(np.linalg.norm(curve.points(UPSAMPLE), axis=1).max())


def box_half_width(curve: SupportCurve, L: Optional[float] = None) -> float:
    """L if given, else BOX_CIRCUMRADII times the circumradius of the curve."""
    if L is not None:
        return float(L)
    return BOX_CIRCUMRADII * circumradius(curve)


def infimum_bound(curve: SupportCurve, N: float, n: int = 1) -> Tuple[float, float]:
    """(sqrt(2(n+1)) N / d, d)"""
    d = inscribed_distance(curve)
    return float(np.sqrt(2.0 * (n + 1)) * N / d), d
