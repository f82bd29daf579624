"""
The asymptotically conical space-time track { t^(-1/2) (x, 1) : x in M_t } as a graph,
and its comparison with squashed expanders.

The track height at y is the level alpha with y in alpha * M_(alpha^-2); since the
gauge mu_t of M_t is 1-homogeneous that is the root of phi(alpha) = mu_(alpha^-2)(y) - alpha,
which is strictly decreasing in alpha.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.core.exceptions import FlowHorizonError, InvalidDomainError
from src.core.models.curve import FlowHistory, SupportCurve
from src.core.models.grid import GridField

from .expander_service import compute_expander, squash
from .gauge_service import box_half_width, gauge_radial

logger = logging.getLogger(__name__)

TRACK_LEVELS = 256
LEVEL_SET_RAYS = 360
RAY_SAMPLES = 2000


def level_time(alpha: float) -> float:
    """Flow time whose rescaled curve sits at height alpha."""
    return float(alpha) ** -2


def extinction_time(history: FlowHistory) -> float:
    """Area falls at rate 2 pi, so T = t + A(t) / (2 pi) from the last snapshot."""
    return history.t_max + history.curve_at(history.t_max).area() / (2.0 * np.pi)


def _inverse_interpolation(alphas: List[float], phis: List[np.ndarray], mask: np.ndarray) -> np.ndarray:
    """Lagrange interpolation of alpha as a function of phi, evaluated at phi = 0."""
    phi = [p[mask] for p in phis]
    root = np.zeros(int(mask.sum()))
    for i, alpha in enumerate(alphas):
        weight = np.ones_like(root)
        for j in range(len(alphas)):
            if j != i:
                weight *= -phi[j] / (phi[i] - phi[j])
        root += alpha * weight
    return root


def spacetime_track(
    history: FlowHistory,
    L: float,
    resolution: int,
    levels: int = TRACK_LEVELS,
) -> GridField:
    """
    v_infinity on [-L, L]^2 by scanning alpha levels and locating the sign change of phi.

    Levels are spaced quadratically away from the smallest covered alpha, where phi
    curves most, and each root comes from cubic inverse interpolation over the four
    levels around its bracket. Below the covered range the last curve is continued by
    homothetic shrinking to the extinction time (exact for circles); above it the
    earliest curve's gauge is used. Both extensions are counted in `flagged`.
    """
    if len(history) < 4:
        raise FlowHorizonError("the track needs at least four stored snapshots")
    if levels < 4:
        raise InvalidDomainError(f"the track needs at least four levels, got {levels}")
    positive = history.times[history.times > 0]
    if positive.size == 0:
        raise FlowHorizonError("the history holds no positive times")
    t_low, t_high = float(positive[0]), float(history.t_max)
    alpha_min = t_high**-0.5
    alpha_max = t_low**-0.5 if history.t_min > 0 else np.inf

    axis = np.linspace(-L, L, resolution)
    points = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1)

    # The root never exceeds mu_(t_max)(y): curves shrink, so gauges grow in t.
    last_gauge = gauge_radial(history.curve_at(t_high), points)
    alpha_top = min(alpha_max, 1.01 * max(float(last_gauge.max()), alpha_min) + 1e-9)
    alphas = alpha_min + (alpha_top - alpha_min) * np.linspace(0.0, 1.0, levels) ** 2

    values = np.full(points.shape[:-1], np.nan)
    capped = last_gauge - alpha_min <= 0
    T = extinction_time(history)
    values[capped] = np.sqrt((1.0 + last_gauge[capped] ** 2 * (T - t_high)) / T)

    window_alphas: List[float] = []
    window_phis: List[np.ndarray] = []

    def settle(left: int) -> None:
        before, after = window_phis[left], window_phis[left + 1]
        crossing = np.isnan(values) & (before > 0) & (after <= 0)
        if crossing.any():
            values[crossing] = _inverse_interpolation(window_alphas, window_phis, crossing)

    for alpha in alphas:
        t = min(max(level_time(alpha), history.t_min), t_high)
        window_alphas.append(float(alpha))
        window_phis.append(gauge_radial(history.curve_at(t), points) - alpha)
        if len(window_alphas) > 4:
            window_alphas.pop(0)
            window_phis.pop(0)
        if len(window_alphas) >= 3:
            settle(len(window_alphas) - 3)
    settle(len(window_alphas) - 2)

    conical = np.isnan(values)
    if np.any(conical):
        values[conical] = gauge_radial(history.curve_at(t_low), points)[conical]

    track = GridField(
        half_width=L,
        values=values,
        boundary_kind="dirichlet_cone",
        N=None,
        label=f"track({history.metadata.get('label', 'flow')})",
        flagged={
            "alpha_range": [alpha_min, alpha_top],
            "levels": levels,
            "extinction_time": T,
            "homothetic_cap_points": int(capped.sum()),
            "conical_points": int(conical.sum()),
        },
    )
    if capped.any() or conical.any():
        logger.info(
            f"Track {track.label}: {int(capped.sum())} points below alpha = {alpha_min:.4f}, "
            f"{int(conical.sum())} extended conically"
        )
    return track


def covered_levels(history: FlowHistory, field: GridField, count: int = 5) -> np.ndarray:
    """alpha values whose level set alpha * M_(alpha^-2) lies inside half the box."""
    t_high = float(history.t_max)
    alpha_min = t_high**-0.5
    candidates = np.linspace(1.05 * alpha_min, 1.05 * alpha_min + 0.5 * field.half_width, 4 * count)
    inside = []
    for alpha in candidates:
        curve = history.curve_at(level_time(alpha))
        if alpha * np.linalg.norm(curve.points(), axis=1).max() <= 0.5 * field.half_width:
            inside.append(alpha)
    if not inside:
        raise InvalidDomainError("no level set of the track fits inside half the box")
    return np.asarray(inside)[np.linspace(0, len(inside) - 1, min(count, len(inside))).astype(int)]


def level_set_deviation(field: GridField, history: FlowHistory, alpha: float, rays: int = LEVEL_SET_RAYS) -> float:
    """
    Largest radial gap between the alpha-level set of the field and alpha * M_(alpha^-2).

    Both sets are star-shaped about the origin, so this bounds their Hausdorff distance.
    """
    curve = history.curve_at(level_time(alpha))
    phi, rho = curve.radial_function()
    angles = np.linspace(0.0, 2.0 * np.pi, rays, endpoint=False)
    expected = alpha * np.interp(angles, phi, rho, period=2.0 * np.pi)

    radii = np.linspace(0.0, field.half_width, RAY_SAMPLES)
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    samples = field.sample(radii[None, :, None] * directions[:, None, :])
    deviation = 0.0
    for k in range(rays):
        above = np.nonzero(samples[k] >= alpha)[0]
        if above.size == 0 or above[0] == 0:
            return float("inf")
        j = above[0]
        lo, hi = samples[k, j - 1], samples[k, j]
        found = radii[j - 1] + (alpha - lo) / (hi - lo) * (radii[j] - radii[j - 1])
        deviation = max(deviation, abs(found - expected[k]))
    return float(deviation)


def limit_comparison(
    curve: SupportCurve,
    history: FlowHistory,
    N_sequence: Sequence[float],
    L: Optional[float],
    resolution: int,
    track: Optional[GridField] = None,
    ds: Optional[float] = None,
) -> Dict[str, Any]:
    """
    Sup-distances on [-L/2, L/2]^2 between squashed expanders and the space-time track.

    The sequence should fall with N and end within five grid tolerances; the track's
    level sets should sit within two cells of the rescaled flow. L = None picks
    box_half_width of the initial curve.
    """
    N_sequence = sorted(float(N) for N in N_sequence)
    if not N_sequence or N_sequence[0] < 1:
        raise InvalidDomainError("limit comparison needs slopes N >= 1")
    L = box_half_width(curve, L)
    track = track or spacetime_track(history, L, resolution)
    inner = track.restrict(0.5 * L)

    rows: List[Dict[str, float]] = []
    squashed: Dict[float, GridField] = {}
    for N in N_sequence:
        v_N = squash(compute_expander(curve, N, L, resolution, ds=ds), N)
        squashed[N] = v_N
        distance = float(np.abs(v_N.restrict(0.5 * L).values - inner.values).max())
        rows.append({"N": N, "distance": distance, "tolerance": track.tolerance})
        logger.info(f"📏 N = {N:g}: sup |v_N - v_inf| = {distance:.4g}")

    distances = np.array([row["distance"] for row in rows])
    # Non-increasing up to one grid tolerance of noise.
    trend_ok = bool(np.all(np.diff(distances) <= track.tolerance) and distances[-1] < distances[0])

    alphas = covered_levels(history, track)
    deviations = [level_set_deviation(track, history, float(alpha)) for alpha in alphas]
    largest = squashed[N_sequence[-1]]
    expander_deviations = [level_set_deviation(largest, history, float(alpha)) for alpha in alphas]

    return {
        "rows": rows,
        "distances": distances.tolist(),
        "trend_ok": trend_ok,
        "final_distance": float(distances[-1]),
        "final_ok": bool(distances[-1] <= 5.0 * track.tolerance),
        "tolerance": track.tolerance,
        "alphas": alphas.tolist(),
        "level_set_deviation": deviations,
        "level_set_ok": bool(max(deviations) <= 2.0 * track.spacing),
        "expander_level_set_deviation": expander_deviations,
        "track": track,
        "squashed": squashed,
    }
