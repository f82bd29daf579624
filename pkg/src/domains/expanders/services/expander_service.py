"""
Graphical mean curvature flow of entire graphs on a box, self-expanders and squashing.

Squashed graphs V = v / N evolve by

    V_s = Delta V - (DV . D^2 V . DV) / (1/N^2 + |DV|^2),

which at 1/N = 0 is the level-set flow; there |DV|^2 is floored by LEVEL_SET_FLOOR.
"""

import logging
import math
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from src.core.exceptions import BracketError, InvalidDomainError, NumericalInstabilityError
from src.core.models.curve import SupportCurve
from src.core.models.grid import GridField, RadialProfile
from src.infrastructure.config.settings import LEVEL_SET_FLOOR

from .gauge_service import box_half_width, build_cone, infimum_bound

logger = logging.getLogger(__name__)

STABILITY_FACTOR = 0.15
BLOWUP_FACTOR = 1e6
SERIES_START = 1e-3
SLOPE_TOLERANCE = 1e-8
DEFAULT_R_MAX = 20.0


def stable_step(field: GridField) -> float:
    return STABILITY_FACTOR * field.spacing**2


def _apply_boundary(values: np.ndarray, initial: np.ndarray, kind: str) -> None:
    if kind == "dirichlet_cone":
        values[0, :], values[-1, :] = initial[0, :], initial[-1, :]
        values[:, 0], values[:, -1] = initial[:, 0], initial[:, -1]
    else:
        values[0, :] = 2.0 * values[1, :] - values[2, :]
        values[-1, :] = 2.0 * values[-2, :] - values[-3, :]
        values[:, 0] = 2.0 * values[:, 1] - values[:, 2]
        values[:, -1] = 2.0 * values[:, -2] - values[:, -3]


def _rate(V: np.ndarray, spacing: float, eps_sq: float) -> np.ndarray:
    """Right-hand side on interior nodes."""
    c = V[1:-1, 1:-1]
    vx = (V[2:, 1:-1] - V[:-2, 1:-1]) / (2.0 * spacing)
    vy = (V[1:-1, 2:] - V[1:-1, :-2]) / (2.0 * spacing)
    vxx = (V[2:, 1:-1] - 2.0 * c + V[:-2, 1:-1]) / spacing**2
    vyy = (V[1:-1, 2:] - 2.0 * c + V[1:-1, :-2]) / spacing**2
    vxy = (V[2:, 2:] - V[2:, :-2] - V[:-2, 2:] + V[:-2, :-2]) / (4.0 * spacing**2)
    grad_sq = vx**2 + vy**2
    return vxx + vyy - (vx**2 * vxx + 2.0 * vx * vy * vxy + vy**2 * vyy) / (eps_sq + grad_sq)


def graphical_flow_snapshots(
    field: GridField,
    N_inv: float,
    times: Sequence[float],
    ds: Optional[float] = None,
) -> List[GridField]:
    """Explicit time stepping; returns the field at each requested time (ascending)."""
    if N_inv < 0:
        raise InvalidDomainError(f"N_inv must be nonnegative, got {N_inv}")
    times = sorted(float(s) for s in times)
    if not times or times[0] <= 0:
        raise InvalidDomainError("flow times must be positive")
    limit = 0.25 * field.spacing**2
    ds = stable_step(field) if ds is None else ds
    if not 0 < ds <= limit:
        raise InvalidDomainError(f"ds = {ds:.3g} violates the parabolic bound {limit:.3g}")

    eps_sq = N_inv**2
    floored = eps_sq < LEVEL_SET_FLOOR
    eps_sq = max(eps_sq, LEVEL_SET_FLOOR)

    initial = field.values
    V = initial.copy()
    ceiling = BLOWUP_FACTOR * (1.0 + np.abs(initial).max())
    snapshots: List[GridField] = []
    s = 0.0
    step = 0
    for target in times:
        count = math.ceil((target - s) / ds - 1e-9)
        h = (target - s) / count if count else 0.0
        for _ in range(count):
            V[1:-1, 1:-1] += h * _rate(V, field.spacing, eps_sq)
            _apply_boundary(V, initial, field.boundary_kind)
            step += 1
            if step % 50 == 0 and not (np.all(np.isfinite(V)) and np.abs(V).max() < ceiling):
                raise NumericalInstabilityError(step, f"graphical flow blew up at step {step} (s = {s:.4g})")
        s = target
        if not np.all(np.isfinite(V)):
            raise NumericalInstabilityError(step, f"graphical flow produced non-finite values at s = {s:.4g}")
        flagged = dict(field.flagged)
        flagged.update({"s": s, "steps": step, "ds": h, "N_inv": N_inv})
        if floored:
            flagged["level_set_floor"] = LEVEL_SET_FLOOR
        snapshots.append(replace(field, values=V.copy(), flagged=flagged))
    logger.debug(f"Graphical flow: {step} steps to s = {s:.3g} (N_inv = {N_inv:.3g})")
    return snapshots


def graphical_flow(field: GridField, N_inv: float, s_end: float, ds: Optional[float] = None) -> GridField:
    return graphical_flow_snapshots(field, N_inv, [s_end], ds)[0]


def squash(field: GridField, N: float) -> GridField:
    """v_N = v / N (convexity and Lipschitz bounds scale by 1/N)."""
    if N < 1:
        raise InvalidDomainError(f"squash needs N >= 1, got {N}")
    return field.scaled(1.0 / N, label=f"squash({field.label}, {N:g})", N=N)


def compute_expander(
    curve: SupportCurve,
    N: float,
    L: Optional[float],
    resolution: int,
    ds: Optional[float] = None,
    boundary_kind: str = "dirichlet_cone",
) -> GridField:
    """
    Self-expander asymptotic to f_N as the s = 1 slice of the flow from the cone.

    The squashed cone mu is flowed with N_inv = 1/N and rescaled by N. Validation
    results are recorded in `flagged`. L = None picks box_half_width.
    """
    if N < 1:
        raise InvalidDomainError(f"expander slope N must be >= 1, got {N}")
    L = box_half_width(curve, L)
    gauge = build_cone(curve, 1.0, L, resolution)
    gauge = replace(gauge, boundary_kind=boundary_kind)
    flowed = graphical_flow(gauge, 1.0 / N, 1.0, ds)
    expander = flowed.scaled(N, N=N, label=f"expander({curve.label}, N={N:g})")

    cone_lipschitz = N * gauge.lipschitz()
    measured = expander.lipschitz()
    bound, d = infimum_bound(curve, N)
    interior = expander.restrict(0.5 * L)
    x, y = expander.mesh()
    rim = np.maximum(np.abs(x), np.abs(y)) >= 0.75 * L
    edge_gap = float(np.abs(expander.values - N * gauge.values)[rim].max())
    expander.flagged.update(
        {
            "lipschitz": measured,
            "cone_lipschitz": cone_lipschitz,
            "lipschitz_ok": measured <= cone_lipschitz + 2.0 * expander.tolerance,
            "min_height": float(expander.values.min()),
            "infimum_bound": bound,
            "d": d,
            "infimum_ok": float(expander.values.min()) <= bound,
            "edge_gap": edge_gap,
            "interior_min": float(interior.values.min()),
        }
    )
    if not (expander.flagged["lipschitz_ok"] and expander.flagged["infimum_ok"]):
        logger.warning(f"⚠️ {expander.label} violates a validation bound: {expander.flagged}")
    return expander


def _profile_rhs(r: float, state: np.ndarray) -> np.ndarray:
    u, p = state
    return np.array([p, (1.0 + p**2) * (0.5 * (u - r * p) - p / r)])


def _shoot(a: float, R_max: float, dense: bool = False):
    r0 = SERIES_START
    start = np.array([a + a * r0**2 / 8.0, a * r0 / 4.0])
    return solve_ivp(
        _profile_rhs,
        (r0, R_max),
        start,
        method="Radau",
        rtol=1e-12,
        atol=1e-13,
        dense_output=dense,
    )


def _far_slope(a: float, R_max: float) -> float:
    solution = _shoot(a, R_max)
    if not solution.success:
        raise BracketError(a, a, f"profile integration failed for apex {a}: {solution.message}")
    return float(solution.y[1, -1] / (1.0 - R_max**-2))


def profile_residual(r: np.ndarray, u: np.ndarray, p: np.ndarray, p_r: np.ndarray) -> np.ndarray:
    """H + <x, nu>/2 for the rotational graph u(r), normalized by the graph's area element."""
    w = np.sqrt(1.0 + p**2)
    return (p_r / (1.0 + p**2) + p / r - 0.5 * (u - r * p)) / w


def radial_expander(N: float, R_max: float = DEFAULT_R_MAX, samples: int = 4001) -> RadialProfile:
    """
    Rotationally symmetric expander with asymptotic slope N by shooting on u(0) = a.

    u_rr / (1 + u_r^2) + u_r / r = (u - r u_r) / 2, with u ~ N r + N / r far out.
    """
    if not N > 0:
        raise InvalidDomainError(f"slope N must be positive, got {N}")

    def miss(a: float) -> float:
        return _far_slope(a, R_max) - N

    lo, hi = 0.0, 1.0
    for _ in range(60):
        if miss(hi) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise BracketError(lo, hi, f"no apex height in [{lo}, {hi}] reaches slope {N}")
    if miss(lo) > 0:
        raise BracketError(lo, hi, f"slope at the lower bracket end already exceeds {N}")

    apex = brentq(miss, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    logger.debug(f"Radial expander N = {N}: apex {apex:.12f} in bracket [{lo}, {hi}]")

    solution = _shoot(apex, R_max, dense=True)
    radii = np.concatenate([[0.0], np.linspace(SERIES_START, R_max, samples - 1)])
    u, p = solution.sol(radii[1:])
    heights = np.concatenate([[apex], u])
    slopes = np.concatenate([[0.0], p])

    probe = np.linspace(0.05, R_max - 1e-3, 2000)
    step = 1e-4
    u_mid, p_mid = solution.sol(probe)
    p_r = (solution.sol(probe + step)[1] - solution.sol(probe - step)[1]) / (2.0 * step)
    residual = profile_residual(probe, u_mid, p_mid, p_r)

    return RadialProfile(
        N=N,
        radii=radii,
        heights=heights,
        slopes=slopes,
        details={
            "far_slope": _far_slope(apex, R_max),
            "slope_error": abs(miss(apex)),
            "max_residual": float(np.abs(residual).max()),
            "bracket": [lo, hi],
        },
    )


def expander_summary(field: GridField) -> Dict:
    keys = ("lipschitz", "cone_lipschitz", "min_height", "infimum_bound", "d", "edge_gap")
    return {k: field.flagged.get(k) for k in keys}


def radial_agreement(field: GridField, profile: RadialProfile, half_width: float) -> float:
    """sup |field(y) - u(|y|)| over the sub-box [-l, l]^2."""
    window = field.restrict(half_width)
    x, y = window.mesh()
    return float(np.abs(window.values - profile.height_at(np.hypot(x, y))).max())


def self_similarity_defect(early: GridField, late: GridField, half_width: float) -> float:
    """
    sup |V(x, s) - sqrt(s / S) V(x sqrt(S / s), S)| over [-l, l]^2 for snapshots at s < S.

    Flows started from an exact cone are self-similar, so the defect is pure discretization error.
    """
    s, S = early.flagged["s"], late.flagged["s"]
    if not 0 < s < S:
        raise InvalidDomainError(f"snapshots must be ordered in flow time, got s = {s}, S = {S}")
    stretch = np.sqrt(S / s)
    if half_width * stretch > late.half_width:
        raise InvalidDomainError(f"sub-box {half_width} stretched by {stretch:.3g} leaves the grid")
    window = early.restrict(half_width)
    x, y = window.mesh()
    rescaled = late.sample(np.stack([x * stretch, y * stretch], axis=-1)) / stretch
    return float(np.abs(window.values - rescaled).max())
