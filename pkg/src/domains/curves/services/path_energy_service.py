"""
Minimal tangential energy of space-time paths on a flow and the integrated Harnack gap.

A path theta(t) through x(theta, t) has tangential speed r * theta' - kappa_theta:
fixed-theta points drift by -kappa_theta along tau. The energy of a polyline is
sum_j (r_j * dtheta_j - kappa_theta_j * dt)^2 / dt with midpoint values.
"""

import logging
from typing import Tuple

import numpy as np
from scipy.optimize import least_squares

from src.core import spectral
from src.core.exceptions import InvalidDomainError
from src.core.models.curve import FlowHistory
from src.infrastructure.config.settings import PATH_ANGLE_NODES, PATH_TIME_SLICES

from .harnack_service import curvature_at

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
TIE_TOLERANCE = 1e-13


def _one_minus_k2(k):
    return 1.0 - k**2


def _validate(history: FlowHistory, t1: float, t2: float) -> None:
    if not 0 < t1 < t2:
        raise InvalidDomainError(f"need 0 < t1 < t2, got t1 = {t1}, t2 = {t2}")
    if t1 < history.t_min or t2 > history.t_max:
        raise InvalidDomainError(
            f"[{t1}, {t2}] is outside the history range [{history.t_min}, {history.t_max}]"
        )


class _MidpointFields:
    """r and kappa_theta at the midpoint time of every slice"""

    def __init__(self, history: FlowHistory, mid_times: np.ndarray):
        supports = np.array([history.support_at(t) for t in mid_times])
        self.M = supports.shape[1]
        r = spectral.derivative(supports, 2) + supports
        r_theta = spectral.derivative(r, 1)
        grid = spectral.angles(self.M)
        self.grid = np.append(grid, TWO_PI)
        self.r_table = np.hstack([r, r[:, :1]])
        kappa_theta = -r_theta / r**2
        self.kt_table = np.hstack([kappa_theta, kappa_theta[:, :1]])
        self.c_r = [spectral.coefficients(supports, order, _one_minus_k2) for order in (0, 1, 2)]

    def interpolated(self, j: int, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Periodic linear interpolation on the sample grid (DP stage)."""
        wrapped = np.mod(theta, TWO_PI)
        return (
            np.interp(wrapped, self.grid, self.r_table[j]),
            np.interp(wrapped, self.grid, self.kt_table[j]),
        )

    def exact(self, theta: np.ndarray):
        """r, r', kappa_theta, d(kappa_theta)/dtheta at one angle per slice (polish stage)."""
        r, r1, r2 = (spectral.evaluate_coefficients(c, theta) for c in self.c_r)
        kappa_theta = -r1 / r**2
        kappa_theta_theta = -r2 / r**2 + 2.0 * r1**2 / r**3
        return r, r1, kappa_theta, kappa_theta_theta


def _segment_cost(fields: _MidpointFields, j: int, a: np.ndarray, b: np.ndarray, dt: float) -> np.ndarray:
    r, kt = fields.interpolated(j, 0.5 * (a + b))
    return (r * (b - a) - kt * dt) ** 2 / dt


def _residuals(fields: _MidpointFields, path: np.ndarray, dt: float) -> np.ndarray:
    r, _, kt, _ = fields.exact(0.5 * (path[1:] + path[:-1]))
    return (r * np.diff(path) - kt * dt) / np.sqrt(dt)


def _dynamic_program(fields: _MidpointFields, theta1: float, targets, nodes: np.ndarray, dt: float):
    """Cheapest lattice polyline from theta1 to any target; ties keep the smallest angle change."""
    slices = fields.r_table.shape[0]
    if slices == 1:
        costs = [float(_segment_cost(fields, 0, np.array([theta1]), np.array([g]), dt)[0]) for g in targets]
        best = int(np.argmin(costs))
        return costs[best], np.array([theta1, targets[best]])

    cost = _segment_cost(fields, 0, np.full(nodes.size, theta1), nodes, dt)
    parents = []
    step = nodes[None, :] - nodes[:, None]
    for j in range(1, slices - 1):
        total = cost[:, None] + _segment_cost(fields, j, nodes[:, None], nodes[None, :], dt)
        best = total.min(axis=0)
        tied = total <= best[None, :] + TIE_TOLERANCE * (1.0 + np.abs(best[None, :]))
        parent = np.argmin(np.where(tied, np.abs(step), np.inf), axis=0)
        parents.append(parent)
        cost = total[parent, np.arange(nodes.size)]

    finals = []
    for goal in targets:
        total = cost + _segment_cost(fields, slices - 1, nodes, np.full(nodes.size, goal), dt)
        best = total.min()
        tied = total <= best + TIE_TOLERANCE * (1.0 + abs(best))
        last = int(np.argmin(np.where(tied, np.abs(goal - nodes), np.inf)))
        finals.append((float(total[last]), last, goal))
    energy, last, goal = min(finals, key=lambda item: (item[0], abs(item[2] - theta1)))

    indices = [last]
    for parent in reversed(parents):
        indices.append(int(parent[indices[-1]]))
    indices.reverse()
    return energy, np.concatenate([[theta1], nodes[indices], [goal]])


def _polish(fields: _MidpointFields, path: np.ndarray, dt: float) -> np.ndarray:
    """Levenberg-Marquardt on the interior angles with the analytic bidiagonal Jacobian."""
    interior = path[1:-1]
    if interior.size == 0:
        return path
    start, end = path[0], path[-1]

    def full(x):
        return np.concatenate([[start], x, [end]])

    def residual(x):
        return _residuals(fields, full(x), dt)

    def jacobian(x):
        p = full(x)
        r, r1, _, ktt = fields.exact(0.5 * (p[1:] + p[:-1]))
        half = 0.5 * (r1 * np.diff(p) - ktt * dt)
        scale = 1.0 / np.sqrt(dt)
        slices = p.size - 1
        jac = np.zeros((slices, interior.size))
        rows = np.arange(slices)
        # segment j depends on theta_j (column j - 1) and theta_{j+1} (column j)
        left = rows[1:]
        jac[left, left - 1] = (-r[left] + half[left]) * scale
        right = rows[:-1]
        jac[right, right] = (r[right] + half[right]) * scale
        return jac

    result = least_squares(residual, interior, jac=jacobian, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    polished = full(result.x)
    if np.sum(_residuals(fields, polished, dt) ** 2) <= np.sum(_residuals(fields, path, dt) ** 2):
        return polished
    logger.debug("Polish did not improve the lattice path; keeping it")
    return path


def path_energy(
    history: FlowHistory,
    theta1: float,
    t1: float,
    theta2: float,
    t2: float,
    time_slices: int = PATH_TIME_SLICES,
    angle_nodes: int = PATH_ANGLE_NODES,
    polish: bool = True,
) -> Tuple[float, np.ndarray]:
    """
    Delta = min over paths of the integrated squared tangential speed.

    Returns Delta and the minimizing polyline as rows (t, theta). Angles are
    unwrapped: the path may end at theta2 + 2 pi k.
    """
    _validate(history, t1, t2)
    if time_slices < 1 or angle_nodes < 2:
        raise InvalidDomainError("need at least one time slice and two angle nodes")

    times = np.linspace(t1, t2, time_slices + 1)
    dt = (t2 - t1) / time_slices
    fields = _MidpointFields(history, times[:-1] + 0.5 * dt)

    offset = np.mod(theta2 - theta1 + np.pi, TWO_PI) - np.pi
    nearest = theta1 + offset
    targets = [nearest, nearest - TWO_PI * (1.0 if offset > 0 else -1.0)]
    nodes = theta1 + np.linspace(-TWO_PI, TWO_PI, angle_nodes)

    _, path = _dynamic_program(fields, theta1, targets, nodes, dt)
    if polish:
        path = _polish(fields, path, dt)
    energy = float(np.sum(_residuals(fields, path, dt) ** 2))
    logger.debug(f"path_energy({theta1:.3f}, {t1:.3f} -> {theta2:.3f}, {t2:.3f}) = {energy:.6g}")
    return energy, np.column_stack([times, path])


def integrated_harnack_gap(
    history: FlowHistory,
    theta1: float,
    t1: float,
    theta2: float,
    t2: float,
    time_slices: int = PATH_TIME_SLICES,
    angle_nodes: int = PATH_ANGLE_NODES,
) -> float:
    """H(x2, t2) - H(x1, t1) sqrt(t1/t2) exp(-Delta/4)"""
    delta, _ = path_energy(history, theta1, t1, theta2, t2, time_slices, angle_nodes)
    return integrated_gap_from_energy(history, theta1, t1, theta2, t2, delta)


def integrated_gap_from_energy(history, theta1, t1, theta2, t2, delta: float) -> float:
    kappa1 = float(curvature_at(history, theta1, t1)[0])
    kappa2 = float(curvature_at(history, theta2, t2)[0])
    return kappa2 - kappa1 * np.sqrt(t1 / t2) * np.exp(-delta / 4.0)
