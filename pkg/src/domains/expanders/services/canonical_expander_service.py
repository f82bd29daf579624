"""
The canonical self-expander Gamma_N = { t^(-1/2) (x, N) : x in M_t } over a curve flow.

Its second fundamental form on the pushed-forward direction V + d/dt is proportional
to the Hamilton Harnack quantity Z(V, V) / sqrt(t), with a constant sigma_N tending
to 1 as N grows; Gamma_N is an expander up to an error E_N of order 1/N.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from src.core.exceptions import InvalidDomainError
from src.core.models.curve import FlowHistory, SupportCurve
from src.core.models.grid import SpaceTimeSurface
from src.domains.convexity.services.convexity_service import second_fundamental_form, surface_sff
from src.domains.curves.services.harnack_service import curvature_at, harnack_Z

logger = logging.getLogger(__name__)

THETA_STEP = 1e-3
TIME_STEP = 1e-4
INWARD = np.array([0.0, 0.0, 1.0])


def surface_steps(params: np.ndarray) -> Tuple[float, float]:
    """(theta, t) difference steps; the time step shrinks with t near the cone point."""
    return THETA_STEP, min(TIME_STEP, params[1] / 100.0)


def pushed_direction(history: FlowHistory, theta: float, t: float, v: float) -> np.ndarray:
    """
    (theta, t) components of V + d/dt.

    At fixed theta a point drifts tangentially at speed -kappa_theta, and d_theta x = tau / kappa,
    so the normal-flow time direction is d/dt|_theta + kappa kappa_theta d/dtheta and V = v kappa d/dtheta.
    """
    kappa, kappa_theta, _ = curvature_at(history, theta, t)
    return np.array([float(kappa) * (v + float(kappa_theta)), 1.0])


@dataclass
class CanonicalSample:
    theta: float
    t: float
    v: float
    N: float
    sff: float
    Z: float
    sigma: float
    residual: float
    mean_curvature: float

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.sff, self.Z, self.sigma, self.residual


def canonical_sample(history: FlowHistory, N: float, theta: float, t: float, v: float) -> CanonicalSample:
    if N < 1:
        raise InvalidDomainError(f"stretch N must be >= 1, got {N}")
    history.require_interior(t, margin=2.0 * surface_steps(np.array([theta, t]))[1])
    surface = SpaceTimeSurface(N, history)
    params = np.array([theta, t])
    form = second_fundamental_form(surface, params, surface_steps, INWARD)
    w = pushed_direction(history, theta, t, v)
    sff = surface_sff(surface, params, w, surface_steps, INWARD, form=form)
    Z = harnack_Z(history, theta, t, v).Z
    mean_curvature = float(np.trace(np.linalg.solve(form["g"], form["h"])))
    residual = mean_curvature - 0.5 * float(form["point"] @ form["normal"])
    return CanonicalSample(
        theta=float(theta),
        t=float(t),
        v=float(v),
        N=float(N),
        sff=sff,
        Z=Z,
        sigma=Z / (np.sqrt(t) * sff),
        residual=residual,
        mean_curvature=mean_curvature,
    )


def canonical_expander_check(history: FlowHistory, N: float, theta: float, t: float, v: float):
    """(sff_value, Z_value, sigma_estimate, residual_E) at one point of Gamma_N."""
    return canonical_sample(history, N, theta, t, v).as_tuple()


def circle_sigma(N: float, t: float, R: float = 1.0) -> float:
    """Proportionality constant for the shrinking circle of initial radius R."""
    return float(np.sqrt(1.0 + 1.0 / ((R**2 - 2.0 * t) * N**2)))


def sigma_lattice(
    history: FlowHistory,
    N: float,
    thetas: Sequence[float],
    times: Sequence[float],
    velocities: Sequence[float],
) -> Dict[str, Any]:
    """Ratios Z / (sqrt(t) h(W, W)) and residuals E_N over a (theta, t, v) lattice."""
    thetas, times, velocities = (np.asarray(a, dtype=float) for a in (thetas, times, velocities))
    sigma = np.empty((times.size, thetas.size, velocities.size))
    residual = np.empty((times.size, thetas.size))
    for i, t in enumerate(times):
        for j, theta in enumerate(thetas):
            for k, v in enumerate(velocities):
                sample = canonical_sample(history, N, theta, t, v)
                sigma[i, j, k] = sample.sigma
            residual[i, j] = sample.residual
    fitted = float(np.median(sigma))
    spread = float((sigma.max() - sigma.min()) / abs(fitted))
    logger.debug(f"sigma_{N:g}: fitted {fitted:.6f}, spread {spread:.2e}, max |E| {np.abs(residual).max():.3e}")
    return {
        "N": float(N),
        "sigma": sigma,
        "fitted": fitted,
        "spread": spread,
        "residual": residual,
        "max_residual": float(np.abs(residual).max()),
    }


def sample_velocities(history: FlowHistory, count: int, scale: float = 1.0) -> np.ndarray:
    """Tangential velocities spread around zero, in units of the initial curvature scale."""
    kappa0 = float(np.abs(SupportCurve(history.samples[0]).curvature).max())
    return scale * kappa0 * np.linspace(-1.0, 1.0, count)
