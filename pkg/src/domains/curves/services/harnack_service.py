"""
Curvature data along a flow history and the Harnack quantity

    Z(V, V) = dH/dt + 2 <grad H, V> + h(V, V) + H / 2t,  V = v tau,

with dH/dt taken in the pure-normal gauge.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Tuple

import numpy as np

from src.core import spectral
from src.core.exceptions import FlowHorizonError, InvalidDomainError
from src.core.models.curve import FlowHistory, HarnackSample

logger = logging.getLogger(__name__)


def _one_minus_k2(k: np.ndarray) -> np.ndarray:
    return 1.0 - k**2


def _radius_derivatives(h: np.ndarray, theta, orders=(0, 1, 2)):
    """r = h'' + h and its theta-derivatives at arbitrary angles."""
    return [spectral.evaluate_coefficients(spectral.coefficients(h, k, _one_minus_k2), theta) for k in orders]


def _curvature_from_radius(r, r1, r2):
    kappa = 1.0 / r
    kappa_theta = -r1 / r**2
    kappa_thetatheta = -r2 / r**2 + 2.0 * r1**2 / r**3
    return kappa, kappa_theta, kappa_thetatheta


def _time_step(history: FlowHistory, t: float) -> float:
    spacing = float(np.median(np.diff(history.times))) if len(history) > 1 else history.dt
    history.require_interior(t, margin=0.0)
    # Stencil t +- 2 delta must stay inside the stored range
    room = min(t - history.t_min, history.t_max - t) / 2.0
    if room <= 0:
        raise FlowHorizonError(f"t = {t} is on the history boundary")
    return min(spacing, room)


def curvature_at(history: FlowHistory, theta, t: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(kappa, kappa_theta, kappa_thetatheta) at angles theta on M_t."""
    h = history.support_at(t)
    return _curvature_from_radius(*_radius_derivatives(h, theta))


def geometry_at(history: FlowHistory, theta, t: float):
    """(kappa, kappa_s, kappa_ss, dH_dt) with dH_dt = kappa_ss + kappa^3; vectorized over theta."""
    _time_step(history, t)
    kappa, kappa_theta, kappa_thetatheta = curvature_at(history, theta, t)
    kappa_s = kappa * kappa_theta
    kappa_ss = kappa * kappa_theta**2 + kappa**2 * kappa_thetatheta
    return kappa, kappa_s, kappa_ss, kappa_ss + kappa**3


@dataclass
class EvolutionCheck:
    """Normal-gauge dH/dt against fixed-theta time differencing plus the drift term"""

    normal_gauge: np.ndarray
    fixed_theta: np.ndarray
    truncation: np.ndarray

    @property
    def discrepancy(self) -> np.ndarray:
        return np.abs(self.normal_gauge - self.fixed_theta)

    def to_dict(self) -> Dict:
        return {k: np.asarray(v).tolist() for k, v in asdict(self).items()}


def evolution_identity_check(history: FlowHistory, theta, t: float) -> EvolutionCheck:
    """
    Second estimator of dH/dt: Richardson-extrapolated central differences of kappa
    in t at fixed theta, plus the tangential correction kappa * kappa_theta^2.

    The truncation estimate adds the Richardson difference to the first-order
    bias of the time stepper (Euler term, and the stabilization term of the
    semi-implicit scheme).
    """
    delta = _time_step(history, t)
    kappa_of = lambda time: curvature_at(history, theta, time)[0]  # noqa: E731

    k_plus, k_minus = kappa_of(t + delta), kappa_of(t - delta)
    k_plus2, k_minus2 = kappa_of(t + 2 * delta), kappa_of(t - 2 * delta)
    kappa, kappa_theta, _ = curvature_at(history, theta, t)

    d_h = (k_plus - k_minus) / (2.0 * delta)
    d_2h = (k_plus2 - k_minus2) / (4.0 * delta)
    fixed = (4.0 * d_h - d_2h) / 3.0 + kappa * kappa_theta**2
    richardson = np.abs(d_h - d_2h) / 3.0

    kappa_tt = (k_plus - 2.0 * kappa + k_minus) / delta**2
    bias = 0.5 * history.dt * np.abs(kappa_tt)
    if history.metadata.get("scheme", "semi_implicit") == "semi_implicit":
        h = history.support_at(t)
        r_t = spectral.derivative(history.support_at(t, 1), 2) + history.support_at(t, 1)
        l_r_t = spectral.evaluate(spectral.derivative(r_t, 2) + r_t, theta)
        c_bar = float(np.max(1.0 / (spectral.derivative(h, 2) + h) ** 2))
        bias = bias + history.dt * c_bar * kappa**2 * np.abs(l_r_t)

    normal = geometry_at(history, theta, t)[3]
    return EvolutionCheck(normal_gauge=normal, fixed_theta=fixed, truncation=richardson + bias)


def harnack_Z(history: FlowHistory, theta: float, t: float, v: float) -> HarnackSample:
    if not t > 0:
        raise InvalidDomainError(f"t must be positive, got {t}")
    kappa, kappa_s, _, dH_dt = (float(x) for x in geometry_at(history, theta, t))
    time_term = kappa / (2.0 * t)
    return HarnackSample(
        theta=float(theta),
        t=float(t),
        v=float(v),
        Z=dH_dt + 2.0 * v * kappa_s + kappa * v**2 + time_term,
        Z_min=dH_dt - kappa_s**2 / kappa + time_term,
        v_star=-kappa_s / kappa,
        dH_dt=dH_dt,
        grad_H=kappa_s,
        sff_term=kappa,
        time_term=time_term,
    )


def harnack_lattice(history: FlowHistory, thetas, times) -> np.ndarray:
    """Z_min on a (time, angle) lattice, shape (len(times), len(thetas))."""
    thetas = np.asarray(thetas, dtype=float)
    rows = []
    for t in times:
        if not t > 0:
            raise InvalidDomainError(f"lattice times must be positive, got {t}")
        kappa, kappa_s, _, dH_dt = geometry_at(history, thetas, t)
        rows.append(dH_dt - kappa_s**2 / kappa + kappa / (2.0 * t))
    return np.array(rows)


def default_lattice(history: FlowHistory, n_theta: int, n_time: int, lo: float = 0.05, hi: float = 0.45):
    """Angles on [0, 2pi) and times on [lo, hi] x T_max (T_max estimated from the initial area)."""
    horizon = history.metadata.get("horizon", history.t_max)
    times = np.linspace(lo * horizon, hi * horizon, n_time)
    times = times[(times > history.t_min) & (times < history.t_max)]
    return spectral.angles(n_theta), times
