"""
Curve shortening flow of convex curves in support-function form.

In the support gauge the flow reads h_t = -kappa = -1 / (h_thetatheta + h).
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.core import spectral
from src.core.exceptions import (
    ConvexityLossError,
    FlowHorizonError,
    InvalidDomainError,
    NonConvexCurveError,
)
from src.core.models.curve import FlowHistory, SupportCurve
from src.infrastructure.config.settings import CURVE_SAMPLES, FLOW_DT, FLOW_HORIZON_FRACTION

logger = logging.getLogger(__name__)

SCHEMES = ("semi_implicit", "explicit")
EXPLICIT_CFL = 0.2


def make_curve(
    kind: str,
    M: int = CURVE_SAMPLES,
    radius: float = 1.0,
    a: float = 2.0,
    b: float = 1.0,
    samples: Optional[Sequence[float]] = None,
) -> SupportCurve:
    """circle(R), ellipse(a, b) or generic(h samples), validated for strict convexity."""
    thetas = spectral.angles(M)
    if kind == "circle":
        if not radius > 0:
            raise InvalidDomainError(f"circle radius must be positive, got {radius}")
        curve = SupportCurve(np.full(M, float(radius)), label=f"circle({radius:g})")
    elif kind == "ellipse":
        if not (a > 0 and b > 0):
            raise InvalidDomainError(f"ellipse semi-axes must be positive, got ({a}, {b})")
        h = np.sqrt(a**2 * np.cos(thetas) ** 2 + b**2 * np.sin(thetas) ** 2)
        curve = SupportCurve(h, label=f"ellipse({a:g},{b:g})")
    elif kind == "generic":
        if samples is None:
            raise InvalidDomainError("generic curve needs support samples")
        curve = SupportCurve(samples, label="generic")
    else:
        raise InvalidDomainError(f"unknown curve preset {kind!r}")

    curve.check_convex()
    return curve


def flow_horizon(curve: SupportCurve) -> float:
    """Extinction time A0 / 2pi (area drops at rate 2pi)."""
    return curve.area() / (2.0 * np.pi)


def explicit_stability_bound(curve: SupportCurve) -> float:
    dtheta = 2.0 * np.pi / curve.M
    return EXPLICIT_CFL * curve.min_radius**2 * dtheta**2


def step_flow(curve: SupportCurve, dt: float, scheme: str = "semi_implicit") -> SupportCurve:
    """Advance one time step; the result is re-validated for convexity."""
    if not dt > 0:
        raise InvalidDomainError(f"time step must be positive, got {dt}")
    if scheme not in SCHEMES:
        raise InvalidDomainError(f"unknown scheme {scheme!r}")

    h = curve.samples
    kappa = curve.curvature
    if scheme == "explicit":
        bound = explicit_stability_bound(curve)
        if dt > bound:
            raise InvalidDomainError(f"explicit step dt = {dt:.3g} exceeds stability bound {bound:.3g}")
        h_new = h - dt * kappa
    else:
        # Linear part kappa^2 (h'' + h) treated implicitly with the frozen coefficient max kappa^2
        c = float(np.max(kappa**2))
        symbol = 1.0 - np.arange(curve.M // 2 + 1, dtype=float) ** 2
        h_hat = np.fft.rfft(h)
        rhs = h_hat + dt * (np.fft.rfft(-kappa) - c * symbol * h_hat)
        h_new = np.fft.irfft(rhs / (1.0 - dt * c * symbol), n=curve.M)

    stepped = SupportCurve(h_new, label=curve.label)
    stepped.check_convex()
    return stepped


def run_flow(
    curve: SupportCurve,
    t_end: float,
    dt: float = FLOW_DT,
    scheme: str = "semi_implicit",
    snapshot_every: int = 1,
) -> FlowHistory:
    """Evolve to t_end, storing every `snapshot_every`-th step and the final curve."""
    horizon = flow_horizon(curve)
    if t_end < 0:
        raise InvalidDomainError(f"t_end must be nonnegative, got {t_end}")
    if t_end > FLOW_HORIZON_FRACTION * horizon:
        raise FlowHorizonError(
            f"t_end = {t_end:.6g} is beyond {FLOW_HORIZON_FRACTION} x the extinction bound {horizon:.6g}",
            {"t_end": t_end, "horizon": horizon},
        )
    if snapshot_every < 1:
        raise InvalidDomainError("snapshot_every must be >= 1")

    steps = math.ceil(t_end / dt - 1e-9) if t_end > 0 else 0
    step_dt = t_end / steps if steps else dt
    metadata = {"label": curve.label, "scheme": scheme, "M": curve.M, "horizon": horizon}

    times = [0.0]
    samples = [curve.samples]
    current = curve
    logger.debug(f"Running {scheme} flow of {curve.label}: {steps} steps of {step_dt:.3g}")
    for k in range(1, steps + 1):
        try:
            current = step_flow(current, step_dt, scheme)
        except NonConvexCurveError as e:
            partial = FlowHistory(np.array(times), np.array(samples), step_dt, metadata)
            logger.warning(f"Convexity lost at step {k}: {e.message}")
            raise ConvexityLossError(last_good_time=times[-1], history=partial, cause=e)
        if k % snapshot_every == 0 or k == steps:
            times.append(k * step_dt)
            samples.append(current.samples)

    history = FlowHistory(np.array(times), np.array(samples), step_dt, metadata)
    logger.debug(f"Flow finished at t = {history.t_max:.4f} with {len(history)} snapshots")
    return history


def curve_from_config(config) -> SupportCurve:
    """Curve preset named by an ExperimentConfig."""
    a, b = config.semi_axes
    return make_curve(
        config.curve,
        M=config.curve_samples,
        radius=config.radius,
        a=a,
        b=b,
        samples=config.support_samples,
    )


def flow_to_horizon(curve: SupportCurve, config) -> FlowHistory:
    """Flow up to config.t_end, or to the largest admissible fraction of the extinction bound."""
    t_end = config.t_end if config.t_end is not None else FLOW_HORIZON_FRACTION * flow_horizon(curve)
    return run_flow(curve, t_end, config.dt, config.scheme, config.snapshot_every)
