"""Numerical failure modes"""

from typing import Optional

from .base import HarnackLabError


class NonFiniteEvaluationError(HarnackLabError):
    """A finite-difference stencil produced inf or nan"""


class NonConvexCurveError(HarnackLabError):
    """Radius of curvature h'' + h is not positive somewhere"""

    def __init__(self, angle: float, margin: float, message: Optional[str] = None):
        super().__init__(
            message or f"curve is not strictly convex: h''+h = {margin:.6g} at theta = {angle:.6g}",
            {"angle": angle, "margin": margin},
        )
        self.angle = angle
        self.margin = margin


class FlowHorizonError(HarnackLabError):
    """Requested time lies beyond what the flow (or a stored history) covers"""


class ConvexityLossError(HarnackLabError):
    """run_flow aborted; `history` holds every snapshot up to `last_good_time`"""

    def __init__(self, last_good_time: float, history=None, cause: Optional[Exception] = None):
        super().__init__(
            f"convexity lost after t = {last_good_time:.6g}",
            {"last_good_time": last_good_time, "cause": str(cause) if cause else None},
        )
        self.last_good_time = last_good_time
        self.history = history


class NumericalInstabilityError(HarnackLabError):
    """Explicit grid flow blew up"""

    def __init__(self, step: int, message: str):
        super().__init__(message, {"step": step})
        self.step = step


class BracketError(HarnackLabError):
    """Shooting bracket does not contain a root"""

    def __init__(self, lo: float, hi: float, message: str):
        super().__init__(message, {"lo": lo, "hi": hi})
        self.lo = lo
        self.hi = hi


class DegenerateGeometryError(HarnackLabError):
    """First fundamental form is (numerically) singular"""
