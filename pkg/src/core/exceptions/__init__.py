"""Exception hierarchy"""
from .base import ConfigValidationError, HarnackLabError, InvalidDomainError
from .numerics import (
    BracketError,
    ConvexityLossError,
    DegenerateGeometryError,
    FlowHorizonError,
    NonConvexCurveError,
    NonFiniteEvaluationError,
    NumericalInstabilityError,
)
