"""Base exception for the Harnack Lab"""

from typing import Any, Dict, Optional


class HarnackLabError(Exception):
    """Base class for every error raised by the lab"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "details": self.details}


class ConfigValidationError(HarnackLabError):
    """Experiment configuration is malformed; `field` names the offending key"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}", {"field": field})
        self.field = field


class InvalidDomainError(HarnackLabError):
    """An operation was called outside its admissible domain (t <= 0, t1 >= t2, ...)"""
