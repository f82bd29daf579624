"""Verification results: convexity certificates, checks, suites and the convexity chain"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

CONVEXITY_KINDS = ("curve", "grid_field", "surface")


def to_plain(value):
    """Convert numpy scalars/arrays inside report payloads to JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


@dataclass
class ConvexityReport:
    """Smallest convexity margin found and where; `conditions` are side checks that must all hold"""

    kind: str
    min_margin: float
    witness: Any
    tolerance_budget: float
    strict: bool = False
    details: Dict[str, Any] = field(default_factory=dict)
    conditions: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not all(self.conditions.values()):
            return False
        if self.strict:
            return self.min_margin > 0
        return self.min_margin >= -self.tolerance_budget

    def to_dict(self) -> Dict[str, Any]:
        return to_plain({**asdict(self), "passed": self.passed})


@dataclass
class CheckResult:
    """One verified inequality or identity"""

    name: str
    anchor: str
    margin: float
    tolerance: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    elapsed: Optional[float] = None

    def to_dict(self, stable: bool = False) -> Dict[str, Any]:
        data = to_plain(asdict(self))
        if stable:
            data.pop("elapsed", None)
        return data


@dataclass
class SuiteResult:
    """All checks produced by one verification agent"""

    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: Optional[float] = None
    error: Optional[Dict[str, Any]] = None
    artifacts: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_dict(self, stable: bool = False) -> Dict[str, Any]:
        data = {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [check.to_dict(stable) for check in self.checks],
            "error": to_plain(self.error),
        }
        if not stable:
            data["elapsed"] = self.elapsed
        return data


@dataclass
class ChainLink:
    """One implication of the convexity chain"""

    index: int
    name: str
    anchor: str
    status: str  # "pass", "fail" or "skipped"
    margin: Optional[float] = None
    tolerance: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> Dict[str, Any]:
        return to_plain(asdict(self))


@dataclass
class ChainReport:
    curve: str
    N_sequence: List[float]
    links: List[ChainLink] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.links) and all(link.passed for link in self.links)

    @property
    def broken_at(self) -> Optional[int]:
        for link in self.links:
            if link.status == "fail":
                return link.index
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve,
            "N_sequence": to_plain(self.N_sequence),
            "passed": self.passed,
            "broken_at": self.broken_at,
            "links": [link.to_dict() for link in self.links],
        }
