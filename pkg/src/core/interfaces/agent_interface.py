"""Contract shared by the verification agents"""

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional

from src.core.models.reports import CheckResult, SuiteResult

logger = logging.getLogger(__name__)


class VerificationAgent(ABC):
    """Runs one suite of checks and reports every verdict as a CheckResult"""

    suite: str = ""

    @abstractmethod
    def run(self, config) -> SuiteResult:
        """Execute the suite for an ExperimentConfig."""

    def _check(
        self,
        name: str,
        anchor: str,
        margin: float,
        tolerance: float,
        details: Optional[Dict[str, Any]] = None,
        passed: Optional[bool] = None,
        elapsed: Optional[float] = None,
    ) -> CheckResult:
        """Build a CheckResult; default verdict is margin >= -tolerance."""
        verdict = bool(margin >= -tolerance) if passed is None else bool(passed)
        marker = "✅" if verdict else "❌"
        logger.info(f"{marker} {self.suite}/{name}: margin {margin:.3e} (tolerance {tolerance:.1e})")
        return CheckResult(
            name=name,
            anchor=anchor,
            margin=float(margin),
            tolerance=float(tolerance),
            passed=verdict,
            details=details or {},
            elapsed=elapsed,
        )

    def _timed(self, checks: List[CheckResult], step: Callable[[], Any]) -> Any:
        """Run `step`, attach its wall time to the checks it appended."""
        before = len(checks)
        start = time.time()
        result = step()
        duration = time.time() - start
        for check in checks[before:]:
            check.elapsed = duration
        return result
