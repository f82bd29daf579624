"""
Verification Orchestrator for the Harnack Lab
Runs the selected suites, collects their verdicts and writes the report files
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List

import pandas as pd

from src.core.exceptions import HarnackLabError
from src.core.models.curve import FlowHistory
from src.core.models.reports import SuiteResult, to_plain
from src.domains.convexity.agents.convexity_chain_agent import ConvexityChainAgent
from src.domains.curves.agents.curve_flow_agent import CurveFlowAgent
from src.domains.expanders.agents.expander_agent import ExpanderAgent
from src.domains.heat.agents.heat_verification_agent import HeatVerificationAgent
from src.infrastructure.config import settings
from src.infrastructure.persistence.file_storage import ReportStorage

logger = logging.getLogger(__name__)

AGENTS = {
    "heat": HeatVerificationAgent,
    "csf": CurveFlowAgent,
    "expander": ExpanderAgent,
    "chain": ConvexityChainAgent,
}


class VerificationOrchestrator:
    """Runs verification suites and assembles the report in a fixed order"""

    def __init__(self, config):
        self.config = config
        self.agents = {name: AGENTS[name]() for name in config.suites}

    def run_suite(self, name: str) -> SuiteResult:
        """One suite; any exception becomes a suite-level error instead of aborting the run."""
        logger.info(f"🚀 Suite {name} starting")
        start = time.time()
        try:
            result = self.agents[name].run(self.config)
        except HarnackLabError as e:
            logger.error(f"❌ Suite {name} failed: {e.message}")
            return SuiteResult(suite=name, elapsed=time.time() - start, error=e.to_dict())
        except Exception as e:
            logger.error(f"❌ Suite {name} crashed: {e}")
            return SuiteResult(
                suite=name, elapsed=time.time() - start, error={"error": type(e).__name__, "message": str(e)}
            )
        status = "✅" if result.passed else "❌"
        logger.info(f"{status} Suite {name}: {len(result.checks)} checks in {result.elapsed:.1f}s")
        return result

    def run(self) -> Dict[str, Any]:
        """Run every selected suite, write report.json and plot data, return the report."""
        run_start = time.time()
        names = list(self.agents)
        if self.config.parallel and len(names) > 1:
            with ThreadPoolExecutor(max_workers=len(names)) as pool:
                results = list(pool.map(self.run_suite, names))
        else:
            results = [self.run_suite(name) for name in names]

        storage = ReportStorage(self.config.output_dir)
        for result in results:
            self._write_artifacts(storage, result)

        stable = self.config.stable_output
        report = {
            "system": settings.SYSTEM_NAME,
            "version": settings.SYSTEM_VERSION,
            "experiment": self.config.experiment,
            "seed": self.config.seed,
            "config": to_plain(self.config.to_dict()),
            "passed": all(result.passed for result in results),
            "failed_checks": [f"{r.suite}/{name}" for r in results for name in r.failed_checks]
            + [f"{r.suite}/<error>" for r in results if r.error],
            "suites": [result.to_dict(stable) for result in results],
            "chains": {
                label: chain
                for result in results
                for label, chain in result.artifacts.get("chains", {}).items()
            },
            "files": sorted(storage.written),
        }
        if not stable:
            report["elapsed"] = time.time() - run_start
        storage.write_report(report)
        self._print_run_summary(report, results)
        return report

    def _write_artifacts(self, storage: ReportStorage, result: SuiteResult) -> None:
        artifacts = result.artifacts
        for name, table in artifacts.get("tables", {}).items():
            storage.write_table(f"{result.suite}_{name}", table)
        for label, history in artifacts.get("histories", {}).items():
            storage.write_table(f"{result.suite}_history_{_slug(label)}", _history_table(history))
        if self.config.write_gridfields:
            for name, field in artifacts.get("gridfields", {}).items():
                storage.write_gridfield(f"{result.suite}_{name}", field)

    def _print_run_summary(self, report: Dict[str, Any], results: List[SuiteResult]) -> None:
        print("\n" + "=" * 80)
        print(f"🧪 {settings.SYSTEM_NAME.upper()} - VERIFICATION {'PASSED' if report['passed'] else 'FAILED'}")
        print("=" * 80)
        for result in results:
            marker = "✅" if result.passed else "❌"
            print(f"  {marker} {result.suite}: {len(result.checks)} checks, {len(result.failed_checks)} failed")
            if result.error:
                print(f"     ❌ error: {result.error.get('message')}")
            for name in result.failed_checks:
                print(f"     ❌ {name}")
        print(f"\n📁 Output: {self.config.output_dir} ({len(report['files'])} data files + report.json)")
        print("=" * 80)


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in label).strip("_")


def _history_table(history: FlowHistory) -> pd.DataFrame:
    """One row per snapshot: time, area, length and the support extremes."""
    curves = history.curves
    return pd.DataFrame(
        {
            "t": history.times,
            "area": [c.area() for c in curves],
            "length": [c.length() for c in curves],
            "h_min": history.samples.min(axis=1),
            "h_max": history.samples.max(axis=1),
            "min_radius": [c.min_radius for c in curves],
        }
    )
