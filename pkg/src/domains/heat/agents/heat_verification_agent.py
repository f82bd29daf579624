"""Verification suite for the heat-equation Harnack inequalities"""

import logging
import time
from typing import List

import numpy as np
import pandas as pd

from src.core.interfaces.agent_interface import VerificationAgent
from src.core.models.heat import FundamentalSolution, PointSourceSolution
from src.core.models.reports import CheckResult, SuiteResult
from src.domains.heat.services import heat_harnack_service as heat

logger = logging.getLogger(__name__)

X_RANGE = 5.0
T_RANGE = (0.1, 2.0)
PLANAR_COMPANION = [((-1.0, 0.0), 1.0), ((1.0, 1.0), 2.0), ((0.0, -1.5), 0.5)]


class HeatVerificationAgent(VerificationAgent):
    """Checks the matrix, trace, classical and log-convexity inequalities on closed-form solutions"""

    suite = "heat"

    def run(self, config) -> SuiteResult:
        logger.info("🚀 Heat suite: closed-form solutions")
        start = time.time()
        rng = np.random.default_rng(config.seed)
        checks: List[CheckResult] = []

        dim = len(config.sources[0]) - 1
        configured = PointSourceSolution.from_pairs(
            [(source[:-1], source[-1]) for source in config.sources],
            dim=dim,
            time_shift=config.time_shift,
        )
        planar = PointSourceSolution.from_pairs(PLANAR_COMPANION, dim=2, time_shift=0.05)

        table = self._timed(checks, lambda: self._equality_case(config, checks))
        self._timed(checks, lambda: self._positivity(config, configured, rng, checks, "configured"))
        if dim == 1:
            self._timed(checks, lambda: self._positivity(config, planar, rng, checks, "planar"))
        self._timed(checks, lambda: self._sharpness(config, rng, checks))
        self._timed(checks, lambda: self._path_integration(config, configured, rng, checks))

        return SuiteResult(
            suite=self.suite,
            checks=checks,
            elapsed=time.time() - start,
            artifacts={"tables": {"heat_equality_defects": table}},
        )

    def _equality_case(self, config, checks: List[CheckResult]) -> pd.DataFrame:
        """Equality Hess(log rho) + I/(2t) = 0 on a planar (x, t) grid."""
        rho = FundamentalSolution(dim=2)
        xs = np.linspace(-X_RANGE, X_RANGE, config.heat_grid_points)
        ts = np.linspace(*T_RANGE, config.heat_time_points)
        rows = []
        for t in ts:
            for x1 in xs:
                for x2 in xs:
                    defect, error = heat.matrix_harnack_defect_with_error(rho, (x1, x2), t, config.fd_step)
                    rows.append({"x1": x1, "x2": x2, "t": t, "matrix_defect": defect, "richardson": error})
        table = pd.DataFrame(rows)
        worst = table["matrix_defect"].abs().idxmax()
        checks.append(
            self._check(
                "fundamental_solution_equality",
                "matrix-harnack",
                -float(table["matrix_defect"].abs().max()),
                config.heat_defect_tolerance,
                details={
                    "samples": len(table),
                    "witness": table.loc[worst, ["x1", "x2", "t"]].tolist(),
                    "max_richardson": float(table["richardson"].max()),
                },
            )
        )

        li_yau, trace_harnack, _ = heat.trace_defects_with_error(FundamentalSolution(dim=1), 0.0, 1.0, config.fd_step)
        checks.append(
            self._check(
                "fundamental_solution_trace_equality",
                "li-yau-trace",
                -max(abs(li_yau), abs(trace_harnack)),
                config.heat_defect_tolerance,
                details={"li_yau": li_yau, "trace_harnack": trace_harnack},
            )
        )
        return table

    def _positivity(self, config, sol: PointSourceSolution, rng, checks: List[CheckResult], tag: str) -> None:
        n = config.heat_random_tuples
        xs = rng.uniform(-X_RANGE, X_RANGE, size=(n, sol.dim))
        ts = rng.uniform(*T_RANGE, size=n)

        matrix_defects = np.empty(n)
        li_yau = np.empty(n)
        trace_harnack = np.empty(n)
        trace_errors = np.empty(n)
        for k in range(n):
            matrix_defects[k] = heat.matrix_harnack_defect(sol, xs[k], ts[k], config.fd_step)
            li_yau[k], trace_harnack[k], trace_errors[k] = heat.trace_defects_with_error(
                sol, xs[k], ts[k], config.fd_step
            )

        worst = int(np.argmin(matrix_defects))
        checks.append(
            self._check(
                f"{tag}_matrix_harnack",
                "matrix-harnack",
                float(matrix_defects.min()),
                config.heat_defect_tolerance,
                details={"samples": n, "witness": {"x": xs[worst].tolist(), "t": float(ts[worst])}},
            )
        )
        disagreement = np.abs(li_yau - trace_harnack)
        consistent = bool(np.all(disagreement <= 10.0 * trace_errors + config.heat_defect_tolerance))
        checks.append(
            self._check(
                f"{tag}_trace_harnack",
                "li-yau-trace",
                float(min(li_yau.min(), trace_harnack.min())),
                config.heat_defect_tolerance,
                details={
                    "min_li_yau": float(li_yau.min()),
                    "min_trace_harnack": float(trace_harnack.min()),
                    "max_disagreement": float(disagreement.max()),
                    "estimators_consistent": consistent,
                },
                passed=consistent and min(li_yau.min(), trace_harnack.min()) >= -config.heat_defect_tolerance,
            )
        )

        x1 = rng.uniform(-X_RANGE, X_RANGE, size=(n, sol.dim))
        x2 = rng.uniform(-X_RANGE, X_RANGE, size=(n, sol.dim))
        t1 = rng.uniform(T_RANGE[0], 1.0, size=n)
        t2 = t1 + rng.uniform(0.05, 1.0, size=n)
        gaps = np.array([heat.classical_harnack_gap(sol, x1[k], t1[k], x2[k], t2[k]) for k in range(n)])
        checks.append(
            self._check(
                f"{tag}_classical_harnack",
                "classical-harnack",
                float(gaps.min()),
                config.heat_gap_tolerance,
                details={"samples": n},
            )
        )

        alphas = rng.uniform(0.0, 1.0, size=n)
        alphas = np.clip(alphas, 1e-6, 1.0 - 1e-6)
        segment_defects = np.array(
            [heat.log_ratio_convexity_defect(sol, ts[k], x1[k], x2[k], alphas[k]) for k in range(n)]
        )
        hessian_eigs = np.array(
            [heat.log_ratio_hessian_min_eig(sol, xs[k], ts[k], config.fd_step) for k in range(min(n, 200))]
        )
        checks.append(
            self._check(
                f"{tag}_log_ratio_convexity",
                "log-ratio-convexity",
                float(segment_defects.min()),
                config.heat_gap_tolerance,
                details={"samples": n, "min_hessian_eigenvalue": float(hessian_eigs.min())},
                passed=segment_defects.min() >= -config.heat_gap_tolerance
                and hessian_eigs.min() >= -config.heat_defect_tolerance,
            )
        )

    def _sharpness(self, config, rng, checks: List[CheckResult]) -> None:
        """Classical Harnack is attained by rho along x1 = x2 = 0."""
        rho = FundamentalSolution(dim=1)
        t1 = rng.uniform(*T_RANGE, size=20)
        t2 = t1 + rng.uniform(0.01, 1.0, size=20)
        gaps = np.array([heat.classical_harnack_gap(rho, 0.0, a, 0.0, b) for a, b in zip(t1, t2)])
        checks.append(
            self._check(
                "fundamental_solution_sharpness",
                "classical-harnack",
                -float(np.abs(gaps).max()),
                1e-12,
                details={"pairs": 20},
            )
        )

    def _path_integration(self, config, sol: PointSourceSolution, rng, checks: List[CheckResult]) -> None:
        """The derivative along straight space-time paths stays above -n/2t - |x'|^2/4."""
        n = min(config.heat_random_tuples, 200)
        margins = np.empty(n)
        for k in range(n):
            x1 = rng.uniform(-X_RANGE, X_RANGE, size=sol.dim)
            x2 = rng.uniform(-X_RANGE, X_RANGE, size=sol.dim)
            t1 = rng.uniform(T_RANGE[0], 1.0)
            t2 = t1 + rng.uniform(0.1, 1.0)
            s = t1 + rng.uniform(0.1, 0.9) * (t2 - t1)
            margins[k] = heat.straight_line_harnack_integrand(sol, x1, t1, x2, t2, s, config.fd_step)
        checks.append(
            self._check(
                "straight_path_integrand",
                "classical-harnack",
                float(margins.min()),
                config.heat_defect_tolerance,
                details={"samples": n},
            )
        )
