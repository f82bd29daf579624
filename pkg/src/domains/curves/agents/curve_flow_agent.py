"""Verification suite for the curve shortening flow and its Harnack inequalities"""

import logging
import time
from typing import List

import numpy as np
import pandas as pd

from src.core.interfaces.agent_interface import VerificationAgent
from src.core.models.reports import CheckResult, SuiteResult
from src.domains.curves.services import curve_flow_service as flow
from src.domains.curves.services import harnack_service as harnack
from src.domains.curves.services import path_energy_service as paths

logger = logging.getLogger(__name__)


class CurveFlowAgent(VerificationAgent):
    """Exact-solution tracking on circles, Harnack positivity on ellipses"""

    suite = "csf"

    def run(self, config) -> SuiteResult:
        logger.info("🚀 Curve shortening flow suite")
        start = time.time()
        rng = np.random.default_rng(config.seed)
        checks: List[CheckResult] = []
        tables = {}

        R = config.radius
        circle = flow.make_curve("circle", M=config.curve_samples, radius=R)
        circle_flow = flow.run_flow(circle, 0.4 * R**2, config.dt, config.scheme, config.snapshot_every)
        a, b = config.semi_axes
        ellipse = flow.make_curve("ellipse", M=config.curve_samples, a=a, b=b)
        ellipse_flow = flow.flow_to_horizon(ellipse, config)
        logger.info(f"✅ Flows ready: {len(circle_flow)} + {len(ellipse_flow)} snapshots")

        tables["circle_radius"] = self._timed(checks, lambda: self._circle_tracking(circle_flow, R, checks))
        tables["ellipse_area"] = self._timed(checks, lambda: self._area_and_convexity(ellipse_flow, checks))
        self._timed(checks, lambda: self._evolution_identity(config, ellipse_flow, rng, checks))
        tables["z_lattice"] = self._timed(checks, lambda: self._harnack_lattice(config, ellipse_flow, checks))
        self._timed(checks, lambda: self._circle_harnack(circle_flow, R, checks))
        self._timed(checks, lambda: self._circle_path_energy(config, circle_flow, R, checks))
        tables["integrated_harnack"] = self._timed(
            checks, lambda: self._integrated_harnack(config, ellipse_flow, rng, checks)
        )

        return SuiteResult(
            suite=self.suite,
            checks=checks,
            elapsed=time.time() - start,
            artifacts={"tables": tables, "histories": {"circle": circle_flow, "ellipse": ellipse_flow}},
        )

    def _circle_tracking(self, history, R: float, checks: List[CheckResult]) -> pd.DataFrame:
        exact = np.sqrt(R**2 - 2.0 * history.times)
        numeric = history.samples.mean(axis=1)
        error = np.abs(history.samples - exact[:, None]).max(axis=1)
        checks.append(
            self._check(
                "shrinking_circle",
                "circle-shrinking",
                -float(error.max()),
                1e-4,
                details={"t_end": history.t_max, "snapshots": len(history)},
            )
        )
        return pd.DataFrame({"t": history.times, "R_numeric": numeric, "R_exact": exact, "error": error})

    def _area_and_convexity(self, history, checks: List[CheckResult]) -> pd.DataFrame:
        curves = history.curves
        areas = np.array([c.area() for c in curves])
        predicted = areas[0] - 2.0 * np.pi * history.times
        slope = float(np.polyfit(history.times, areas, 1)[0])
        checks.append(
            self._check(
                "area_decay",
                "area-decay",
                -float(np.abs(areas - predicted).max()),
                1e-3,
                details={"fitted_rate": -slope, "expected_rate": 2.0 * np.pi},
            )
        )

        min_radii = np.array([c.min_radius for c in curves])
        checks.append(
            self._check(
                "convexity_preserved",
                "convexity-chain",
                float(min_radii.min()),
                0.0,
                passed=bool(min_radii.min() > 0),
                details={"snapshots": len(curves)},
            )
        )

        ratios = np.array([c.isoperimetric_ratio() for c in curves])
        increments = np.diff(ratios)
        checks.append(
            self._check(
                "isoperimetric_rounding",
                "curve-rounding",
                -float(max(increments.max(), 0.0)) if increments.size else 0.0,
                1e-9,
                details={"initial_ratio": float(ratios[0]), "final_ratio": float(ratios[-1])},
            )
        )
        return pd.DataFrame(
            {"t": history.times, "area": areas, "predicted_area": predicted, "min_radius": min_radii, "ratio": ratios}
        )

    def _evolution_identity(self, config, history, rng, checks: List[CheckResult]) -> None:
        horizon = history.metadata["horizon"]
        samples = 200
        times = rng.uniform(0.05 * horizon, min(0.85 * horizon, 0.95 * history.t_max), size=samples)
        thetas = rng.uniform(0.0, 2.0 * np.pi, size=samples)
        slack = []
        for theta, t in zip(thetas, times):
            result = harnack.evolution_identity_check(history, theta, t)
            allowed = 10.0 * float(result.truncation) + 1e-9 * max(1.0, abs(float(result.normal_gauge)))
            slack.append(allowed - float(result.discrepancy))
        slack = np.array(slack)
        checks.append(
            self._check(
                "evolution_identity",
                "mcf-harnack",
                float(slack.min()),
                0.0,
                details={"samples": samples, "worst_time": float(times[int(np.argmin(slack))])},
            )
        )

    def _harnack_lattice(self, config, history, checks: List[CheckResult]) -> pd.DataFrame:
        n_theta, n_time = config.harnack_lattice
        thetas, times = harnack.default_lattice(history, n_theta, n_time)
        z_min = harnack.harnack_lattice(history, thetas, times)
        budget = max(
            float(np.max(10.0 * harnack.evolution_identity_check(history, thetas, t).truncation)) for t in times
        )
        worst = np.unravel_index(int(np.argmin(z_min)), z_min.shape)
        checks.append(
            self._check(
                "harnack_lattice",
                "mcf-harnack",
                float(z_min.min()),
                budget,
                details={
                    "lattice": [len(thetas), len(times)],
                    "witness": {"theta": float(thetas[worst[1]]), "t": float(times[worst[0]])},
                },
            )
        )
        tt, th = np.meshgrid(times, thetas, indexing="ij")
        return pd.DataFrame({"t": tt.ravel(), "theta": th.ravel(), "Z_min": z_min.ravel()})

    def _circle_harnack(self, history, R: float, checks: List[CheckResult]) -> None:
        t = 0.25 * R**2
        sample = harnack.harnack_Z(history, 0.0, t, 0.0)
        kappa = 1.0 / np.sqrt(R**2 - 2.0 * t)
        closed = kappa**3 + kappa / (2.0 * t)
        checks.append(
            self._check(
                "circle_harnack_closed_form",
                "mcf-harnack",
                -abs(sample.Z_min - closed),
                1e-4,
                details={"Z_min": sample.Z_min, "closed_form": closed, "t": t},
            )
        )

    def _circle_path_energy(self, config, history, R: float, checks: List[CheckResult]) -> None:
        t1, t2 = 0.1 * R**2, 0.3 * R**2
        dtheta = np.pi / 2.0
        closed = dtheta**2 / (0.5 * np.log((R**2 - 2.0 * t1) / (R**2 - 2.0 * t2)))
        slices, nodes = config.path_lattice
        delta, _ = paths.path_energy(history, 0.0, t1, dtheta, t2, slices, nodes)
        relative = abs(delta - closed) / closed
        checks.append(
            self._check(
                "circle_path_energy",
                "integrated-mcf-harnack",
                -relative,
                0.01,
                details={"Delta": delta, "closed_form": closed},
            )
        )

        levels = [(max(1, slices // 4), max(4, nodes // 4)), (max(1, slices // 2), max(4, nodes // 2)), (slices, nodes)]
        energies = [paths.path_energy(history, 0.0, t1, dtheta, t2, s, n)[0] for s, n in levels]
        increase = max(b - a for a, b in zip(energies, energies[1:]))
        checks.append(
            self._check(
                "path_energy_refinement",
                "integrated-mcf-harnack",
                -max(increase, 0.0),
                1e-8,
                details={"lattices": [list(level) for level in levels], "energies": energies},
            )
        )

    def _integrated_harnack(self, config, history, rng, checks: List[CheckResult]) -> pd.DataFrame:
        horizon = history.metadata["horizon"]
        slices, nodes = config.path_lattice
        rows = []
        for _ in range(config.path_random_tuples):
            t1 = rng.uniform(0.05, 0.4) * horizon
            t2 = min(t1 + rng.uniform(0.05, 0.4) * horizon, history.t_max)
            theta1, theta2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
            delta, _ = paths.path_energy(history, theta1, t1, theta2, t2, slices, nodes)
            coarse, _ = paths.path_energy(history, theta1, t1, theta2, t2, max(1, slices // 2), max(4, nodes // 2))
            gap = paths.integrated_gap_from_energy(history, theta1, t1, theta2, t2, delta)
            lead = float(harnack.curvature_at(history, theta1, t1)[0]) * np.sqrt(t1 / t2) * np.exp(-delta / 4.0)
            budget = lead * abs(coarse - delta) / 4.0 + 1e-9
            rows.append(
                {"theta1": theta1, "t1": t1, "theta2": theta2, "t2": t2, "Delta": delta, "gap": gap, "budget": budget}
            )
        table = pd.DataFrame(rows)
        slack = table["gap"] + table["budget"]
        checks.append(
            self._check(
                "integrated_harnack",
                "integrated-mcf-harnack",
                float(table["gap"].min()),
                float(table["budget"].max()),
                passed=bool((slack >= 0).all()),
                details={"tuples": len(table)},
            )
        )
        return table
