"""Verification suite for cones, self-expanders, the squashed limit and Gamma_N"""

import logging
import time
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from src.core.interfaces.agent_interface import VerificationAgent
from src.core.models.reports import CheckResult, SuiteResult
from src.domains.curves.services import curve_flow_service as flow
from src.domains.expanders.services import canonical_expander_service as canonical
from src.domains.expanders.services import expander_service as expanders
from src.domains.expanders.services import gauge_service as gauge
from src.domains.expanders.services import track_service as track

logger = logging.getLogger(__name__)

SIGMA_TARGET_N = 50.0
SIGMA_SPREAD = 0.03
SIGMA_LIMIT = 0.02
RESIDUAL_GROWTH = 2.0
TREND_NOISE = 1e-6


class ExpanderAgent(VerificationAgent):
    """Radial and grid expanders, Lipschitz and infimum bounds, the limit track and sigma_N"""

    suite = "expander"

    def run(self, config) -> SuiteResult:
        logger.info("🚀 Expander suite")
        start = time.time()
        checks: List[CheckResult] = []
        tables: Dict[str, pd.DataFrame] = {}
        fields = {}

        L, n = config.half_width, config.resolution
        unit = flow.make_curve("circle", M=config.curve_samples, radius=1.0)
        a, b = config.semi_axes
        ellipse = flow.make_curve("ellipse", M=config.curve_samples, a=a, b=b)
        curve = flow.curve_from_config(config)

        profile = self._timed(checks, lambda: self._radial_profile(checks))
        fields.update(self._timed(checks, lambda: self._grid_vs_radial(unit, profile, L, n, checks)))
        self._timed(checks, lambda: self._cone(unit, ellipse, L, n, checks))
        tables["expander_bounds"] = self._timed(
            checks, lambda: self._bounds(config, {"circle": unit, "ellipse": ellipse}, L, n, checks)
        )
        self._timed(checks, lambda: self._self_similarity(unit, L, n, checks))

        history = flow.flow_to_horizon(curve, config)
        logger.info(f"✅ Flow of {curve.label} ready: {len(history)} snapshots")
        limit = self._timed(checks, lambda: self._limit(config, curve, history, L, n, checks))
        tables["limit_distances"] = pd.DataFrame(limit["rows"])
        tables["track_level_sets"] = self._level_set_polylines(history, limit["alphas"])
        fields["track"] = limit["track"]
        fields[f"squashed_N{max(limit['squashed']):g}"] = limit["squashed"][max(limit["squashed"])]
        tables["sigma"] = self._timed(checks, lambda: self._canonical(config, history, checks))

        return SuiteResult(
            suite=self.suite,
            checks=checks,
            elapsed=time.time() - start,
            artifacts={"tables": tables, "gridfields": fields, "histories": {curve.label: history}},
        )

    def _radial_profile(self, checks: List[CheckResult]):
        profile = expanders.radial_expander(1.0)
        details = profile.summary()
        checks.append(
            self._check(
                "radial_expander_residual",
                "expander-equation",
                -details["max_residual"],
                1e-6,
                details=details,
            )
        )
        checks.append(
            self._check(
                "radial_expander_shape",
                "expander-equation",
                min(profile.convexity_margin(), profile.apex_height),
                0.0,
                passed=bool(
                    profile.apex_height > 0 and profile.convexity_margin() >= 0 and details["slope_error"] <= 1e-8
                ),
                details={"apex_height": profile.apex_height, "slope_error": details["slope_error"]},
            )
        )
        return profile

    def _grid_vs_radial(self, unit, profile, L: Optional[float], n: int, checks: List[CheckResult]):
        L = gauge.box_half_width(unit, L)
        expander = expanders.compute_expander(unit, 1.0, L, n)
        distance = expanders.radial_agreement(expander, profile, 0.5 * L)
        checks.append(
            self._check(
                "grid_matches_radial",
                "expander-equation",
                -distance,
                2.0 * expander.tolerance,
                details={
                    "sup_distance": distance,
                    "grid_apex": float(expander.values[expander.center_index, expander.center_index]),
                    "radial_apex": profile.apex_height,
                },
            )
        )
        return {"expander_circle_N1": expander}

    def _cone(self, unit, ellipse, L: Optional[float], n: int, checks: List[CheckResult]) -> None:
        for label, curve in (("circle", unit), ("ellipse", ellipse)):
            cone = gauge.build_cone(curve, 1.0, L, n)
            measured = cone.lipschitz()
            bound = cone.flagged["lipschitz_bound"]
            checks.append(
                self._check(
                    f"cone_lipschitz_{label}",
                    "expander-lipschitz",
                    bound - measured,
                    1e-9 * bound,
                    details={"measured": measured, "bound": bound},
                )
            )
            straight = gauge.cone_straightness(cone)
            checks.append(
                self._check(
                    f"cone_straight_{label}",
                    "expander-lipschitz",
                    -straight,
                    cone.tolerance,
                    details={"max_support_defect": straight},
                )
            )

    def _bounds(self, config, curves, L: Optional[float], n: int, checks: List[CheckResult]) -> pd.DataFrame:
        rows = []
        for label, curve in curves.items():
            for N in config.bound_N:
                expander = expanders.compute_expander(curve, N, L, n)
                squashed = expanders.squash(expander, N)
                rows.append(
                    {
                        "curve": label,
                        "N": N,
                        **expanders.expander_summary(expander),
                        "squashed_lipschitz": squashed.lipschitz(),
                        "tolerance": expander.tolerance,
                    }
                )
        table = pd.DataFrame(rows)
        lipschitz_slack = table["cone_lipschitz"] + 2.0 * table["tolerance"] - table["lipschitz"]
        checks.append(
            self._check(
                "expander_lipschitz",
                "expander-lipschitz",
                float(lipschitz_slack.min()),
                0.0,
                details={"cases": len(table)},
            )
        )
        infimum_slack = table["infimum_bound"] - table["min_height"]
        checks.append(
            self._check(
                "expander_infimum",
                "expander-lipschitz",
                float(infimum_slack.min()),
                0.0,
                details={"largest_ratio": float((table["min_height"] / table["infimum_bound"]).max())},
            )
        )
        scaling = (table["squashed_lipschitz"] - table["lipschitz"] / table["N"]).abs()
        checks.append(
            self._check(
                "squash_scaling",
                "level-set-limit",
                -float(scaling.max()),
                1e-12 * float(table["lipschitz"].max()),
                details={"squashed_lipschitz": table["squashed_lipschitz"].tolist()},
            )
        )
        return table

    def _self_similarity(self, unit, L: Optional[float], n: int, checks: List[CheckResult]) -> None:
        L = gauge.box_half_width(unit, L)
        cone = gauge.build_cone(unit, 1.0, L, n)
        early, late = expanders.graphical_flow_snapshots(cone, 1.0, [0.5, 1.0])
        defect = expanders.self_similarity_defect(early, late, 0.4 * L)
        checks.append(
            self._check(
                "self_similarity",
                "expander-lipschitz",
                -defect,
                cone.tolerance,
                details={"defect": defect, "times": [0.5, 1.0]},
            )
        )

    def _limit(self, config, curve, history, L: Optional[float], n: int, checks: List[CheckResult]):
        result = track.limit_comparison(curve, history, config.N_sequence, L, n)
        tol = result["tolerance"]
        distances = result["distances"]
        checks.append(
            self._check(
                "limit_trend",
                "level-set-limit",
                float(distances[0] - distances[-1]),
                0.0,
                passed=result["trend_ok"],
                details={"N": [row["N"] for row in result["rows"]], "distances": distances},
            )
        )
        checks.append(
            self._check(
                "limit_distance",
                "level-set-limit",
                5.0 * tol - result["final_distance"],
                0.0,
                details={"final_distance": result["final_distance"], "grid_tolerance": tol},
            )
        )
        checks.append(
            self._check(
                "track_level_sets",
                "level-set-limit",
                2.0 * tol - max(result["level_set_deviation"]),
                0.0,
                details={
                    "alphas": result["alphas"],
                    "deviation": result["level_set_deviation"],
                    "expander_deviation": result["expander_level_set_deviation"],
                },
            )
        )
        return result

    def _level_set_polylines(self, history, alphas) -> pd.DataFrame:
        """alpha * M_(alpha^-2) as closed polylines, one block per level."""
        frames = []
        for alpha in alphas:
            points = alpha * history.curve_at(track.level_time(alpha)).points()
            frames.append(pd.DataFrame({"alpha": alpha, "x": points[:, 0], "y": points[:, 1]}))
        return pd.concat(frames, ignore_index=True)

    def _canonical(self, config, history, checks: List[CheckResult]) -> pd.DataFrame:
        n_theta, n_time, n_v = config.sigma_lattice
        horizon = history.metadata["horizon"]
        thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
        times = np.linspace(0.1 * horizon, 0.8 * horizon, n_time)
        velocities = canonical.sample_velocities(history, n_v)

        results = {N: canonical.sigma_lattice(history, N, thetas, times, velocities) for N in sorted(config.sigma_N)}
        table = pd.DataFrame(
            [
                {
                    "N": N,
                    "sigma": r["fitted"],
                    "spread": r["spread"],
                    "max_residual": r["max_residual"],
                    "N_times_residual": N * r["max_residual"],
                }
                for N, r in results.items()
            ]
        )

        target = min(results, key=lambda N: abs(N - SIGMA_TARGET_N))
        checks.append(
            self._check(
                "sigma_proportionality",
                "canonical-expander-sff",
                SIGMA_SPREAD - results[target]["spread"],
                0.0,
                details={"N": target, "spread": results[target]["spread"], "sigma": results[target]["fitted"]},
            )
        )

        gaps = (table["sigma"] - 1.0).abs().to_numpy()
        increments = np.diff(gaps)
        largest = float(table["N"].max())
        final_gap = float(gaps[table["N"].to_numpy().argmax()])
        checks.append(
            self._check(
                "sigma_limit",
                "canonical-expander-sff",
                SIGMA_LIMIT - final_gap,
                0.0,
                passed=bool(final_gap <= SIGMA_LIMIT and np.all(increments <= TREND_NOISE)),
                details={"N": table["N"].tolist(), "sigma": table["sigma"].tolist(), "largest_N": largest},
            )
        )

        scaled = table["N_times_residual"].to_numpy()
        growth = float(scaled[-1] / scaled[0]) if scaled[0] > 0 else 0.0
        checks.append(
            self._check(
                "expander_residual",
                "canonical-expander-sff",
                RESIDUAL_GROWTH - growth,
                0.0,
                details={"N_times_max_residual": scaled.tolist()},
            )
        )
        return table
