"""Support-function curves, curve shortening flow, Hamilton's Z and path energies"""

import numpy as np
import pytest

from src.core.exceptions import FlowHorizonError, InvalidDomainError, NonConvexCurveError
from src.core.models.curve import SupportCurve
from src.domains.convexity.agents.convexity_chain_agent import nonconvex_control
from src.domains.convexity.services.convexity_service import curve_convexity
from src.domains.curves.services import curve_flow_service as flow
from src.domains.curves.services.harnack_service import (
    curvature_at,
    default_lattice,
    evolution_identity_check,
    harnack_lattice,
    harnack_Z,
)
from src.domains.curves.services.path_energy_service import (
    integrated_gap_from_energy,
    integrated_harnack_gap,
    path_energy,
)


class TestSupportCurve:
    def test_circle_area_and_length(self, unit_circle):
        assert unit_circle.area() == pytest.approx(np.pi, rel=1e-12)
        assert unit_circle.length() == pytest.approx(2.0 * np.pi, rel=1e-12)
        assert unit_circle.isoperimetric_ratio() == pytest.approx(1.0, rel=1e-12)

    def test_ellipse_area(self):
        ellipse = flow.make_curve("ellipse", M=128, a=2.0, b=1.0)
        assert ellipse.area() == pytest.approx(2.0 * np.pi, rel=1e-8)

    @pytest.mark.parametrize("size", [32, 100, 96])
    def test_samples_must_be_a_power_of_two(self, size):
        with pytest.raises(InvalidDomainError):
            SupportCurve(np.ones(size))

    def test_unknown_preset(self):
        with pytest.raises(InvalidDomainError):
            flow.make_curve("square")

    def test_generic_nonconvex_samples_are_rejected(self):
        with pytest.raises(NonConvexCurveError) as excinfo:
            flow.make_curve("generic", M=64, samples=nonconvex_control(64).samples)
        assert excinfo.value.margin == pytest.approx(-0.8, abs=1e-9)


class TestCurveConvexity:
    def test_circle(self, unit_circle):
        report = curve_convexity(unit_circle)
        assert report.min_margin == pytest.approx(1.0, abs=1e-12)
        assert report.passed

    def test_ellipse_minimum_radius_sits_on_the_long_axis(self):
        report = curve_convexity(flow.make_curve("ellipse", M=128, a=2.0, b=1.0))
        assert report.min_margin == pytest.approx(0.5, abs=1e-6)
        assert np.cos(report.witness) ** 2 == pytest.approx(1.0)
        assert report.passed

    def test_nonconvex_control_fails(self):
        report = curve_convexity(nonconvex_control(64))
        assert report.min_margin == pytest.approx(-0.8, abs=1e-9)
        assert not report.passed


class TestFlow:
    def test_circle_radius_follows_the_exact_solution(self, circle_flow):
        for t in (0.05, 0.1, 0.2):
            h = circle_flow.support_at(t)
            assert np.max(np.abs(h - np.sqrt(1.0 - 2.0 * t))) <= 1e-4

    def test_circle_stays_round(self, circle_flow):
        assert np.ptp(circle_flow.samples, axis=1).max() <= 1e-10

    def test_ellipse_area_decays_at_two_pi(self, ellipse_flow):
        t = ellipse_flow.times
        areas = ellipse_flow.areas()
        slope = np.polyfit(t, areas, 1)[0]
        assert slope == pytest.approx(-2.0 * np.pi, rel=1e-2)
        assert np.all(np.diff(areas) < 0)

    def test_ellipse_rounds_out(self, ellipse_flow):
        ratios = [curve.isoperimetric_ratio() for curve in ellipse_flow.curves]
        assert ratios[-1] < ratios[0]

    def test_horizon_is_enforced(self, unit_circle):
        assert flow.flow_horizon(unit_circle) == pytest.approx(0.5)
        with pytest.raises(FlowHorizonError):
            flow.run_flow(unit_circle, 0.46, dt=1e-3)

    def test_explicit_step_checks_its_stability_bound(self, unit_circle):
        with pytest.raises(InvalidDomainError):
            flow.step_flow(unit_circle, 1.0, scheme="explicit")
        bound = flow.explicit_stability_bound(unit_circle)
        stepped = flow.step_flow(unit_circle, 0.5 * bound, scheme="explicit")
        assert stepped.samples[0] == pytest.approx(1.0 - 0.5 * bound)

    def test_rejects_bad_steps(self, unit_circle):
        with pytest.raises(InvalidDomainError):
            flow.step_flow(unit_circle, 0.0)
        with pytest.raises(InvalidDomainError):
            flow.step_flow(unit_circle, 1e-3, scheme="implicit")

    def test_snapshots_include_the_final_time(self, unit_circle):
        history = flow.run_flow(unit_circle, 0.01, dt=1e-3, snapshot_every=3)
        assert history.times[-1] == pytest.approx(0.01)
        assert history.times[0] == 0.0
        assert len(history) == 5


class TestHarnackQuantity:
    def test_circle_minimum_is_four_root_two_at_a_quarter(self, unit_circle):
        history = flow.run_flow(unit_circle, 0.4, dt=1e-5, snapshot_every=100)
        sample = harnack_Z(history, 0.7, 0.25, 0.0)
        assert sample.Z_min == pytest.approx(4.0 * np.sqrt(2.0), abs=5e-4)
        assert sample.v_star == pytest.approx(0.0, abs=1e-9)
        assert sample.Z == pytest.approx(sample.Z_min, abs=1e-9)

    def test_Z_is_minimized_at_v_star(self, ellipse_flow):
        sample = harnack_Z(ellipse_flow, 0.4, 0.2, 0.0)
        best = harnack_Z(ellipse_flow, 0.4, 0.2, sample.v_star)
        assert best.Z == pytest.approx(sample.Z_min, rel=1e-10)
        for v in (-2.0, -0.5, 0.5, 2.0):
            assert harnack_Z(ellipse_flow, 0.4, 0.2, v).Z >= best.Z - 1e-12

    def test_ellipse_lattice_is_nonnegative(self, ellipse_flow):
        thetas, times = default_lattice(ellipse_flow, 16, 6)
        Z = harnack_lattice(ellipse_flow, thetas, times)
        assert Z.shape == (len(times), 16)
        assert Z.min() > 0.0

    def test_times_outside_the_history(self, ellipse_flow):
        with pytest.raises(FlowHorizonError):
            harnack_Z(ellipse_flow, 0.0, 0.6, 0.0)
        with pytest.raises(InvalidDomainError):
            harnack_lattice(ellipse_flow, [0.0], [0.0])


class TestEvolutionIdentity:
    @pytest.mark.parametrize("t", [0.1, 0.25, 0.4])
    def test_both_estimators_agree_on_the_ellipse(self, ellipse_flow, t):
        thetas = np.linspace(0.0, 2.0 * np.pi, 24, endpoint=False)
        result = evolution_identity_check(ellipse_flow, thetas, t)
        allowed = 10.0 * result.truncation + 1e-9 * np.maximum(1.0, np.abs(result.normal_gauge))
        assert np.all(result.discrepancy <= allowed)

    def test_circle_curvature_grows_as_kappa_cubed(self, circle_flow):
        t = 0.2
        result = evolution_identity_check(circle_flow, np.array([0.3, 2.0]), t)
        np.testing.assert_allclose(result.normal_gauge, (1.0 - 2.0 * t) ** -1.5, rtol=1e-3)
        assert np.all(result.discrepancy <= 10.0 * result.truncation + 1e-9)

    def test_stencil_must_fit_inside_the_history(self, ellipse_flow):
        with pytest.raises(FlowHorizonError):
            evolution_identity_check(ellipse_flow, 0.0, 0.5)


class TestPathEnergy:
    def test_constant_angle_on_a_circle_costs_nothing(self, circle_flow):
        energy, path = path_energy(circle_flow, 1.0, 0.1, 1.0, 0.3, time_slices=20, angle_nodes=32)
        assert energy == pytest.approx(0.0, abs=1e-10)
        np.testing.assert_allclose(path[:, 1], 1.0, atol=1e-8)

    def test_circle_energy_matches_the_closed_form(self, circle_flow):
        t1, t2, turn = 0.1, 0.3, 0.8
        energy, path = path_energy(circle_flow, 0.0, t1, turn, t2, time_slices=50, angle_nodes=64)
        expected = turn**2 / (0.5 * np.log((1.0 - 2.0 * t1) / (1.0 - 2.0 * t2)))
        assert energy == pytest.approx(expected, rel=1e-2)
        assert path[0, 0] == pytest.approx(t1)
        assert path[-1, 0] == pytest.approx(t2)

    def test_integrated_gap_is_positive_on_the_circle(self, circle_flow):
        gap = integrated_harnack_gap(circle_flow, 0.0, 0.1, 1.0, 0.3, time_slices=20, angle_nodes=32)
        assert gap > 0.0

    def test_requires_ordered_times_inside_the_history(self, circle_flow):
        with pytest.raises(InvalidDomainError):
            path_energy(circle_flow, 0.0, 0.3, 0.0, 0.1)
        with pytest.raises(InvalidDomainError):
            path_energy(circle_flow, 0.0, 0.1, 0.0, 0.48)

    @pytest.mark.parametrize(
        "theta1, t1, theta2, t2",
        [(0.0, 0.1, 0.0, 0.3), (0.0, 0.05, np.pi / 2.0, 0.4), (1.0, 0.2, 2.5, 0.45), (4.0, 0.1, 3.5, 0.15)],
    )
    def test_integrated_gap_holds_along_the_ellipse_flow(self, ellipse_flow, theta1, t1, theta2, t2):
        delta, _ = path_energy(ellipse_flow, theta1, t1, theta2, t2, time_slices=20, angle_nodes=32)
        coarse, _ = path_energy(ellipse_flow, theta1, t1, theta2, t2, time_slices=10, angle_nodes=16)
        gap = integrated_gap_from_energy(ellipse_flow, theta1, t1, theta2, t2, delta)
        lead = float(curvature_at(ellipse_flow, theta1, t1)[0]) * np.sqrt(t1 / t2) * np.exp(-delta / 4.0)
        assert delta >= 0.0
        assert gap >= -(lead * abs(coarse - delta) / 4.0 + 1e-9)
