"""Gauges, cones, graphical flow, radial expanders, the space-time track and Gamma_N"""

from dataclasses import replace

import numpy as np
import pytest

from src.core.exceptions import FlowHorizonError, InvalidDomainError
from src.core.models.grid import GridField
from src.domains.curves.services import curve_flow_service as flow
from src.domains.expanders.services import canonical_expander_service as canonical
from src.domains.expanders.services import expander_service as expanders
from src.domains.expanders.services.gauge_service import (
    box_half_width,
    build_cone,
    circumradius,
    cone_straightness,
    gauge_function,
    infimum_bound,
    inscribed_distance,
    lipschitz_bound,
)
from src.domains.expanders.services.track_service import covered_levels, level_set_deviation, spacetime_track


def _affine_field(L=1.0, resolution=21):
    axis = np.linspace(-L, L, resolution)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return GridField(half_width=L, values=0.3 * x - 1.2 * y + 2.0, label="affine")


class TestGauge:
    def test_unit_circle_gauge_is_the_norm(self, unit_circle):
        assert gauge_function(unit_circle, (3.0, 4.0)) == pytest.approx(5.0, rel=1e-9)
        assert gauge_function(unit_circle, (0.0, 0.0)) == 0.0

    def test_ellipse_gauge_on_its_boundary(self, ellipse):
        assert gauge_function(ellipse, (2.0, 0.0)) == pytest.approx(1.0, abs=1e-6)
        assert gauge_function(ellipse, (0.0, 1.0)) == pytest.approx(1.0, abs=1e-6)
        assert gauge_function(ellipse, (0.0, -3.0)) == pytest.approx(3.0, abs=1e-5)

    def test_vectorized_gauge_agrees(self, ellipse):
        points = np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 0.5], [-0.5, -0.7]])
        expected = [gauge_function(ellipse, p) for p in points]
        np.testing.assert_allclose(gauge_function(ellipse, points), expected, rtol=1e-12)
        assert gauge_function(ellipse, points.reshape(2, 2, 2)).shape == (2, 2)

    def test_gauge_is_one_between_angle_nodes(self, ellipse):
        s = np.linspace(0.1, 6.0, 9)
        boundary = np.stack([2.0 * np.cos(s), np.sin(s)], axis=-1)
        np.testing.assert_allclose(gauge_function(ellipse, boundary), 1.0, atol=1e-6)
        np.testing.assert_allclose(gauge_function(ellipse, 3.0 * boundary), 3.0, atol=3e-6)

    def test_curve_must_enclose_the_origin(self):
        thetas = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        shifted = flow.make_curve("generic", M=64, samples=0.2 + np.cos(thetas))
        with pytest.raises(InvalidDomainError):
            gauge_function(shifted, (1.0, 0.0))

    def test_inscribed_distance_of_the_unit_circle(self, unit_circle):
        assert inscribed_distance(unit_circle) == pytest.approx(0.5 / np.sqrt(2.0), rel=1e-9)
        bound, d = infimum_bound(unit_circle, 5.0)
        assert bound == pytest.approx(2.0 * 5.0 / d)

    def test_box_defaults_to_six_circumradii(self, unit_circle, ellipse):
        assert circumradius(ellipse) == pytest.approx(2.0, rel=1e-6)
        assert box_half_width(unit_circle) == pytest.approx(6.0, rel=1e-9)
        assert box_half_width(ellipse) == pytest.approx(12.0, rel=1e-6)
        assert box_half_width(ellipse, 4.5) == 4.5


class TestCone:
    @pytest.mark.parametrize("N", [1.0, 10.0])
    def test_cone_lipschitz_constant_is_N_over_min_h(self, unit_circle, N):
        cone = build_cone(unit_circle, N, 2.0, 41)
        assert lipschitz_bound(unit_circle) == pytest.approx(1.0)
        assert cone.lipschitz() == pytest.approx(N, rel=1e-9)
        assert cone.flagged["lipschitz_bound"] == pytest.approx(N)

    def test_cone_is_straight(self, unit_circle):
        cone = build_cone(unit_circle, 3.0, 3.0, 61)
        assert cone_straightness(cone) <= cone.spacing

    def test_too_coarse_grid_is_rejected(self, unit_circle):
        with pytest.raises(InvalidDomainError):
            build_cone(unit_circle, 1.0, 6.0, 11)

    def test_nonpositive_slope_is_rejected(self, unit_circle):
        with pytest.raises(InvalidDomainError):
            build_cone(unit_circle, 0.0, 2.0, 41)

    def test_box_follows_the_curve_when_unset(self, ellipse):
        cone = build_cone(ellipse, 1.0, None, 61)
        assert cone.half_width == pytest.approx(12.0, rel=1e-6)
        assert cone.values[cone.center_index, -1] == pytest.approx(cone.half_width, rel=1e-6)


class TestGraphicalFlow:
    def test_affine_graphs_do_not_move(self):
        field = _affine_field()
        flowed = expanders.graphical_flow(field, 0.5, 0.05)
        np.testing.assert_allclose(flowed.values, field.values, atol=1e-10)
        assert flowed.flagged["s"] == pytest.approx(0.05)
        assert "level_set_floor" not in flowed.flagged

    def test_level_set_limit_is_floored(self):
        flowed = expanders.graphical_flow(_affine_field(), 0.0, 0.01)
        assert flowed.flagged["level_set_floor"] == pytest.approx(1e-8)

    def test_step_above_the_parabolic_bound_is_rejected(self):
        field = _affine_field()
        with pytest.raises(InvalidDomainError):
            expanders.graphical_flow(field, 1.0, 0.1, ds=0.3 * field.spacing**2)

    def test_invalid_arguments(self):
        field = _affine_field()
        with pytest.raises(InvalidDomainError):
            expanders.graphical_flow(field, -1.0, 0.1)
        with pytest.raises(InvalidDomainError):
            expanders.graphical_flow_snapshots(field, 1.0, [0.0])

    def test_snapshots_come_back_in_time_order(self):
        snapshots = expanders.graphical_flow_snapshots(_affine_field(), 1.0, [0.02, 0.01])
        assert [snap.flagged["s"] for snap in snapshots] == pytest.approx([0.01, 0.02])

    def test_squash_divides_heights_exactly(self, unit_circle):
        cone = build_cone(unit_circle, 4.0, 2.0, 41)
        squashed = expanders.squash(cone, 4.0)
        np.testing.assert_array_equal(squashed.values, cone.values / 4.0)
        assert squashed.N == 4.0
        assert squashed.lipschitz() == pytest.approx(cone.lipschitz() / 4.0)
        with pytest.raises(InvalidDomainError):
            expanders.squash(cone, 0.5)


class TestExpander:
    @pytest.fixture(scope="class")
    def circle_expander(self):
        circle = flow.make_curve("circle", M=64)
        return expanders.compute_expander(circle, 2.0, 3.0, 31)

    def test_bounds_hold(self, circle_expander):
        flagged = circle_expander.flagged
        assert flagged["lipschitz_ok"]
        assert flagged["infimum_ok"]
        assert flagged["min_height"] > 0.0
        assert circle_expander.N == 2.0

    def test_expander_lies_above_its_cone(self, circle_expander):
        circle = flow.make_curve("circle", M=64)
        cone = build_cone(circle, 2.0, 3.0, 31)
        assert np.min(circle_expander.values - cone.values) >= -circle_expander.tolerance

    def test_slope_below_one_is_rejected(self, unit_circle):
        with pytest.raises(InvalidDomainError):
            expanders.compute_expander(unit_circle, 0.5, 3.0, 31)


class TestExpanderAgreement:
    @pytest.fixture(scope="class")
    def unit_expander(self, unit_circle):
        return expanders.compute_expander(unit_circle, 1.0, None, 81)

    def test_grid_expander_matches_the_radial_profile(self, unit_expander):
        profile = expanders.radial_expander(1.0, R_max=10.0, samples=1001)
        assert unit_expander.half_width == pytest.approx(6.0)
        distance = expanders.radial_agreement(unit_expander, profile, 0.5 * unit_expander.half_width)
        assert distance <= 2.0 * unit_expander.tolerance

    def test_radial_agreement_sees_a_shifted_profile(self, unit_expander):
        profile = expanders.radial_expander(1.0, R_max=10.0, samples=1001)
        shifted = replace(profile, heights=profile.heights + 1.0)
        assert expanders.radial_agreement(unit_expander, shifted, 3.0) >= 1.0 - 2.0 * unit_expander.tolerance


class TestSelfSimilarity:
    @pytest.fixture(scope="class")
    def snapshots(self, unit_circle):
        cone = build_cone(unit_circle, 1.0, None, 81)
        return cone, expanders.graphical_flow_snapshots(cone, 1.0, [0.5, 1.0])

    def test_flow_from_a_cone_is_self_similar(self, snapshots):
        cone, (early, late) = snapshots
        defect = expanders.self_similarity_defect(early, late, 0.4 * cone.half_width)
        assert defect <= cone.tolerance

    def test_the_defect_sees_a_perturbed_slice(self, snapshots):
        cone, (early, late) = snapshots
        bumped = replace(late, values=late.values + 0.5)
        assert expanders.self_similarity_defect(early, bumped, 0.4 * cone.half_width) > cone.tolerance

    def test_snapshots_must_be_ordered_and_fit(self, snapshots):
        cone, (early, late) = snapshots
        with pytest.raises(InvalidDomainError):
            expanders.self_similarity_defect(late, early, 1.0)
        with pytest.raises(InvalidDomainError):
            expanders.self_similarity_defect(early, late, 0.9 * cone.half_width)


class TestRadialExpander:
    @pytest.fixture(scope="class")
    def profile(self):
        return expanders.radial_expander(1.0, R_max=10.0, samples=1001)

    def test_profile_solves_the_expander_equation(self, profile):
        assert profile.details["max_residual"] <= 1e-5
        assert profile.details["slope_error"] <= 1e-8

    def test_profile_is_convex_and_starts_above_zero(self, profile):
        assert profile.apex_height > 0.0
        assert profile.convexity_margin() >= -1e-12
        assert profile.slopes[-1] == pytest.approx(1.0 - 10.0**-2, rel=1e-6)

    def test_steeper_expanders_start_higher(self, profile):
        steeper = expanders.radial_expander(2.0, R_max=10.0, samples=201)
        assert steeper.apex_height > profile.apex_height

    def test_height_continues_linearly_past_the_last_radius(self, profile):
        far = float(profile.height_at(12.0))
        assert far == pytest.approx(profile.heights[-1] + 2.0 * profile.slopes[-1])

    def test_nonpositive_slope_is_rejected(self):
        with pytest.raises(InvalidDomainError):
            expanders.radial_expander(0.0)


class TestSpaceTimeTrack:
    @pytest.fixture(scope="class")
    def track(self, circle_flow):
        return spacetime_track(circle_flow, 3.0, 61)

    def test_circle_track_matches_the_closed_form(self, track):
        inner = track.restrict(1.5)
        x, y = inner.mesh()
        np.testing.assert_allclose(inner.values, np.sqrt(x**2 + y**2 + 2.0), atol=1e-2)

    def test_origin_is_capped_by_homothetic_shrinking(self, track):
        assert track.flagged["homothetic_cap_points"] > 0
        assert track.flagged["extinction_time"] == pytest.approx(0.5, abs=1e-3)

    def test_level_sets_are_rescaled_curves(self, track, circle_flow):
        alphas = covered_levels(circle_flow, track, count=3)
        assert len(alphas) >= 1
        for alpha in alphas:
            assert level_set_deviation(track, circle_flow, float(alpha)) <= 2.0 * track.spacing

    def test_short_histories_are_rejected(self, unit_circle):
        short = flow.run_flow(unit_circle, 0.002, dt=1e-3)
        with pytest.raises(FlowHorizonError):
            spacetime_track(short, 3.0, 61)


class TestCanonicalExpander:
    def test_circle_sigma_matches_the_closed_form(self, circle_flow):
        sff, Z, sigma, residual = canonical.canonical_expander_check(circle_flow, 50.0, 0.7, 0.25, 0.0)
        assert sff > 0.0
        assert Z == pytest.approx(4.0 * np.sqrt(2.0), rel=1e-3)
        assert sigma == pytest.approx(canonical.circle_sigma(50.0, 0.25), rel=5e-2)

    def test_circle_sigma_tends_to_one(self):
        values = [canonical.circle_sigma(N, 0.25) for N in (10.0, 20.0, 50.0, 100.0)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(1.0, abs=1e-3)

    def test_lattice_reports_a_fitted_ratio(self, circle_flow):
        result = canonical.sigma_lattice(circle_flow, 50.0, [0.0, 2.0], [0.15, 0.25], [0.0, 0.5])
        assert result["sigma"].shape == (2, 2, 2)
        assert result["fitted"] == pytest.approx(canonical.circle_sigma(50.0, 0.2), rel=5e-2)
        assert result["residual"].shape == (2, 2)

    def test_slope_below_one_is_rejected(self, circle_flow):
        with pytest.raises(InvalidDomainError):
            canonical.canonical_sample(circle_flow, 0.5, 0.0, 0.2, 0.0)

    def test_time_must_be_inside_the_history(self, circle_flow):
        with pytest.raises(FlowHorizonError):
            canonical.canonical_sample(circle_flow, 10.0, 0.0, 0.46, 0.0)
