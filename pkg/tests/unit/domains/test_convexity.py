"""Convexity certificates on grids and parametrized surfaces"""

import numpy as np
import pytest

from src.core.exceptions import DegenerateGeometryError, InvalidDomainError
from src.core.models.grid import GridField
from src.core.models.reports import ConvexityReport
from src.domains.convexity.services.chain_service import _link_from_reports
from src.domains.convexity.services.convexity_service import (
    cone_convexity,
    graph_surface,
    grid_convexity,
    principal_curvatures,
    second_fundamental_form,
    surface_convexity,
    surface_sff,
)
from src.domains.expanders.services.gauge_service import build_cone


def _field(f, L=2.0, resolution=41, label="test"):
    axis = np.linspace(-L, L, resolution)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    return GridField(half_width=L, values=f(x, y), label=label)


def _sphere(R):
    def embed(params):
        a, b = params
        return R * np.array([np.cos(a) * np.cos(b), np.sin(a) * np.cos(b), np.sin(b)])

    return embed


def _cylinder(R):
    def embed(params):
        a, b = params
        return np.array([R * np.cos(a), R * np.sin(a), b])

    return embed


def _toward_axis(point):
    return -np.array([point[0], point[1], 0.0])


class TestGridConvexity:
    def test_norm_cone_passes_away_from_its_apex(self):
        report = grid_convexity(_field(lambda x, y: np.hypot(x, y)), pairs=2000)
        assert report.passed
        assert report.details["apex_excluded"]

    def test_concave_paraboloid_has_margin_minus_two(self):
        report = grid_convexity(_field(lambda x, y: -(x**2 + y**2)), pairs=2000)
        assert report.min_margin == pytest.approx(-2.0, abs=1e-8)
        assert not report.passed

    def test_margin_scales_with_the_field(self):
        base = grid_convexity(_field(lambda x, y: x**2 + 2.0 * y**2), pairs=2000)
        tripled = grid_convexity(_field(lambda x, y: 3.0 * (x**2 + 2.0 * y**2)), pairs=2000)
        assert base.min_margin == pytest.approx(2.0, rel=1e-8)
        assert tripled.min_margin == pytest.approx(3.0 * base.min_margin, rel=1e-8)

    def test_midpoint_scan_is_reproducible(self):
        field = _field(lambda x, y: np.abs(x) + 0.1 * y**2)
        first = grid_convexity(field, pairs=500, seed=5)
        second = grid_convexity(field, pairs=500, seed=5)
        assert first.details["midpoint_min"] == second.details["midpoint_min"]
        assert first.witness == second.witness

    def test_affine_field_has_zero_margin(self):
        report = grid_convexity(_field(lambda x, y: 2.0 * x - y), exclude_apex=False, pairs=500)
        assert report.min_margin == pytest.approx(0.0, abs=1e-9)
        assert report.passed

    def test_oversized_apex_exclusion_is_rejected(self):
        field = _field(lambda x, y: x**2, resolution=5)
        with pytest.raises(InvalidDomainError):
            grid_convexity(field, apex_cells=10)

    def test_apex_exclusion_covers_both_scans(self):
        field = _field(lambda x, y: x**2 + y**2)
        field.values[field.center_index, field.center_index] += 0.05
        report = grid_convexity(field, pairs=2000)
        assert report.passed
        assert report.details["midpoint_min"] == pytest.approx(2.0, rel=1e-6)
        assert not grid_convexity(field, exclude_apex=False, pairs=2000).passed


class TestConeConvexity:
    def test_norm_cone_has_positive_transverse_margin(self):
        report = cone_convexity(_field(lambda x, y: np.hypot(x, y)), pairs=2000)
        assert report.passed
        assert report.conditions == {"homogeneous": True, "midpoint": True}
        assert report.min_margin == pytest.approx(1.0 / (1.9 * np.sqrt(2.0)), rel=1e-2)
        assert report.details["radial_max"] <= 2.0 * report.tolerance_budget

    def test_ellipse_cone_passes_on_its_default_box(self, ellipse):
        cone = build_cone(ellipse, 5.0, None, 61)
        report = cone_convexity(cone.restrict(0.5 * cone.half_width), pairs=2000)
        assert report.passed
        assert report.min_margin > 0.0

    def test_concave_cone_fails(self):
        report = cone_convexity(_field(lambda x, y: -np.hypot(x, y)), pairs=2000)
        assert report.min_margin < 0.0
        assert not report.passed

    def test_non_homogeneous_fields_are_rejected(self):
        report = cone_convexity(_field(lambda x, y: x**2 + y**2), pairs=2000)
        assert report.min_margin == pytest.approx(2.0, rel=1e-8)
        assert not report.conditions["homogeneous"]
        assert not report.passed


class TestChainLinkMargins:
    def _grid_report(self, margin, budget):
        return ConvexityReport(kind="grid_field", min_margin=margin, witness=[0.0, 0.0], tolerance_budget=budget)

    def test_link_reports_the_measured_margin(self):
        link = _link_from_reports(3, [self._grid_report(0.4, 0.01), self._grid_report(0.2, 0.03)])
        assert link.passed
        assert link.margin == pytest.approx(0.2)
        assert link.tolerance == pytest.approx(0.03)

    def test_negative_margin_within_budget_breaks_the_link(self):
        report = self._grid_report(-0.033, 0.41)
        assert report.passed
        link = _link_from_reports(2, [self._grid_report(0.5, 0.01), report])
        assert not link.passed
        assert link.margin == pytest.approx(-0.033)
        assert link.tolerance == pytest.approx(0.41)

    def test_failed_side_condition_breaks_the_link(self):
        report = self._grid_report(0.3, 0.01)
        report.conditions["midpoint"] = False
        assert not _link_from_reports(2, [report]).passed


class TestSurfaceForms:
    def test_sphere_curvatures_are_one_over_R(self):
        inward = lambda point: -point  # noqa: E731
        curvatures = principal_curvatures(_sphere(2.0), [0.3, 0.2], inward=inward)
        np.testing.assert_allclose(curvatures, [0.5, 0.5], atol=1e-5)

    def test_plane_is_flat(self):
        plane = lambda params: np.array([params[0], params[1], 0.0])  # noqa: E731
        np.testing.assert_allclose(principal_curvatures(plane, [0.4, -0.7]), [0.0, 0.0], atol=1e-9)

    def test_cylinder_has_one_flat_direction(self):
        curvatures = principal_curvatures(_cylinder(4.0), [1.0, 0.5], inward=_toward_axis)
        np.testing.assert_allclose(np.sort(curvatures), [0.0, 0.25], atol=1e-5)
        assert surface_sff(_cylinder(4.0), [1.0, 0.5], [0.0, 1.0], inward=_toward_axis) == pytest.approx(0.0, abs=1e-6)

    def test_sff_reuses_a_computed_form(self):
        params, direction = [1.0, 0.5], [1.0, 0.3]
        form = second_fundamental_form(_cylinder(4.0), params, inward=_toward_axis)
        direct = surface_sff(_cylinder(4.0), params, direction, inward=_toward_axis)
        assert surface_sff(_cylinder(4.0), params, direction, inward=_toward_axis, form=form) == direct
        assert direct == pytest.approx(4.0, rel=1e-5)

    def test_saddle_fails(self):
        saddle = lambda params: np.array([params[0], params[1], params[0] ** 2 - params[1] ** 2])  # noqa: E731
        report = surface_convexity(saddle, [[0.0, 0.0]], label="saddle")
        assert report.min_margin == pytest.approx(-2.0, abs=1e-6)
        assert not report.passed

    def test_convex_graph_passes(self):
        field = _field(lambda x, y: 0.5 * (x**2 + y**2), L=1.0, resolution=21)
        lattice = [[0.0, 0.0], [0.3, -0.2], [-0.4, 0.1]]
        report = surface_convexity(graph_surface(field), lattice, label="paraboloid")
        assert report.passed
        assert report.min_margin > 0.0

    def test_degenerate_parametrization_raises(self):
        line = lambda params: np.array([params[0], 0.0, 0.0])  # noqa: E731
        with pytest.raises(DegenerateGeometryError):
            principal_curvatures(line, [0.0, 0.0])
