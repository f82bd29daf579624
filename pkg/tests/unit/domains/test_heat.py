"""Heat solutions and the matrix, trace, classical and log-convexity Harnack checks"""

import numpy as np
import pytest

from src.core.exceptions import InvalidDomainError
from src.core.models.heat import FundamentalSolution, PointSourceSolution
from src.domains.heat.services import heat_harnack_service as heat


@pytest.fixture
def sources_1d():
    return PointSourceSolution.from_pairs([(-1.0, 1.0), (0.5, 2.0), (2.0, 0.5)], dim=1)


@pytest.fixture
def sources_2d():
    return PointSourceSolution.from_pairs(
        [((-1.0, 0.0), 1.0), ((1.0, 1.0), 2.0), ((0.0, -1.5), 0.5)], dim=2, time_shift=0.05
    )


def test_log_u_of_fundamental_solution_at_origin():
    assert heat.log_u(FundamentalSolution(dim=1), 0.0, 1.0) == pytest.approx(-0.5 * np.log(4.0 * np.pi))
    assert heat.log_u(FundamentalSolution(dim=2), (0.0, 0.0), 1.0) == pytest.approx(-np.log(4.0 * np.pi))


def test_log_u_survives_far_tails(sources_1d):
    value = heat.log_u(sources_1d, 60.0, 0.1)
    assert np.isfinite(value)
    assert value < -5000.0


def test_fundamental_solution_is_the_matrix_equality_case():
    rho = FundamentalSolution(dim=2)
    for x, t in [((0.5, -0.3), 0.7), ((2.0, 1.0), 1.5), ((-3.0, 0.2), 0.4)]:
        assert abs(heat.matrix_harnack_defect(rho, x, t)) <= 1e-6


def test_fundamental_solution_is_the_trace_equality_case():
    li_yau, trace_harnack = heat.trace_defects(FundamentalSolution(dim=1), 0.3, 0.8)
    assert abs(li_yau) <= 1e-6
    assert abs(trace_harnack) <= 1e-6


def test_finite_difference_hessian_matches_closed_form(sources_2d):
    x, t = (0.3, -0.4), 0.6
    numeric = heat.hessian_log(sources_2d, x, t).to_array()
    exact = heat.analytic_hessian_log(sources_2d, x, t).to_array()
    np.testing.assert_allclose(numeric, exact, atol=1e-5)


def test_matrix_and_trace_harnack_hold_for_point_sources(sources_1d, sources_2d):
    rng = np.random.default_rng(7)
    for sol in (sources_1d, sources_2d):
        for _ in range(25):
            x = rng.uniform(-4.0, 4.0, size=sol.dim)
            t = rng.uniform(0.1, 2.0)
            assert heat.matrix_harnack_defect(sol, x, t) >= -1e-6
            analytic = heat.analytic_hessian_log(sol, x, t).shifted(1.0 / (2.0 * t)).eigenvalues().min()
            assert analytic >= -1e-12
            li_yau, trace_harnack = heat.trace_defects(sol, x, t)
            assert li_yau >= -1e-6
            assert trace_harnack >= -1e-6


def test_classical_harnack_is_sharp_for_rho_at_the_origin():
    rho = FundamentalSolution(dim=1)
    assert abs(heat.classical_harnack_gap(rho, 0.0, 0.3, 0.0, 1.1)) <= 1e-12


def test_classical_harnack_gap_is_nonnegative(sources_1d):
    rng = np.random.default_rng(3)
    for _ in range(50):
        x1, x2 = rng.uniform(-4.0, 4.0, size=2)
        t1 = rng.uniform(0.1, 1.0)
        t2 = t1 + rng.uniform(0.05, 1.0)
        assert heat.classical_harnack_gap(sources_1d, x1, t1, x2, t2) >= -1e-10


def test_log_ratio_is_convex_along_segments(sources_2d):
    rng = np.random.default_rng(11)
    for _ in range(50):
        x = rng.uniform(-4.0, 4.0, size=2)
        z = rng.uniform(-4.0, 4.0, size=2)
        alpha = rng.uniform(0.01, 0.99)
        t = rng.uniform(0.1, 2.0)
        assert heat.log_ratio_convexity_defect(sources_2d, t, x, z, alpha) >= -1e-10


def test_log_ratio_of_rho_is_zero():
    assert heat.log_ratio(FundamentalSolution(dim=2), (1.5, -0.5), 0.9) == pytest.approx(0.0, abs=1e-14)


def test_straight_line_integrand_is_nonnegative(sources_1d):
    margin = heat.straight_line_harnack_integrand(sources_1d, -2.0, 0.2, 3.0, 1.0, 0.6)
    assert margin >= -1e-6


@pytest.mark.parametrize("t", [0.0, -0.5])
def test_nonpositive_time_is_rejected(t):
    with pytest.raises(InvalidDomainError):
        heat.log_u(FundamentalSolution(dim=1), 0.0, t)


def test_classical_gap_needs_ordered_times():
    rho = FundamentalSolution(dim=1)
    with pytest.raises(InvalidDomainError):
        heat.classical_harnack_gap(rho, 0.0, 1.0, 0.0, 1.0)
    with pytest.raises(InvalidDomainError):
        heat.classical_harnack_gap(rho, 0.0, 1.0, 0.0, 0.5)


def test_convexity_defect_needs_interior_alpha():
    with pytest.raises(InvalidDomainError):
        heat.log_ratio_convexity_defect(FundamentalSolution(dim=1), 1.0, 0.0, 1.0, 1.0)


def test_point_source_validation():
    with pytest.raises(InvalidDomainError):
        PointSourceSolution.from_pairs([(0.0, -1.0)], dim=1)
    with pytest.raises(InvalidDomainError):
        PointSourceSolution.from_pairs([], dim=1)
    with pytest.raises(InvalidDomainError):
        FundamentalSolution(dim=3)
    with pytest.raises(InvalidDomainError):
        heat.log_u(FundamentalSolution(dim=2), 0.0, 1.0)
