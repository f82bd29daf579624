"""Squashed expanders against the space-time track of a shrinking circle"""

import numpy as np
import pytest

from src.core.exceptions import InvalidDomainError
from src.domains.expanders.services.track_service import limit_comparison


@pytest.fixture(scope="module")
def comparison(circle_flow):
    circle = circle_flow.curves[0]
    return limit_comparison(circle, circle_flow, [10.0, 2.0, 5.0], L=None, resolution=81)


def test_rows_follow_increasing_N(comparison):
    assert [row["N"] for row in comparison["rows"]] == [2.0, 5.0, 10.0]
    assert len(comparison["distances"]) == 3
    assert np.all(np.isfinite(comparison["distances"]))
    assert comparison["tolerance"] == pytest.approx(0.15)


def test_distance_to_the_track_falls_with_N(comparison):
    distances = comparison["distances"]
    assert comparison["trend_ok"], distances
    assert distances[-1] < distances[0]
    assert np.all(np.diff(distances) <= comparison["tolerance"])


def test_largest_N_is_within_five_grid_tolerances(comparison):
    assert comparison["final_ok"]
    assert comparison["final_distance"] == comparison["distances"][-1]
    assert comparison["final_distance"] <= 5.0 * comparison["tolerance"]


def test_squashed_graphs_are_scaled_expanders(comparison):
    for N, field in comparison["squashed"].items():
        assert field.N == N
        assert field.flagged["lipschitz_ok"]
        assert field.half_width == pytest.approx(6.0)


def test_track_level_sets_match_the_rescaled_flow(comparison):
    assert comparison["level_set_ok"]
    assert all(np.isfinite(comparison["level_set_deviation"]))
    assert len(comparison["expander_level_set_deviation"]) == len(comparison["alphas"])


def test_track_is_shared_with_the_report(comparison):
    track = comparison["track"]
    assert track.resolution == 81
    assert track.half_width == pytest.approx(6.0)
    assert track.flagged["levels"] == 256


def test_slopes_below_one_are_rejected(circle_flow):
    with pytest.raises(InvalidDomainError):
        limit_comparison(circle_flow.curves[0], circle_flow, [0.5], L=None, resolution=41)
