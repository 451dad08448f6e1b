import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsground.entities import (
    Box3,
    EntityError,
    LineSegment,
    Point3,
    Polygon,
    SpaceTimeHistory,
    TimeInterval,
    TimeRangeError,
    sample_at,
    signed_area_2d,
    span,
    validate,
)


def shoelace(xy):
    # independent oracle: sum of cross products of consecutive vertices
    s = 0.0
    for (x1, y1), (x2, y2) in zip(xy, xy[1:] + xy[:1]):
        s += x1 * y2 - x2 * y1
    return s / 2.0


def poly(*xy):
    return Polygon(tuple(Point3(x, y, 0) for x, y in xy))


class TestValidate:
    def test_ccw_square_ok(self):
        assert validate(poly((0, 0), (1, 0), (1, 1), (0, 1))).ok

    def test_crossed_square_self_intersects(self):
        rep = validate(poly((0, 0), (1, 1), (1, 0), (0, 1)))
        assert not rep.ok
        assert any("self-intersect" in v for v in rep.violations)

    def test_clockwise_polygon_reports_orientation_and_suggests_reversal(self):
        xy = [(0, 0), (0, 1), (1, 1), (1, 0)]
        assert shoelace(xy) < 0
        rep = validate(poly(*xy))
        assert any("clockwise" in v for v in rep.violations)
        assert rep.suggestion == poly(*reversed(xy))
        assert validate(rep.suggestion).ok

    def test_degenerate_segment_and_box(self):
        p = Point3(1, 1, 1)
        assert not validate(LineSegment(p, p)).ok
        assert not validate(Box3(p, p)).ok

    def test_non_finite_point(self):
        assert not validate(Point3(math.nan, 0, 0)).ok


class TestSampleAt:
    def test_midpoint_of_linear_motion(self):
        h = SpaceTimeHistory("o", (0.0, 2.0), (Point3(0, 0, 0), Point3(2, 0, 0)))
        assert sample_at(h, 1.0) == Point3(1, 0, 0)

    def test_exact_sample_returned_unchanged(self):
        b = Box3.from_bounds((0, 0, 0), (1, 1, 1))
        h = SpaceTimeHistory("o", (0.0, 1.0), (b, Box3.from_bounds((1, 0, 0), (2, 1, 1))))
        assert sample_at(h, 0.0) is b

    def test_box_interpolation(self):
        h = SpaceTimeHistory(
            "o", (0.0, 4.0),
            (Box3.from_bounds((0, 0, 0), (1, 1, 1)), Box3.from_bounds((1, 0, 0), (2, 1, 1))),
        )
        b = sample_at(h, 3.0)
        # 3/4 of the way from x=0 to x=1
        assert b.min.x == pytest.approx(0.75)
        assert b.max.x == pytest.approx(1.75)

    def test_out_of_range_names_span(self):
        h = SpaceTimeHistory("o", (0.0, 2.0), (Point3(0, 0), Point3(1, 0)))
        with pytest.raises(TimeRangeError, match=r"\[0.0, 2.0\]"):
            sample_at(h, 2.5)

    def test_self_intersecting_interpolation_falls_back_to_nearest(self):
        a = poly((0, 0), (1, 0), (1, 1), (0, 1))
        # swapping two vertices mid-way produces a bow-tie at s=0.5
        b = poly((0, 0), (1, 0), (0, 1), (1, 1.0001))
        h = SpaceTimeHistory("o", (0.0, 1.0), (a, b))
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            got = sample_at(h, 0.4)
        if w:
            assert got == a
        assert validate(got).ok or got == a


class TestSpan:
    def test_three_samples(self):
        h = SpaceTimeHistory("o", (0.0, 1.0, 2.0), (Point3(0, 0),) * 3)
        assert span(h) == TimeInterval(0.0, 2.0)

    def test_short(self):
        h = SpaceTimeHistory("o", (0.5, 0.6), (Point3(0, 0),) * 2)
        assert span(h) == TimeInterval(0.5, 0.6)

    def test_single_sample_is_error(self):
        h = SpaceTimeHistory("o", (0.5,), (Point3(0, 0),))
        with pytest.raises(EntityError):
            span(h)


def test_history_rejects_non_monotone_and_mixed_kinds():
    with pytest.raises(EntityError):
        SpaceTimeHistory("o", (0.0, 0.0), (Point3(0, 0), Point3(1, 0)))
    with pytest.raises(EntityError):
        SpaceTimeHistory("o", (0.0, 1.0), (Point3(0, 0), Box3.from_bounds((0, 0, 0), (1, 1, 1))))


def test_interval_requires_t1_lt_t2():
    with pytest.raises(EntityError):
        TimeInterval(1.0, 1.0)


coord = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(coord, coord, st.floats(0.1, 5), st.floats(0.1, 5), coord, coord, st.floats(0, 1))
def test_box_interpolation_stays_valid_and_is_continuous(x, y, w, h, dx, dy, s):
    a = Box3.from_bounds((x, y, 0), (x + w, y + h, 1))
    b = Box3.from_bounds((x + dx, y + dy, 0), (x + dx + w * 1.5, y + dy + h, 1))
    hist = SpaceTimeHistory("o", (0.0, 1.0), (a, b))
    mid = sample_at(hist, s)
    assert validate(mid).ok
    eps = 1e-6
    near = sample_at(hist, min(1.0, s + eps))
    assert np.allclose(near.lo(), mid.lo(), atol=1e-4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=3, max_size=8))
def test_signed_area_matches_shoelace(xy):
    assert signed_area_2d(np.array(xy)) == pytest.approx(shoelace(xy), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 3), st.integers(3, 12))
def test_ccw_regular_polygon_has_positive_area(r, n):
    pts = [(r * math.cos(2 * math.pi * k / n), r * math.sin(2 * math.pi * k / n)) for k in range(n)]
    p = poly(*pts)
    assert validate(p).ok
    assert signed_area_2d(np.array(pts)) > 0
