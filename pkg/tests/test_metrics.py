import math

import pytest
from hypothesis import given, settings, strategies as st

from builders import scene_of
from qsground import metrics
from qsground.entities import Box3, LineSegment, OrientedPoint, Point3, Polygon
from qsground.relations import topology


def static(prim):
    return [(0.0, prim), (1.0, prim)]


def one(prim, cls="thing"):
    return scene_of({"o": (cls, static(prim))})


class TestPosition:
    def test_point(self):
        assert metrics.position("o", 0.5, one(Point3(1, 2, 3))) == Point3(1, 2, 3)

    def test_box(self):
        assert metrics.position("o", 0, one(Box3.from_bounds((0, 0, 0), (2, 2, 2)))) == Point3(1, 1, 1)

    def test_segment(self):
        assert metrics.position("o", 0, one(LineSegment(Point3(0, 0, 0), Point3(4, 0, 0)))) == Point3(2, 0, 0)

    def test_unknown_object(self):
        with pytest.raises(KeyError):
            metrics.position("nope", 0, one(Point3(0, 0)))


class TestSize:
    def test_unit_box(self):
        assert metrics.size("o", 0, one(Box3.from_bounds((0, 0, 0), (1, 1, 1)))) == metrics.MetricValue(1.0, "m3")

    def test_point(self):
        assert metrics.size("o", 0, one(Point3(0, 0))).value == 0

    def test_triangle(self):
        tri = Polygon((Point3(0, 0), Point3(2, 0), Point3(0, 2)))
        got = metrics.size("o", 0, one(tri))
        assert got.unit == "m2" and got.value == pytest.approx(2.0)


def two(a, b):
    return scene_of({"a": ("thing", static(a)), "b": ("thing", static(b))})


class TestDistance:
    def test_345(self):
        assert metrics.distance("a", "b", 0, two(Point3(0, 0, 0), Point3(3, 4, 0))).value == pytest.approx(5)

    def test_overlap_is_zero(self):
        s = two(Box3.from_bounds((0, 0, 0), (2, 2, 2)), Box3.from_bounds((1, 1, 1), (3, 3, 3)))
        assert metrics.distance("a", "b", 0, s).value == 0

    def test_box_to_point_face(self):
        s = two(Box3.from_bounds((0, 0, 0), (1, 1, 1)), Point3(3, 0.5, 0.5))
        assert metrics.distance("a", "b", 0, s).value == pytest.approx(2.0)


class TestAngle:
    @pytest.mark.parametrize("v2,expected", [((1, 0, 0), 0.0), ((-1, 0, 0), math.pi), ((0, 1, 0), math.pi / 2)])
    def test_angles(self, v2, expected):
        s = two(OrientedPoint(Point3(0, 0), (1, 0, 0)), OrientedPoint(Point3(1, 1), v2))
        assert metrics.angle("a", "b", 0, s).value == pytest.approx(expected)

    def test_undefined(self):
        with pytest.raises(metrics.OrientationError):
            metrics.angle("a", "b", 0, two(Point3(0, 0), Point3(1, 1)))


def mover(p0, p1, t1=1.0):
    return scene_of({"o": ("thing", [(0.0, Point3(*p0)), (t1, Point3(*p1))])})


class TestMovement:
    def test_stationary_velocity(self):
        assert metrics.movement_velocity("o", 0, 1, mover((0, 0, 0), (0, 0, 0))).value == 0

    def test_velocity(self):
        assert metrics.movement_velocity("o", 0, 1, mover((0, 0, 0), (2, 0, 0))).value == pytest.approx(2)

    def test_velocity_345(self):
        assert metrics.movement_velocity("o", 0, 2, mover((0, 0, 0), (3, 4, 0), 2.0)).value == pytest.approx(2.5)

    def test_bad_interval(self):
        with pytest.raises(metrics.IntervalError):
            metrics.movement_velocity("o", 1, 1, mover((0, 0, 0), (1, 0, 0)))

    @pytest.mark.parametrize("d,az", [((1, 0), 0.0), ((0, 1), math.pi / 2), ((-1, -1), 5 * math.pi / 4)])
    def test_direction(self, d, az):
        s = mover((0, 0, 0), (d[0], d[1], 0))
        assert metrics.movement_direction("o", 0, 1, s).value == pytest.approx(az)

    def test_direction_undefined(self):
        with pytest.raises(metrics.DirectionUndefinedError):
            metrics.movement_direction("o", 0, 1, mover((0, 0, 0), (0, 0, 1)))


def heading_scene(angles):
    times = [k / 10 for k in range(len(angles))]
    samples = [(t, OrientedPoint(Point3(0, 0), (math.cos(a), math.sin(a), 0))) for t, a in zip(times, angles)]
    return scene_of({"o": ("thing", samples)}), times[-1]


class TestRotation:
    def test_unchanged(self):
        s, end = heading_scene([0.0, 0.0])
        assert metrics.rotation("o", 0, end, s).value == 0

    def test_quarter_turn(self):
        s, end = heading_scene([0.0, math.pi / 2])
        assert metrics.rotation("o", 0, end, s).value == pytest.approx(math.pi / 2)

    def test_half_turn_in_small_steps(self):
        steps = [math.pi * k / 18 for k in range(19)]
        s, end = heading_scene(steps)
        # sum of 18 steps of 10 degrees
        assert metrics.rotation("o", 0, end, s).value == pytest.approx(math.pi)

    def test_full_turn_is_not_aliased(self):
        steps = [2 * math.pi * k / 36 for k in range(37)]
        s, end = heading_scene(steps)
        assert metrics.rotation("o", 0, end, s).value == pytest.approx(2 * math.pi)


boxes = st.tuples(
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 2), st.floats(0.05, 2), st.floats(0.05, 2)
)


def mk(b):
    x, y, z, w, h, d = b
    return Box3.from_bounds((x, y, z), (x + w, y + h, z + d))


@settings(max_examples=300, deadline=None)
@given(boxes, boxes)
def test_distance_symmetric_and_consistent_with_topology(b1, b2):
    s = two(mk(b1), mk(b2))
    d_ab = metrics.distance("a", "b", 0, s).value
    d_ba = metrics.distance("b", "a", 0, s).value
    assert d_ab == pytest.approx(d_ba, abs=1e-12)
    a, b = mk(b1), mk(b2)
    # ground-plane topology is dc whenever the 3D extents are apart in x or y
    apart_xy = any(a.lo()[k] > b.hi()[k] + 1e-6 or b.lo()[k] > a.hi()[k] + 1e-6 for k in (0, 1))
    if apart_xy:
        assert d_ab > 0 and topology(a, b).value == "dc"
    if d_ab == 0:
        assert topology(a, b).value != "dc"


@settings(max_examples=200, deadline=None)
@given(boxes, boxes)
def test_centroid_distance_bounds_extent_distance(b1, b2):
    s = two(mk(b1), mk(b2))
    c = metrics.position("a", 0, s).array() - metrics.position("b", 0, s).array()
    assert math.sqrt(c @ c) + 1e-9 >= metrics.distance("a", "b", 0, s).value


@settings(max_examples=200, deadline=None)
@given(st.tuples(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5)), st.floats(0.1, 3))
def test_velocity_non_negative(p, dt):
    s = mover((0, 0, 0), p, dt)
    v = metrics.movement_velocity("o", 0, dt, s).value
    assert v >= 0
    assert (v == 0) == (p == (0, 0, 0)) or v < 1e-12
