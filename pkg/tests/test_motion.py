import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from builders import box_track, frames, point_track, scene_of
from qsground.entities import OrientedPoint, Point3, TimeRangeError
from qsground.motion import MotionPredicate, arity, evaluate, predicate_from_name


def pts(values, axis=0):
    """A point moving along x so that its distance from the origin is `values`."""
    return [(float(k), Point3(v, 0, 0)) for k, v in enumerate(values)]


def pair_scene(dist_values):
    return scene_of({"a": ("thing", pts(dist_values)), "b": ("thing", pts([0.0] * len(dist_values)))}, rate=1.0)


class TestApproaching:
    def test_decreasing(self):
        assert evaluate("approaching", ["a", "b"], (0, 2), pair_scene([3, 2, 1]))

    def test_constant(self):
        assert not evaluate("approaching", ["a", "b"], (0, 2), pair_scene([2, 2, 2]))

    def test_mixed(self):
        s = pair_scene([3, 2, 2.5])
        assert not evaluate("approaching", ["a", "b"], (0, 2), s)
        assert evaluate("approaching", ["a", "b"], (0, 1), s)

    def test_alias(self):
        assert predicate_from_name("moving_towards") is MotionPredicate.APPROACHING

    def test_out_of_span(self):
        with pytest.raises(TimeRangeError):
            evaluate("approaching", ["a", "b"], (0, 5), pair_scene([3, 2, 1]))


class TestMovingAway:
    def test_increasing(self):
        assert evaluate("moving_away", ["a", "b"], (0, 2), pair_scene([1, 2, 3]))

    def test_decreasing_is_not(self):
        assert not evaluate("moving_away", ["a", "b"], (0, 2), pair_scene([3, 2, 1]))

    def test_mixed(self):
        assert not evaluate("moving_away", ["a", "b"], (0, 2), pair_scene([1, 3, 2]))


T = frames(2.0)


class TestMovingStationary:
    def test_constant(self):
        s = scene_of({"o": ("thing", point_track(lambda t: (0, 0, 0), T))})
        assert evaluate("stationary", ["o"], (0, 2), s)
        assert not evaluate("moving", ["o"], (0, 2), s)

    def test_uniform(self):
        s = scene_of({"o": ("thing", point_track(lambda t: (t, 0, 0), T))})
        assert evaluate("moving", ["o"], (0, 2), s)
        assert not evaluate("stationary", ["o"], (0, 2), s)

    def test_slow_is_stationary(self):
        s = scene_of({"o": ("thing", point_track(lambda t: (0.005 * t, 0, 0), T))})
        assert evaluate("stationary", ["o"], (0, 2), s)


class TestGrowing:
    @staticmethod
    def scene(s0, s1):
        # cube edge chosen so the volume goes from s0 to s1 linearly
        def half(t):
            v = s0 + (s1 - s0) * t / 2.0
            e = v ** (1 / 3) / 2
            return (e, e, e)
        samples = []
        from qsground.entities import Box3
        for t in T:
            h = half(t)
            samples.append((t, Box3.from_bounds((-h[0], -h[1], -h[2]), h)))
        return scene_of({"o": ("thing", samples)})

    def test_constant(self):
        s = self.scene(1.0, 1.0)
        assert not evaluate("growing", ["o"], (0, 2), s)
        assert not evaluate("shrinking", ["o"], (0, 2), s)

    def test_doubling(self):
        assert evaluate("growing", ["o"], (0, 2), self.scene(1.0, 2.0))

    def test_within_margin(self):
        s = self.scene(2.0, 1.9)
        # 2 / 1.9 = 1.053 end to end but the check is strict monotone beyond 1.05 across the window
        assert not evaluate("growing", ["o"], (0, 2), s)
        assert 2.0 / 1.9 < 1.06


class TestParallel:
    def test_same_velocity(self):
        s = scene_of({
            "a": ("thing", point_track(lambda t: (0.3 * t, 0, 0), T)),
            "b": ("thing", point_track(lambda t: (0.3 * t, 1, 0), T)),
        })
        assert evaluate("parallel", ["a", "b"], (0, 2), s)

    def test_one_stationary(self):
        s = scene_of({
            "a": ("thing", point_track(lambda t: (0.3 * t, 0, 0), T)),
            "b": ("thing", point_track(lambda t: (0, 1, 0), T)),
        })
        assert not evaluate("parallel", ["a", "b"], (0, 2), s)

    def test_divergent(self):
        c, d = math.cos(math.radians(20)), math.sin(math.radians(20))
        s = scene_of({
            "a": ("thing", point_track(lambda t: (0.3 * t, 0, 0), T)),
            "b": ("thing", point_track(lambda t: (0.3 * c * t, 5 + 0.3 * d * t, 0), T)),
        })
        assert not evaluate("parallel", ["a", "b"], (0, 2), s)


H = (0.25, 0.25, 0.25)


def boxes(fa, fb, times=T):
    return scene_of({"a": ("thing", box_track(fa, H, times)), "b": ("thing", box_track(fb, H, times))})


class TestMergingSplitting:
    def test_closing(self):
        s = boxes(lambda t: (0.5 * t, 0, 0), lambda t: (1.0, 0, 0))
        assert evaluate("merging", ["a", "b"], (0, 2), s)
        assert not evaluate("splitting", ["a", "b"], (0, 2), s)

    def test_static_overlap(self):
        s = boxes(lambda t: (0, 0, 0), lambda t: (0.2, 0, 0))
        assert not evaluate("merging", ["a", "b"], (0, 2), s)
        assert not evaluate("splitting", ["a", "b"], (0, 2), s)

    def test_separating(self):
        s = boxes(lambda t: (0.2 + 0.5 * t, 0, 0), lambda t: (0, 0, 0))
        assert evaluate("splitting", ["a", "b"], (0, 2), s)


class TestInsideOut:
    def test_point_entering_box(self):
        s = scene_of({
            "p": ("thing", point_track(lambda t: (-1 + 0.75 * t, 0, 0), T)),
            "b": ("thing", box_track(lambda t: (0.5, 0, 0), H, T)),
        })
        assert evaluate("moving_into", ["p", "b"], (0, 2), s)

    def test_flyby(self):
        s = scene_of({
            "p": ("thing", point_track(lambda t: (-1 + t, 2, 0), T)),
            "b": ("thing", box_track(lambda t: (0, 0, 0), H, T)),
        })
        assert not evaluate("moving_into", ["p", "b"], (0, 2), s)
        assert not evaluate("moving_out", ["p", "b"], (0, 2), s)

    def test_box_leaving_container(self):
        small = (0.1, 0.1, 0.1)
        s = scene_of({
            "a": ("thing", box_track(lambda t: (0.5 * t, 0, 0), small, T)),
            "b": ("thing", box_track(lambda t: (0, 0, 0), (0.4, 0.4, 0.4), T)),
        })
        assert evaluate("moving_out", ["a", "b"], (0, 2), s)
        assert not evaluate("moving_into", ["a", "b"], (0, 2), s)


class TestAttached:
    def test_held_cup(self):
        s = scene_of({
            "h": ("thing", point_track(lambda t: (0.3 * t, 0, 0.2), T)),
            "c": ("cup", box_track(lambda t: (0.3 * t, 0, 0.1), (0.05, 0.05, 0.1), T)),
        })
        assert evaluate("attached", ["h", "c"], (0, 2), s)

    def test_touch_then_separate(self):
        s = scene_of({
            "h": ("thing", point_track(lambda t: (0.3 * t, 0, 0.2), T)),
            "c": ("cup", box_track(lambda t: (0, 0, 0.1), (0.05, 0.05, 0.1), T)),
        })
        assert not evaluate("attached", ["h", "c"], (0, 2), s)

    def test_sliding_contact(self):
        s = scene_of({
            "h": ("thing", point_track(lambda t: (-0.5 + 0.5 * t, 0, 0.2), T)),
            "c": ("table", box_track(lambda t: (0, 0, 0.1), (1, 1, 0.1), T)),
        })
        assert not evaluate("attached", ["h", "c"], (0, 2), s)


def arc(total_angle, n, r=1.0):
    times = [k / 30 for k in range(n + 1)]
    return [(t, Point3(r * math.cos(total_angle * k / n), r * math.sin(total_angle * k / n), 0))
            for k, t in enumerate(times)], times[-1]


class TestShapes:
    def test_straight(self):
        s = scene_of({"o": ("thing", point_track(lambda t: (t, 0, 0), T))})
        assert not evaluate("curved", ["o"], (0, 2), s)
        assert not evaluate("cyclic", ["o"], (0, 2), s)

    def test_full_circle(self):
        samples, end = arc(2 * math.pi, 36)
        s = scene_of({"o": ("thing", samples)})
        assert evaluate("cyclic", ["o"], (0, end), s)

    def test_quarter(self):
        samples, end = arc(math.pi / 2, 36)
        s = scene_of({"o": ("thing", samples)})
        assert evaluate("curved", ["o"], (0, end), s)
        assert not evaluate("cyclic", ["o"], (0, end), s)


class TestPassing:
    @staticmethod
    def scene(x):
        obs = [(t, OrientedPoint(Point3(0, 0, 0), (1, 0, 0))) for t in T]
        mover = point_track(lambda t: (x, -1 + t, 0), T)
        return scene_of({"m": ("thing", mover), "obs": ("thing", obs)})

    def test_in_front(self):
        s = self.scene(1.0)
        assert evaluate("passing_in_front", ["m", "obs"], (0, 2), s)
        assert not evaluate("passing_behind", ["m", "obs"], (0, 2), s)

    def test_behind(self):
        s = self.scene(-1.0)
        assert evaluate("passing_behind", ["m", "obs"], (0, 2), s)
        assert not evaluate("passing_in_front", ["m", "obs"], (0, 2), s)

    def test_bystander(self):
        obs = [(t, OrientedPoint(Point3(0, 0, 0), (1, 0, 0))) for t in T]
        s = scene_of({"m": ("thing", point_track(lambda t: (1, 1, 0), T)), "obs": ("thing", obs)})
        assert not evaluate("passing_in_front", ["m", "obs"], (0, 2), s)
        assert not evaluate("passing_behind", ["m", "obs"], (0, 2), s)


class TestRotating:
    @staticmethod
    def scene(total):
        samples = [(t, OrientedPoint(Point3(0, 0, 0), (math.cos(total * t / 2), math.sin(total * t / 2), 0)))
                   for t in T]
        return scene_of({"o": ("thing", samples)})

    def test_none(self):
        s = self.scene(0.0)
        assert not evaluate("rotating_ccw", ["o"], (0, 2), s)
        assert not evaluate("rotating_cw", ["o"], (0, 2), s)

    def test_ccw(self):
        assert evaluate("rotating_ccw", ["o"], (0, 2), self.scene(math.pi / 2))

    def test_cw(self):
        s = self.scene(-math.pi / 4)
        assert evaluate("rotating_cw", ["o"], (0, 2), s)
        assert not evaluate("rotating_ccw", ["o"], (0, 2), s)


def test_arity():
    assert arity(MotionPredicate.MOVING) == 1
    assert arity(MotionPredicate.APPROACHING) == 2


# --- properties ---------------------------------------------------------------

profile = st.lists(st.floats(0.0, 2.0), min_size=4, max_size=8)


def profile_scene(knots, duration=2.0):
    n = len(knots) - 1
    def x(t):
        u = t / duration * n
        k = min(int(u), n - 1)
        return knots[k] + (knots[k + 1] - knots[k]) * (u - k)
    times = frames(duration)
    return scene_of({
        "a": ("thing", point_track(lambda t: (1.0 + x(t), 0, 0), times)),
        "b": ("thing", point_track(lambda t: (0, 0, 0), times)),
    }), times


@settings(max_examples=80, deadline=None)
@given(profile, st.floats(0, 1.0), st.floats(0.4, 1.0))
def test_duality_and_symmetry(knots, start, width):
    s, _ = profile_scene(knots)
    iv = (start, start + width)
    app = evaluate("approaching", ["a", "b"], iv, s)
    assert not (app and evaluate("moving_away", ["a", "b"], iv, s))
    assert app == evaluate("approaching", ["b", "a"], iv, s)
    assert not (evaluate("moving", ["a"], iv, s) and evaluate("stationary", ["a"], iv, s))


@settings(max_examples=60, deadline=None)
@given(profile, st.floats(0, 0.6), st.floats(0.4, 1.4), st.floats(0, 1), st.floats(0, 1))
def test_sub_interval_monotonicity(knots, start, width, u, v):
    s, _ = profile_scene(knots)
    outer = (start, min(2.0, start + width))
    if outer[1] - outer[0] < 0.4 or not evaluate("approaching", ["a", "b"], outer, s):
        return
    lo = outer[0] + u * (outer[1] - outer[0] - 0.4)
    hi = lo + 0.4 + v * (outer[1] - lo - 0.4)
    assert evaluate("approaching", ["a", "b"], (lo, hi), s)


@settings(max_examples=80, deadline=None)
@given(profile, st.floats(0, 1.0), st.floats(0.4, 1.0))
def test_reported_approaching_satisfies_raw_pairwise_check(knots, start, width):
    s, times = profile_scene(knots)
    iv = (start, start + width)
    if evaluate("approaching", ["a", "b"], iv, s):
        from qsground.metrics import distance
        d = [distance("a", "b", t, s).value for t in times]
        assert oracles.decreasing_pairs_ok(times, d, *iv, w=0.2)
