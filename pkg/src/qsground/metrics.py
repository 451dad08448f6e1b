"""Quantitative property functions of objects over time.

These are the numbers every qualitative relation is computed from:
position, size, distance, angle, movement velocity, movement direction and
rotation. Objects are referred to by id or by a body-part reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entities import (
    TOL,
    Box3,
    EntityError,
    LineSegment,
    OrientedPoint,
    Point3,
    Polygon,
    PolyLine,
    SpatialPrimitive,
    centroid,
    polygon_plane_coords,
    signed_area_2d,
)
from .geometry import min_distance

UNITS = ("m", "m2", "m3", "m/s", "rad", "rad/s")


class OrientationError(ValueError):
    pass


class IntervalError(ValueError):
    pass


class DirectionUndefinedError(ValueError):
    pass


@dataclass(frozen=True)
class MetricValue:
    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        if not math.isfinite(self.value):
            raise ValueError("metric value must be finite")

    def __float__(self) -> float:
        return self.value


# --- primitive-level ---------------------------------------------------------


def primitive_size(e: SpatialPrimitive) -> MetricValue:
    if isinstance(e, (Point3, OrientedPoint)):
        return MetricValue(0.0, "m")
    if isinstance(e, LineSegment):
        return MetricValue(e.length(), "m")
    if isinstance(e, PolyLine):
        vs = np.array([v.array() for v in e.vertices])
        return MetricValue(float(np.sum(np.linalg.norm(np.diff(vs, axis=0), axis=1))), "m")
    if isinstance(e, Polygon):
        return MetricValue(abs(signed_area_2d(polygon_plane_coords(e.array()))), "m2")
    if isinstance(e, Box3):
        return MetricValue(float(np.prod(e.hi() - e.lo())), "m3")
    raise EntityError(f"unsupported entity {type(e).__name__}")


def characteristic_length(e: SpatialPrimitive) -> float:
    size = primitive_size(e)
    if size.unit == "m3":
        return size.value ** (1.0 / 3.0)
    if size.unit == "m2":
        return math.sqrt(size.value)
    return size.value


def orientation_vector(e: SpatialPrimitive) -> np.ndarray | None:
    """Direction carried by the primitive itself, or None for bare points."""
    if isinstance(e, OrientedPoint):
        return np.array(e.v)
    if isinstance(e, LineSegment):
        d = e.direction()
        return d / np.linalg.norm(d)
    if isinstance(e, (PolyLine, Polygon)):
        vs = [v.array() for v in e.vertices]
        n = len(vs) if isinstance(e, Polygon) else len(vs) - 1
        edges = [vs[(i + 1) % len(vs)] - vs[i] for i in range(n)]
        longest = max(edges, key=lambda d: float(np.linalg.norm(d)))
        return longest / np.linalg.norm(longest)
    if isinstance(e, Box3):
        ext = e.hi() - e.lo()
        axis = np.zeros(3)
        axis[int(np.argmax(ext))] = 1.0
        return axis
    return None


def unsigned_angle(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= TOL or nv <= TOL:
        raise OrientationError("angle needs non-zero vectors")
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


# --- scene-level -------------------------------------------------------------


def _entity(scene, o, t):
    scene.check_time(o, t)
    return scene.entity_at(o, t)


def position(o, t: float, scene) -> Point3:
    return Point3(*centroid(_entity(scene, o, t)))


def size(o, t: float, scene) -> MetricValue:
    return primitive_size(_entity(scene, o, t))


def distance(o1, o2, t: float, scene) -> MetricValue:
    return MetricValue(min_distance(_entity(scene, o1, t), _entity(scene, o2, t)), "m")


def _motion_vector(o, t: float, scene, half: float = 0.1) -> np.ndarray | None:
    h = scene.history(o)
    lo, hi = max(h.times[0], t - half), min(h.times[-1], t + half)
    if hi - lo <= 0:
        return None
    d = position(o, hi, scene).array() - position(o, lo, scene).array()
    if np.linalg.norm(d) <= TOL:
        return None
    return d / np.linalg.norm(d)


def orientation(o, t: float, scene) -> np.ndarray:
    """Orientation of an object at t; bare points fall back to motion direction."""
    v = orientation_vector(_entity(scene, o, t))
    if v is None:
        v = _motion_vector(o, t, scene)
    if v is None:
        raise OrientationError(f"orientation of {o} undefined at t={t}")
    return v


def angle(o1, o2, t: float, scene) -> MetricValue:
    return MetricValue(unsigned_angle(orientation(o1, t, scene), orientation(o2, t, scene)), "rad")


def _check_interval(t1: float, t2: float) -> None:
    if not t1 < t2:
        raise IntervalError(f"need t1 < t2, got {t1}, {t2}")


def movement_velocity(o, t1: float, t2: float, scene) -> MetricValue:
    _check_interval(t1, t2)
    d = position(o, t2, scene).array() - position(o, t1, scene).array()
    return MetricValue(float(np.linalg.norm(d)) / (t2 - t1), "m/s")


def movement_direction(o, t1: float, t2: float, scene, tol: float = TOL) -> MetricValue:
    """Ground-plane azimuth of the displacement, in [0, 2pi), CCW from +x."""
    _check_interval(t1, t2)
    d = position(o, t2, scene).array() - position(o, t1, scene).array()
    if math.hypot(d[0], d[1]) <= tol:
        raise DirectionUndefinedError(f"{o} does not move in the ground plane over [{t1}, {t2}]")
    az = math.atan2(d[1], d[0]) % (2.0 * math.pi)
    return MetricValue(az, "rad")


def yaw(v: np.ndarray) -> float:
    if math.hypot(v[0], v[1]) <= TOL:
        raise OrientationError("orientation has no ground-plane component")
    return math.atan2(v[1], v[0])


def rotation(o, t1: float, t2: float, scene) -> MetricValue:
    """Signed ground-plane heading change, accumulated sample to sample (CCW > 0)."""
    _check_interval(t1, t2)
    stamps = [t1] + [t for t in scene.history(o).times if t1 < t < t2] + [t2]
    yaws = [yaw(orientation(o, t, scene)) for t in stamps]
    total = sum(wrap_angle(b - a) for a, b in zip(yaws, yaws[1:]))
    return MetricValue(total, "rad")
