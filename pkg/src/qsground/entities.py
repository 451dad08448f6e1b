"""Basic spatial and temporal entities, domain objects and space-time histories.

Spatial primitives are small frozen dataclasses. Geometry is in meters and
time in seconds; 2D work happens on the ground plane (x, y).
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

TOL = 1e-7
UNIT_TOL = 1e-9


class EntityError(ValueError):
    """Raised when an entity or history violates its invariants."""


class TimeRangeError(ValueError):
    """Raised when a time lies outside a history's span."""


class DegenerateGeometryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "z", float(self.z))

    @classmethod
    def of(cls, xyz: Sequence[float]) -> "Point3":
        return cls(*xyz)

    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class OrientedPoint:
    p: Point3
    v: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))


@dataclass(frozen=True)
class LineSegment:
    p1: Point3
    p2: Point3

    def direction(self) -> np.ndarray:
        return self.p2.array() - self.p1.array()

    def length(self) -> float:
        return float(np.linalg.norm(self.direction()))


@dataclass(frozen=True)
class PolyLine:
    vertices: tuple[Point3, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Point3, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))

    def array(self) -> np.ndarray:
        return np.array([v.array() for v in self.vertices])


@dataclass(frozen=True)
class Box3:
    min: Point3
    max: Point3

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float]) -> "Box3":
        return cls(Point3.of(lo), Point3.of(hi))

    def lo(self) -> np.ndarray:
        return self.min.array()

    def hi(self) -> np.ndarray:
        return self.max.array()


SpatialPrimitive = Union[Point3, OrientedPoint, LineSegment, PolyLine, Polygon, Box3]

KIND_NAMES = {
    Point3: "point",
    OrientedPoint: "oriented_point",
    LineSegment: "segment",
    PolyLine: "polyline",
    Polygon: "polygon",
    Box3: "box",
}


def kind_of(entity: SpatialPrimitive) -> str:
    try:
        return KIND_NAMES[type(entity)]
    except KeyError:
        raise EntityError(f"not a spatial primitive: {entity!r}") from None


@dataclass(frozen=True)
class TimeInterval:
    t1: float
    t2: float

    def __post_init__(self):
        if not (math.isfinite(self.t1) and math.isfinite(self.t2)):
            raise EntityError("interval endpoints must be finite")
        if not self.t1 < self.t2:
            raise EntityError(f"interval needs t1 < t2, got [{self.t1}, {self.t2}]")

    @property
    def duration(self) -> float:
        return self.t2 - self.t1

    def contains(self, t: float, tol: float = 0.0) -> bool:
        return self.t1 - tol <= t <= self.t2 + tol

    def as_list(self) -> list[float]:
        return [self.t1, self.t2]


@dataclass(frozen=True)
class DomainObject:
    id: str
    cls: str


# --- validation -------------------------------------------------------------


@dataclass
class ValidityReport:
    violations: list[str] = field(default_factory=list)
    suggestion: SpatialPrimitive | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def signed_area_2d(xy: np.ndarray) -> float:
    """Shoelace formula; positive for counter-clockwise rings."""
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def newell_normal(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    return np.array([
        np.sum((pts[:, 1] - nxt[:, 1]) * (pts[:, 2] + nxt[:, 2])),
        np.sum((pts[:, 2] - nxt[:, 2]) * (pts[:, 0] + nxt[:, 0])),
        np.sum((pts[:, 0] - nxt[:, 0]) * (pts[:, 1] + nxt[:, 1])),
    ])


def polygon_plane_coords(pts: np.ndarray) -> np.ndarray:
    """2D coordinates of a planar ring, dropping its dominant normal axis.

    Horizontal polygons keep (x, y), so orientation is judged looking down
    from +z. Vertical ones are judged from the positive side of their
    dominant axis.
    """
    n = newell_normal(pts)
    if abs(n[2]) >= TOL and abs(n[2]) >= 0.5 * max(abs(n[0]), abs(n[1])):
        return pts[:, [0, 1]]
    if abs(n[0]) >= abs(n[1]):
        return pts[:, [1, 2]]
    return pts[:, [2, 0]]


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_intersect_2d(p1, p2, q1, q2, tol: float = TOL) -> bool:
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
            and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol
        )

    if abs(d1) <= tol and on_seg(q1, q2, p1):
        return True
    if abs(d2) <= tol and on_seg(q1, q2, p2):
        return True
    if abs(d3) <= tol and on_seg(p1, p2, q1):
        return True
    if abs(d4) <= tol and on_seg(p1, p2, q2):
        return True
    return False


def _self_intersects(xy: np.ndarray, closed: bool) -> bool:
    n = len(xy)
    edges = [(i, (i + 1) % n) for i in range(n if closed else n - 1)]
    for a in range(len(edges)):
        for b in range(a + 1, len(edges)):
            i1, i2 = edges[a]
            j1, j2 = edges[b]
            if len({i1, i2, j1, j2}) < 4:
                continue  # adjacent edges share a vertex
            if segments_intersect_2d(xy[i1], xy[i2], xy[j1], xy[j2]):
                return True
    return False


def _finite(*vals: float) -> bool:
    return all(math.isfinite(v) for v in vals)


def validate(entity: SpatialPrimitive) -> ValidityReport:
    """Check an entity against its invariants, returning every violation."""
    rep = ValidityReport()
    if isinstance(entity, Point3):
        if not _finite(entity.x, entity.y, entity.z):
            rep.violations.append("point coordinates must be finite")
    elif isinstance(entity, OrientedPoint):
        rep.violations.extend(validate(entity.p).violations)
        norm = math.sqrt(sum(c * c for c in entity.v))
        if not math.isfinite(norm) or abs(norm - 1.0) > UNIT_TOL:
            rep.violations.append(f"orientation must be a unit vector (norm={norm:.12g})")
    elif isinstance(entity, LineSegment):
        rep.violations.extend(validate(entity.p1).violations)
        rep.violations.extend(validate(entity.p2).violations)
        if entity.length() <= TOL:
            rep.violations.append("segment endpoints coincide")
    elif isinstance(entity, PolyLine):
        if len(entity.vertices) < 2:
            rep.violations.append("polyline needs at least 2 vertices")
            return rep
        for v in entity.vertices:
            rep.violations.extend(validate(v).violations)
        xy = np.array([v.xy() for v in entity.vertices])
        if _self_intersects(xy, closed=False):
            rep.violations.append("polyline self-intersects in the ground plane")
    elif isinstance(entity, Polygon):
        if len(entity.vertices) < 3:
            rep.violations.append("polygon needs at least 3 vertices")
            return rep
        for v in entity.vertices:
            rep.violations.extend(validate(v).violations)
        if rep.violations:
            return rep
        pts = entity.array()
        n = newell_normal(pts)
        nn = np.linalg.norm(n)
        if nn <= TOL:
            # a symmetric bow-tie has zero net area; name the real cause
            if _self_intersects(pts[:, :2], closed=True):
                rep.violations.append("polygon boundary self-intersects")
            else:
                rep.violations.append("polygon is degenerate (zero area)")
            return rep
        unit = n / nn
        offsets = (pts - pts[0]) @ unit
        if np.max(np.abs(offsets)) > 1e-6:
            rep.violations.append("polygon vertices are not coplanar")
        xy = polygon_plane_coords(pts)
        if _self_intersects(xy, closed=True):
            rep.violations.append("polygon boundary self-intersects")
        elif signed_area_2d(xy) < 0:
            rep.violations.append("polygon vertices are ordered clockwise")
            rep.suggestion = Polygon(tuple(reversed(entity.vertices)))
    elif isinstance(entity, Box3):
        rep.violations.extend(validate(entity.min).violations)
        rep.violations.extend(validate(entity.max).violations)
        if not np.all(entity.lo() < entity.hi()):
            rep.violations.append("box needs min < max on every axis")
    else:
        rep.violations.append(f"unsupported entity type {type(entity).__name__}")
    return rep


def checked(entity: SpatialPrimitive) -> SpatialPrimitive:
    rep = validate(entity)
    if not rep.ok:
        raise EntityError("; ".join(rep.violations))
    return entity


# --- geometry helpers shared by the other modules ----------------------------


def centroid(entity: SpatialPrimitive) -> np.ndarray:
    if isinstance(entity, Point3):
        return entity.array()
    if isinstance(entity, OrientedPoint):
        return entity.p.array()
    if isinstance(entity, LineSegment):
        return 0.5 * (entity.p1.array() + entity.p2.array())
    if isinstance(entity, (PolyLine, Polygon)):
        return np.mean([v.array() for v in entity.vertices], axis=0)
    if isinstance(entity, Box3):
        return 0.5 * (entity.lo() + entity.hi())
    raise EntityError(f"unsupported entity type {type(entity).__name__}")


def _lerp(a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
    return a + (b - a) * s


def _p(arr) -> Point3:
    return Point3(float(arr[0]), float(arr[1]), float(arr[2]))


def interpolate(a: SpatialPrimitive, b: SpatialPrimitive, s: float) -> SpatialPrimitive:
    """Componentwise linear blend of two same-kind primitives, 0 <= s <= 1."""
    if isinstance(a, Point3):
        return _p(_lerp(a.array(), b.array(), s))
    if isinstance(a, OrientedPoint):
        v = _lerp(np.array(a.v), np.array(b.v), s)
        n = np.linalg.norm(v)
        if n <= TOL:
            v = np.array(a.v if s < 0.5 else b.v)
        else:
            v = v / n
        return OrientedPoint(_p(_lerp(a.p.array(), b.p.array(), s)), tuple(v))
    if isinstance(a, LineSegment):
        return LineSegment(
            _p(_lerp(a.p1.array(), b.p1.array(), s)), _p(_lerp(a.p2.array(), b.p2.array(), s))
        )
    if isinstance(a, (PolyLine, Polygon)):
        verts = tuple(
            _p(_lerp(u.array(), w.array(), s)) for u, w in zip(a.vertices, b.vertices)
        )
        return type(a)(verts)
    if isinstance(a, Box3):
        return Box3(_p(_lerp(a.lo(), b.lo(), s)), _p(_lerp(a.hi(), b.hi(), s)))
    raise EntityError(f"unsupported entity type {type(a).__name__}")


# --- space-time histories ----------------------------------------------------


@dataclass(frozen=True)
class SpaceTimeHistory:
    """Timestamped spatial primitives of one domain object."""

    object: str
    times: tuple[float, ...]
    primitives: tuple[SpatialPrimitive, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        prims = tuple(self.primitives)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "primitives", prims)
        if len(times) != len(prims):
            raise EntityError("times and primitives differ in length")
        if not times:
            raise EntityError(f"history of {self.object!r} has no samples")
        for i in range(1, len(times)):
            if not times[i] > times[i - 1]:
                raise EntityError(
                    f"history of {self.object!r}: timestamps not strictly increasing at sample {i}"
                )
        kinds = {kind_of(p) for p in prims}
        if len(kinds) > 1:
            raise EntityError(f"history of {self.object!r} mixes primitive kinds {sorted(kinds)}")
        if isinstance(prims[0], (Polygon, PolyLine)):
            counts = {len(p.vertices) for p in prims}
            if len(counts) > 1:
                raise EntityError(f"history of {self.object!r}: vertex count changes between samples")

    @classmethod
    def from_samples(cls, object_id: str, samples: Iterable[tuple[float, SpatialPrimitive]]):
        samples = list(samples)
        return cls(object_id, tuple(t for t, _ in samples), tuple(p for _, p in samples))

    @property
    def kind(self) -> str:
        return kind_of(self.primitives[0])

    def __len__(self) -> int:
        return len(self.times)

    def samples(self):
        return list(zip(self.times, self.primitives))

    def covers(self, t: float) -> bool:
        return self.times[0] - 1e-9 <= t <= self.times[-1] + 1e-9


def span(h: SpaceTimeHistory) -> TimeInterval:
    if len(h.times) < 2:
        raise EntityError(f"history of {h.object!r} has a single sample; span is degenerate")
    return TimeInterval(h.times[0], h.times[-1])


def sample_at(h: SpaceTimeHistory, t: float) -> SpatialPrimitive:
    """The object's primitive at time t, linearly interpolated between samples."""
    lo, hi = h.times[0], h.times[-1]
    if not (lo - 1e-9 <= t <= hi + 1e-9):
        raise TimeRangeError(f"t={t} outside history span [{lo}, {hi}] of {h.object!r}")
    i = bisect.bisect_left(h.times, t)
    if i < len(h.times) and abs(h.times[i] - t) <= 1e-9:
        return h.primitives[i]
    if i > 0 and abs(h.times[i - 1] - t) <= 1e-9:
        return h.primitives[i - 1]
    t0, t1 = h.times[i - 1], h.times[i]
    a, b = h.primitives[i - 1], h.primitives[i]
    s = (t - t0) / (t1 - t0)
    out = interpolate(a, b, s)
    if isinstance(out, Polygon) and not validate(out).ok:
        warnings.warn(
            f"interpolated polygon of {h.object!r} at t={t} is invalid; using nearest sample",
            DegenerateGeometryWarning,
            stacklevel=2,
        )
        return a if s < 0.5 else b
    return out
