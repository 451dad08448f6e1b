"""Qualitative relation families between entities and time intervals.

Families: RCC-8 topology (with RCC-5 and coarse coarsenings), Allen
interval relations and their composition, rectangle/block algebra, LR
point-vs-line orientation, facing/alignment of oriented points, and
qualitative distance and size. Labels are ``str`` enums so they serialize as
their lowercase names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np
import shapely
from shapely.geometry import Point as ShPoint
from shapely.geometry import Polygon as ShPolygon

from .config import DEFAULT_CONFIG, EngineConfig
from .entities import (
    TOL,
    Box3,
    LineSegment,
    OrientedPoint,
    Point3,
    Polygon,
    SpatialPrimitive,
    TimeInterval,
)
from . import metrics


class UnsupportedPairError(TypeError):
    pass


class OrientationUndefinedError(ValueError):
    pass


class UnitMismatchError(ValueError):
    pass


class Topology(str, Enum):
    DC = "dc"
    EC = "ec"
    PO = "po"
    TPP = "tpp"
    NTPP = "ntpp"
    TPPI = "tppi"
    NTPPI = "ntppi"
    EQ = "eq"

    def converse(self) -> "Topology":
        return _TOPO_CONVERSE.get(self, self)

    def rcc5(self) -> str:
        return {"dc": "dr", "ec": "dr", "po": "po", "tpp": "pp", "ntpp": "pp",
                "tppi": "ppi", "ntppi": "ppi", "eq": "eq"}[self.value]

    def coarse(self) -> frozenset[str]:
        """Coarse predicates of Table-1 style vocabularies (dr, o, c, p) that hold."""
        out = set()
        if self in (Topology.DC, Topology.EC):
            out.add("dr")
        else:
            out.add("o")
        if self is not Topology.DC:
            out.add("c")
        if self in (Topology.TPP, Topology.NTPP, Topology.EQ):
            out.add("p")
        return frozenset(out)

    def __str__(self) -> str:
        return self.value


_TOPO_CONVERSE = {
    Topology.TPP: Topology.TPPI,
    Topology.TPPI: Topology.TPP,
    Topology.NTPP: Topology.NTPPI,
    Topology.NTPPI: Topology.NTPP,
}


class Allen(str, Enum):
    BEFORE = "before"
    MEETS = "meets"
    OVERLAPS = "overlaps"
    STARTS = "starts"
    DURING = "during"
    FINISHES = "finishes"
    EQUALS = "equals"
    AFTER = "after"
    MET_BY = "met_by"
    OVERLAPPED_BY = "overlapped_by"
    STARTED_BY = "started_by"
    CONTAINS = "contains"
    FINISHED_BY = "finished_by"

    def converse(self) -> "Allen":
        return _ALLEN_CONVERSE[self]

    def __str__(self) -> str:
        return self.value


_ALLEN_CONVERSE = {
    Allen.BEFORE: Allen.AFTER, Allen.MEETS: Allen.MET_BY, Allen.OVERLAPS: Allen.OVERLAPPED_BY,
    Allen.STARTS: Allen.STARTED_BY, Allen.DURING: Allen.CONTAINS, Allen.FINISHES: Allen.FINISHED_BY,
    Allen.EQUALS: Allen.EQUALS,
}
_ALLEN_CONVERSE.update({v: k for k, v in list(_ALLEN_CONVERSE.items())})

# Alternative spellings accepted in rule text.
ALLEN_ALIASES = {"ends": Allen.FINISHES, "precedes": Allen.BEFORE, "proceeds": Allen.BEFORE}


def allen_from_name(name: str) -> Allen:
    if name in ALLEN_ALIASES:
        return ALLEN_ALIASES[name]
    return Allen(name)


class LR(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    COLLINEAR = "collinear"
    FRONT = "front"
    BACK = "back"
    ON = "on"

    def __str__(self) -> str:
        return self.value


class Orientation(str, Enum):
    FACING_TOWARDS = "facing_towards"
    FACING_AWAY = "facing_away"
    SAME_DIRECTION = "same_direction"
    OPPOSITE_DIRECTION = "opposite_direction"
    NEUTRAL = "neutral"

    def __str__(self) -> str:
        return self.value


class Qdc(str, Enum):
    ADJACENT = "adjacent"
    NEAR = "near"
    FAR = "far"

    def __str__(self) -> str:
        return self.value


class SizeRel(str, Enum):
    SMALLER = "smaller"
    EQUI_SIZED = "equi_sized"
    LARGER = "larger"

    def __str__(self) -> str:
        return self.value


# --- Allen -------------------------------------------------------------------


def _cmp(a: float, b: float, tol: float) -> int:
    if a < b - tol:
        return -1
    if a > b + tol:
        return 1
    return 0


def _bounds(i) -> tuple[float, float]:
    if isinstance(i, TimeInterval):
        return i.t1, i.t2
    return float(i[0]), float(i[1])


def interval_relation(i1, i2, tol: float = 0.0) -> Allen:
    """Allen relation of i1 to i2; endpoints within ``tol`` count as equal."""
    s1, e1 = _bounds(i1)
    s2, e2 = _bounds(i2)
    es, se = _cmp(e1, s2, tol), _cmp(s1, e2, tol)
    if es < 0:
        return Allen.BEFORE
    if se > 0:
        return Allen.AFTER
    if es == 0 and _cmp(s1, s2, tol) < 0:
        return Allen.MEETS
    if se == 0 and _cmp(e1, e2, tol) > 0:
        return Allen.MET_BY
    s, e = _cmp(s1, s2, tol), _cmp(e1, e2, tol)
    if s == 0:
        return Allen.EQUALS if e == 0 else (Allen.STARTS if e < 0 else Allen.STARTED_BY)
    if e == 0:
        return Allen.FINISHES if s > 0 else Allen.FINISHED_BY
    if s < 0:
        return Allen.OVERLAPS if e < 0 else Allen.CONTAINS
    return Allen.DURING if e < 0 else Allen.OVERLAPPED_BY


# Endpoint signature of each relation: (s1?s2, s1?e2, e1?s2, e1?e2)
_SIGNATURE = {
    Allen.BEFORE: ("<", "<", "<", "<"),
    Allen.MEETS: ("<", "<", "=", "<"),
    Allen.OVERLAPS: ("<", "<", ">", "<"),
    Allen.STARTS: ("=", "<", ">", "<"),
    Allen.DURING: (">", "<", ">", "<"),
    Allen.FINISHES: (">", "<", ">", "="),
    Allen.EQUALS: ("=", "<", ">", "="),
    Allen.AFTER: (">", ">", ">", ">"),
    Allen.MET_BY: (">", "=", ">", ">"),
    Allen.OVERLAPPED_BY: (">", "<", ">", ">"),
    Allen.STARTED_BY: ("=", "<", ">", ">"),
    Allen.CONTAINS: ("<", "<", ">", ">"),
    Allen.FINISHED_BY: ("<", "<", ">", "="),
}

_ALL_PA = frozenset("<=>")
_PA_INV = {"<": ">", ">": "<", "=": "="}


def _pa_compose(r1: frozenset, r2: frozenset) -> frozenset:
    out = set()
    for a in r1:
        for b in r2:
            if a == "=":
                out.add(b)
            elif b == "=" or a == b:
                out.add(a)
            else:
                return _ALL_PA
    return frozenset(out)


def _pa_consistent(net: list[list[frozenset]]) -> bool:
    """Path consistency over a point-algebra network; complete without '!='."""
    n = len(net)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                for k in range(n):
                    if k in (i, j):
                        continue
                    new = net[i][j] & _pa_compose(net[i][k], net[k][j])
                    if new != net[i][j]:
                        if not new:
                            return False
                        net[i][j] = new
                        net[j][i] = frozenset(_PA_INV[x] for x in new)
                        changed = True
    return True


def _pa_network(pairs: dict[tuple[int, int], str]) -> list[list[frozenset]]:
    # points: 0=s1 1=e1 2=s2 3=e2 4=s3 5=e3
    net = [[_ALL_PA if i != j else frozenset("=") for j in range(6)] for i in range(6)]

    def put(i, j, rel):
        net[i][j] = net[i][j] & frozenset(rel)
        net[j][i] = frozenset(_PA_INV[x] for x in net[i][j])

    for s, e in ((0, 1), (2, 3), (4, 5)):
        put(s, e, "<")
    for (i, j), rel in pairs.items():
        put(i, j, rel)
    return net


def _signature_pairs(rel: Allen, a: tuple[int, int], b: tuple[int, int]) -> dict:
    sa, ea = a
    sb, eb = b
    sig = _SIGNATURE[rel]
    return {(sa, sb): sig[0], (sa, eb): sig[1], (ea, sb): sig[2], (ea, eb): sig[3]}


@lru_cache(maxsize=None)
def compose(r1: Allen, r2: Allen) -> frozenset[Allen]:
    """Possible relations of (i1, i3) given r1(i1, i2) and r2(i2, i3)."""
    r1, r2 = Allen(r1), Allen(r2)
    base = {**_signature_pairs(r1, (0, 1), (2, 3)), **_signature_pairs(r2, (2, 3), (4, 5))}
    out = set()
    for cand in Allen:
        pairs = dict(base)
        pairs.update(_signature_pairs(cand, (0, 1), (4, 5)))
        if _pa_consistent(_pa_network(pairs)):
            out.add(cand)
    return frozenset(out)


# --- topology ----------------------------------------------------------------


def _box_topology_2d(lo1, hi1, lo2, hi2, tol: float) -> Topology:
    lo1, hi1, lo2, hi2 = (np.asarray(a, dtype=float)[:2] for a in (lo1, hi1, lo2, hi2))
    if np.any(lo1 > hi2 + tol) or np.any(lo2 > hi1 + tol):
        return Topology.DC
    overlap = np.minimum(hi1, hi2) - np.maximum(lo1, lo2)
    if np.any(overlap <= tol):
        return Topology.EC
    same_lo = np.abs(lo1 - lo2) <= tol
    same_hi = np.abs(hi1 - hi2) <= tol
    if np.all(same_lo) and np.all(same_hi):
        return Topology.EQ
    tangent = bool(np.any(same_lo) or np.any(same_hi))
    if np.all(lo1 >= lo2 - tol) and np.all(hi1 <= hi2 + tol):
        return Topology.TPP if tangent else Topology.NTPP
    if np.all(lo2 >= lo1 - tol) and np.all(hi2 <= hi1 + tol):
        return Topology.TPPI if tangent else Topology.NTPPI
    return Topology.PO


def _as_shapely(e: SpatialPrimitive):
    if isinstance(e, Polygon):
        return ShPolygon([v.xy() for v in e.vertices])
    if isinstance(e, Box3):
        return shapely.box(e.min.x, e.min.y, e.max.x, e.max.y)
    raise UnsupportedPairError(type(e).__name__)


def _region_topology(a, b) -> Topology:
    ga, gb = _as_shapely(a), _as_shapely(b)
    if ga.disjoint(gb):
        return Topology.DC
    if ga.touches(gb):
        return Topology.EC
    if ga.equals(gb):
        return Topology.EQ
    boundary_meet = ga.boundary.intersects(gb.boundary)
    if ga.within(gb):
        return Topology.TPP if boundary_meet else Topology.NTPP
    if gb.within(ga):
        return Topology.TPPI if boundary_meet else Topology.NTPPI
    return Topology.PO


def _point_xy(e) -> tuple[float, float] | None:
    if isinstance(e, Point3):
        return e.xy()
    if isinstance(e, OrientedPoint):
        return e.p.xy()
    return None


def _point_region(p: tuple[float, float], region, tol: float) -> Topology:
    if isinstance(region, Box3):
        x, y = p
        lo, hi = region.min, region.max
        if x < lo.x - tol or x > hi.x + tol or y < lo.y - tol or y > hi.y + tol:
            return Topology.DC
        if lo.x + tol < x < hi.x - tol and lo.y + tol < y < hi.y - tol:
            return Topology.NTPP
        return Topology.EC
    g = _as_shapely(region)
    d = g.boundary.distance(ShPoint(p))
    if d <= tol:
        return Topology.EC
    return Topology.NTPP if g.contains(ShPoint(p)) else Topology.DC


def topology(e1: SpatialPrimitive, e2: SpatialPrimitive, tol: float = TOL) -> Topology:
    """RCC-8 relation of e1 to e2 on the ground plane.

    Points are degenerate regions: they can be disconnected from, on the
    boundary of (ec) or inside (ntpp) a region.
    """
    p1, p2 = _point_xy(e1), _point_xy(e2)
    if p1 is not None and p2 is not None:
        return Topology.EQ if math.dist(p1, p2) <= tol else Topology.DC
    if p1 is not None:
        if not isinstance(e2, (Box3, Polygon)):
            raise UnsupportedPairError(f"point vs {type(e2).__name__}")
        return _point_region(p1, e2, tol)
    if p2 is not None:
        if not isinstance(e1, (Box3, Polygon)):
            raise UnsupportedPairError(f"{type(e1).__name__} vs point")
        return _point_region(p2, e1, tol).converse()
    if isinstance(e1, Box3) and isinstance(e2, Box3):
        return _box_topology_2d(e1.lo(), e1.hi(), e2.lo(), e2.hi(), tol)
    if isinstance(e1, (Box3, Polygon)) and isinstance(e2, (Box3, Polygon)):
        return _region_topology(e1, e2)
    raise UnsupportedPairError(f"{type(e1).__name__} vs {type(e2).__name__}")


# --- block algebra -----------------------------------------------------------


def block_relation(b1: Box3, b2: Box3, axes: int = 2, tol: float = 0.0) -> tuple[Allen, ...]:
    if not (isinstance(b1, Box3) and isinstance(b2, Box3)):
        raise UnsupportedPairError("block algebra needs two boxes")
    if axes not in (2, 3):
        raise ValueError("axes must be 2 or 3")
    lo1, hi1, lo2, hi2 = b1.lo(), b1.hi(), b2.lo(), b2.hi()
    return tuple(interval_relation((lo1[k], hi1[k]), (lo2[k], hi2[k]), tol) for k in range(axes))


_DISJOINT = {Allen.BEFORE, Allen.AFTER}
_TOUCH = {Allen.MEETS, Allen.MET_BY}
_INSIDE_T = {Allen.STARTS, Allen.FINISHES}
_CONTAIN_T = {Allen.STARTED_BY, Allen.FINISHED_BY}


def topology_from_blocks(labels: Sequence[Allen]) -> Topology:
    """RCC-8 relation implied by the per-axis Allen relations of two boxes."""
    labels = [Allen(x) for x in labels]
    if any(x in _DISJOINT for x in labels):
        return Topology.DC
    if any(x in _TOUCH for x in labels):
        return Topology.EC
    if all(x is Allen.EQUALS for x in labels):
        return Topology.EQ
    if all(x in _INSIDE_T | {Allen.DURING, Allen.EQUALS} for x in labels):
        tangent = any(x in _INSIDE_T | {Allen.EQUALS} for x in labels)
        return Topology.TPP if tangent else Topology.NTPP
    if all(x in _CONTAIN_T | {Allen.CONTAINS, Allen.EQUALS} for x in labels):
        tangent = any(x in _CONTAIN_T | {Allen.EQUALS} for x in labels)
        return Topology.TPPI if tangent else Topology.NTPPI
    return Topology.PO


# --- orientation -------------------------------------------------------------


def lr(seg: LineSegment, p, tol: float = TOL) -> LR:
    """Position of point p relative to the directed segment, on the ground plane."""
    a = np.array(seg.p1.xy())
    b = np.array(seg.p2.xy())
    q = np.array(_point_xy(p) if _point_xy(p) is not None else (p[0], p[1]))
    d = b - a
    L = float(np.linalg.norm(d))
    if L <= tol:
        raise ValueError("LR needs a segment with distinct ground-plane endpoints")
    cross = float(d[0] * (q - a)[1] - d[1] * (q - a)[0]) / L
    if cross > tol:
        return LR.LEFT
    if cross < -tol:
        return LR.RIGHT
    t = float(np.dot(q - a, d)) / (L * L)
    if t > 1.0 + tol / L:
        return LR.FRONT
    if t < -tol / L:
        return LR.BACK
    if -tol / L <= t <= 1.0 + tol / L:
        return LR.ON
    return LR.COLLINEAR


@dataclass(frozen=True)
class OrientationRelation:
    facing: Orientation
    alignment: Orientation

    def labels(self) -> frozenset[Orientation]:
        return frozenset({self.facing, self.alignment})


def _ground(v) -> np.ndarray:
    return np.array([v[0], v[1]], dtype=float)


def _angle2(u: np.ndarray, v: np.ndarray) -> float:
    return math.atan2(abs(u[0] * v[1] - u[1] * v[0]), float(np.dot(u, v)))


def relative_orientation(a: OrientedPoint, b: OrientedPoint,
                         config: EngineConfig = DEFAULT_CONFIG) -> OrientationRelation:
    half = config.rad("facing_half_angle_deg")
    align = config.rad("alignment_threshold_deg")
    av, bv = _ground(a.v), _ground(b.v)
    if np.linalg.norm(av) <= TOL or np.linalg.norm(bv) <= TOL:
        raise OrientationUndefinedError("orientation has no ground-plane component")
    to_b = _ground(b.p.array() - a.p.array())
    if np.linalg.norm(to_b) <= config.geometric_tolerance:
        raise OrientationUndefinedError("facing is undefined for coincident positions")
    f = _angle2(av, to_b)
    facing = (Orientation.FACING_TOWARDS if f < half
              else Orientation.FACING_AWAY if f > math.pi - half else Orientation.NEUTRAL)
    g = _angle2(av, bv)
    alignment = (Orientation.SAME_DIRECTION if g < align
                 else Orientation.OPPOSITE_DIRECTION if g > math.pi - align else Orientation.NEUTRAL)
    return OrientationRelation(facing, alignment)


# --- distance and size -------------------------------------------------------


def qdc_label(dist: float, ref_length: float, config: EngineConfig = DEFAULT_CONFIG) -> Qdc:
    L = max(ref_length, config.qdc_min_length)
    if dist < config.qdc_adjacent_factor * L:
        return Qdc.ADJACENT
    if dist < config.qdc_near_factor * L:
        return Qdc.NEAR
    return Qdc.FAR


def qdc(o1, o2, t: float, scene, config: EngineConfig = DEFAULT_CONFIG) -> Qdc:
    e1, e2 = scene.entity_at(o1, t), scene.entity_at(o2, t)
    L = max(metrics.characteristic_length(e1), metrics.characteristic_length(e2))
    return qdc_label(metrics.distance(o1, o2, t, scene).value, L, config)


def size_label(s1: metrics.MetricValue, s2: metrics.MetricValue,
               config: EngineConfig = DEFAULT_CONFIG) -> SizeRel:
    if s1.unit != s2.unit:
        raise UnitMismatchError(f"cannot compare sizes in {s1.unit} and {s2.unit}")
    a, b = s1.value, s2.value
    r = config.size_ratio
    if a == b or (b > 0 and 1.0 / r <= a / b <= r):
        return SizeRel.EQUI_SIZED
    return SizeRel.SMALLER if a < b else SizeRel.LARGER


def size_relation(o1, o2, t: float, scene, config: EngineConfig = DEFAULT_CONFIG) -> SizeRel:
    return size_label(metrics.size(o1, t, scene), metrics.size(o2, t, scene), config)


def topology_at(o1, o2, t: float, scene, config: EngineConfig = DEFAULT_CONFIG) -> Topology:
    return topology(scene.entity_at(o1, t), scene.entity_at(o2, t), config.geometric_tolerance)


def orientation_at(o1, o2, t: float, scene, config: EngineConfig = DEFAULT_CONFIG) -> OrientationRelation:
    a = OrientedPoint(metrics.position(o1, t, scene), tuple(metrics.orientation(o1, t, scene)))
    b = OrientedPoint(metrics.position(o2, t, scene), tuple(metrics.orientation(o2, t, scene)))
    return relative_orientation(a, b, config)


ALL_ALLEN = tuple(Allen)
ALL_TOPOLOGY = tuple(Topology)


def composition_table() -> dict[tuple[Allen, Allen], frozenset[Allen]]:
    return {(a, b): compose(a, b) for a, b in product(Allen, Allen)}
