"""Minimum-distance kernels between spatial primitives.

Every primitive is decomposed into convex pieces (points, segments,
triangles, boxes); the distance between two primitives is the minimum over
piece pairs.
"""

from __future__ import annotations

import math

import numpy as np

from .entities import (
    Box3,
    LineSegment,
    OrientedPoint,
    Point3,
    Polygon,
    PolyLine,
    SpatialPrimitive,
    polygon_plane_coords,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def point_box(p: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    gap = np.maximum(np.maximum(lo - p, p - hi), 0.0)
    return float(np.linalg.norm(gap))


def point_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(np.dot(ab, ab))
    s = 0.0 if denom == 0.0 else min(1.0, max(0.0, float(np.dot(p - a, ab)) / denom))
    return float(np.linalg.norm(p - (a + s * ab)))


def segment_segment(p1, q1, p2, q2) -> float:
    """Closest distance between two 3D segments (clamped parametric solve)."""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a, e, f = float(d1 @ d1), float(d2 @ d2), float(d2 @ r)
    if a <= 1e-18 and e <= 1e-18:
        return float(np.linalg.norm(r))
    if a <= 1e-18:
        s, t = 0.0, min(1.0, max(0.0, f / e))
    else:
        c = float(d1 @ r)
        if e <= 1e-18:
            t, s = 0.0, min(1.0, max(0.0, -c / a))
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > 1e-18 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t, s = 0.0, min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t, s = 1.0, min(1.0, max(0.0, (b - c) / a))
    return float(np.linalg.norm((p1 + d1 * s) - (p2 + d2 * t)))


def point_triangle(p, a, b, c) -> float:
    """Distance from p to the filled triangle abc (Ericson's region test)."""
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return float(np.linalg.norm(p - a))
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return float(np.linalg.norm(p - b))
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        v = d1 / (d1 - d3)
        return float(np.linalg.norm(p - (a + v * ab)))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return float(np.linalg.norm(p - c))
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        w = d2 / (d2 - d6)
        return float(np.linalg.norm(p - (a + w * ac)))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return float(np.linalg.norm(p - (b + w * (c - b))))
    denom = 1.0 / (va + vb + vc)
    v, w = vb * denom, vc * denom
    return float(np.linalg.norm(p - (a + ab * v + ac * w)))


def _segment_crosses_triangle(p, q, a, b, c) -> bool:
    n = np.cross(b - a, c - a)
    dp, dq = n @ (p - a), n @ (q - a)
    if dp * dq > 0 or dp == dq:
        return False
    s = dp / (dp - dq)
    x = p + s * (q - p)
    for u, v in ((a, b), (b, c), (c, a)):
        if np.cross(v - u, x - u) @ n < -1e-15:
            return False
    return True


def segment_triangle(p, q, tri) -> float:
    a, b, c = tri
    if _segment_crosses_triangle(p, q, a, b, c):
        return 0.0
    return min(
        point_triangle(p, a, b, c),
        point_triangle(q, a, b, c),
        segment_segment(p, q, a, b),
        segment_segment(p, q, b, c),
        segment_segment(p, q, c, a),
    )


def segment_box(p, q, lo, hi) -> float:
    # distance to a box along a segment is convex in the segment parameter
    f = lambda s: point_box(p + s * (q - p), lo, hi)  # noqa: E731
    a, b = 0.0, 1.0
    x1, x2 = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(80):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return min(f(0.0), f(1.0), f1, f2)


def box_box(lo1, hi1, lo2, hi2) -> float:
    gap = np.maximum(np.maximum(lo1 - hi2, lo2 - hi1), 0.0)
    return float(np.linalg.norm(gap))


def _box_edges(lo, hi):
    corners = [np.array([x, y, z]) for x in (lo[0], hi[0]) for y in (lo[1], hi[1]) for z in (lo[2], hi[2])]
    edges = []
    for i in range(8):
        for j in range(i + 1, 8):
            if int(np.sum(corners[i] != corners[j])) == 1:
                edges.append((corners[i], corners[j]))
    return edges


def _triangle_box_overlap(tri, lo, hi) -> bool:
    """Separating-axis test between a triangle and an axis-aligned box."""
    centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    v = [t - centre for t in tri]
    e = [v[1] - v[0], v[2] - v[1], v[0] - v[2]]
    axes = [np.eye(3)[i] for i in range(3)]
    axes.append(np.cross(e[0], e[1]))
    for ei in e:
        for i in range(3):
            axes.append(np.cross(np.eye(3)[i], ei))
    for ax in axes:
        if float(ax @ ax) < 1e-24:
            continue
        proj = [float(ax @ vi) for vi in v]
        r = float(np.sum(half * np.abs(ax)))
        if min(proj) > r + 1e-12 or max(proj) < -r - 1e-12:
            return False
    return True


def triangle_box(tri, lo, hi) -> float:
    if _triangle_box_overlap(tri, lo, hi):
        return 0.0
    a, b, c = tri
    best = min(segment_box(u, w, lo, hi) for u, w in ((a, b), (b, c), (c, a)))
    for u, w in _box_edges(lo, hi):
        best = min(best, segment_triangle(u, w, tri))
    return best


def triangle_triangle(t1, t2) -> float:
    best = math.inf
    for u, w in ((t1[0], t1[1]), (t1[1], t1[2]), (t1[2], t1[0])):
        best = min(best, segment_triangle(u, w, t2))
    for u, w in ((t2[0], t2[1]), (t2[1], t2[2]), (t2[2], t2[0])):
        best = min(best, segment_triangle(u, w, t1))
    return best


def triangulate(poly: Polygon) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Ear-clipping triangulation of a simple planar polygon."""
    pts = poly.array()
    xy = polygon_plane_coords(pts)
    idx = list(range(len(pts)))
    area = 0.5 * sum(xy[i, 0] * xy[(i + 1) % len(xy), 1] - xy[(i + 1) % len(xy), 0] * xy[i, 1]
                     for i in range(len(xy)))
    if area < 0:
        idx.reverse()
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    guard = 0
    while len(idx) > 3 and guard < 10_000:
        guard += 1
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            if cross(xy[i0], xy[i1], xy[i2]) <= 0:
                continue
            if any(
                cross(xy[i0], xy[i1], xy[j]) >= 0 and cross(xy[i1], xy[i2], xy[j]) >= 0
                and cross(xy[i2], xy[i0], xy[j]) >= 0
                for j in idx if j not in (i0, i1, i2)
            ):
                continue
            tris.append((pts[i0], pts[i1], pts[i2]))
            idx.pop(k)
            break
        else:
            break
    if len(idx) >= 3:
        for k in range(1, len(idx) - 1):
            tris.append((pts[idx[0]], pts[idx[k]], pts[idx[k + 1]]))
    return tris


def convex_pieces(e: SpatialPrimitive) -> list[tuple]:
    if isinstance(e, Point3):
        return [("p", e.array())]
    if isinstance(e, OrientedPoint):
        return [("p", e.p.array())]
    if isinstance(e, LineSegment):
        return [("s", e.p1.array(), e.p2.array())]
    if isinstance(e, PolyLine):
        vs = [v.array() for v in e.vertices]
        return [("s", vs[i], vs[i + 1]) for i in range(len(vs) - 1)]
    if isinstance(e, Polygon):
        return [("t", tri) for tri in triangulate(e)]
    if isinstance(e, Box3):
        return [("b", e.lo(), e.hi())]
    raise TypeError(f"unsupported primitive {type(e).__name__}")


def _piece_distance(a, b) -> float:
    ka, kb = a[0], b[0]
    order = "psbt"
    if order.index(ka) > order.index(kb):
        a, b, ka, kb = b, a, kb, ka
    if ka == "p":
        p = a[1]
        if kb == "p":
            return float(np.linalg.norm(p - b[1]))
        if kb == "s":
            return point_segment(p, b[1], b[2])
        if kb == "b":
            return point_box(p, b[1], b[2])
        return point_triangle(p, *b[1])
    if ka == "s":
        if kb == "s":
            return segment_segment(a[1], a[2], b[1], b[2])
        if kb == "b":
            return segment_box(a[1], a[2], b[1], b[2])
        return segment_triangle(a[1], a[2], b[1])
    if ka == "b":
        if kb == "b":
            return box_box(a[1], a[2], b[1], b[2])
        return triangle_box(b[1], a[1], a[2])
    return triangle_triangle(a[1], b[1])


def min_distance(e1: SpatialPrimitive, e2: SpatialPrimitive) -> float:
    return min(_piece_distance(a, b) for a in convex_pieces(e1) for b in convex_pieces(e2))
