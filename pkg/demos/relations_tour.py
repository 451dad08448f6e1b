"""
Qualitative relations between shapes
====================================

Topology, block algebra, left/right, facing, distance and size labels for a
handful of hand-picked configurations, followed by interval reasoning with
the Allen composition table.
"""

import math

from qsground.entities import Box3, LineSegment, OrientedPoint, Point3, Polygon
from qsground.metrics import MetricValue
from qsground.relations import (
    block_relation,
    compose,
    interval_relation,
    lr,
    qdc_label,
    relative_orientation,
    size_label,
    topology,
)


def box(x0, y0, x1, y1):
    return Box3.from_bounds((x0, y0, 0.0), (x1, y1, 1.0))


# Region topology: a tray, a cup standing on it, and a cup beside it.
tray, cup, neighbour = box(0, 0, 4, 3), box(1, 1, 2, 2), box(4, 0, 5, 1)
print("cup vs tray:      ", topology(cup, tray).value)
print("tray vs cup:      ", topology(tray, cup).value)
print("neighbour vs tray:", topology(neighbour, tray).value)

# Polygons give the same answer as boxes of the same footprint.
square = Polygon(tuple(Point3(x, y) for x, y in ((1, 1), (2, 1), (2, 2), (1, 2))))
print("polygon cup vs tray:", topology(square, tray).value)

# Block algebra keeps one Allen label per axis.
print("blocks cup vs tray:", [r.value for r in block_relation(cup, tray, axes=3)])

# Left/right of a directed segment.
edge = LineSegment(Point3(0, 0), Point3(2, 0))
for p in ((1, 1), (1, -1), (3, 0), (1, 0)):
    print(f"point {p} w.r.t. edge:", lr(edge, Point3(*p)).value)

# Facing and alignment of oriented points (heading vectors on the ground plane).
a = OrientedPoint(Point3(0, 0), (1.0, 0.0, 0.0))
b = OrientedPoint(Point3(2, 0), (-1.0, 0.0, 0.0))
rel = relative_orientation(a, b)
print("a vs b:", rel.facing.value, "/", rel.alignment.value)
c = OrientedPoint(Point3(0, 2), (math.cos(0.2), math.sin(0.2), 0.0))
rel = relative_orientation(a, c)
print("a vs c:", rel.facing.value, "/", rel.alignment.value)

# Distance and size labels scale with the objects involved.
for d in (0.05, 0.8, 5.0):
    print(f"{d} m apart with 1 m reference:", qdc_label(d, 1.0).value)
print("0.2 m3 vs 0.5 m3:", size_label(MetricValue(0.2, "m3"), MetricValue(0.5, "m3")).value)

# Intervals: relations, converses and composition.
reach, grasp, lift = (0.0, 1.0), (1.0, 2.5), (2.0, 3.0)
r1, r2 = interval_relation(reach, grasp), interval_relation(grasp, lift)
print(f"reach {r1.value} grasp, grasp {r2.value} lift")
print("so reach is one of", sorted(x.value for x in compose(r1, r2)), "lift")
print("actual:", interval_relation(reach, lift).value)
