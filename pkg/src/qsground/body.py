"""Declarative human-body model over 25-joint skeleton tracks.

Joints are points; limbs are line segments between two joints; the torso is
a quadrilateral region over shoulders and hips; hands, head and feet are
points at their representative joint.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .entities import (
    TOL,
    EntityError,
    LineSegment,
    Point3,
    Polygon,
    SpaceTimeHistory,
    SpatialPrimitive,
    TimeRangeError,
    polygon_plane_coords,
    signed_area_2d,
)
from .metrics import MetricValue

_SIDED = ("shoulder", "elbow", "wrist", "hand", "hand_tip", "thumb", "hip", "knee", "ankle", "foot")

JOINTS: tuple[str, ...] = ("spine_base", "spine_mid", "spine_shoulder", "neck", "head") + tuple(
    f"{name}_{side}" for side in ("left", "right") for name in _SIDED
)
JOINT_SET = frozenset(JOINTS)

MIN_CONFIDENCE = 0.3


class PartialPoseError(EntityError):
    def __init__(self, person: str, part: str, missing):
        self.missing = tuple(sorted(missing))
        super().__init__(f"{person}: body part {part!r} needs missing joints {', '.join(self.missing)}")


@dataclass(frozen=True)
class BodyPart:
    name: str
    kind: str  # point | segment | polygon
    joints: tuple[str, ...]


def _build_parts() -> dict[str, BodyPart]:
    parts = {
        "head": BodyPart("head", "point", ("head",)),
        "torso": BodyPart(
            "torso", "polygon", ("hip_left", "hip_right", "shoulder_right", "shoulder_left")
        ),
        "spine": BodyPart("spine", "segment", ("spine_base", "spine_shoulder")),
    }
    for side in ("left", "right"):
        parts[f"hand_{side}"] = BodyPart(f"hand_{side}", "point", (f"hand_{side}",))
        parts[f"foot_{side}"] = BodyPart(f"foot_{side}", "point", (f"foot_{side}",))
        parts[f"forearm_{side}"] = BodyPart(f"forearm_{side}", "segment", (f"elbow_{side}", f"wrist_{side}"))
        parts[f"upper_arm_{side}"] = BodyPart(
            f"upper_arm_{side}", "segment", (f"shoulder_{side}", f"elbow_{side}")
        )
        parts[f"thigh_{side}"] = BodyPart(f"thigh_{side}", "segment", (f"hip_{side}", f"knee_{side}"))
        parts[f"shank_{side}"] = BodyPart(f"shank_{side}", "segment", (f"knee_{side}", f"ankle_{side}"))
    return parts


BODY_PARTS: dict[str, BodyPart] = _build_parts()

# Generic names used in rules ("hand") resolve to either side.
SIDED_PARTS = {"hand", "foot", "forearm", "upper_arm", "thigh", "shank"}


def part_variants(part: str) -> tuple[str, ...]:
    if part in BODY_PARTS:
        return (part,)
    if part in SIDED_PARTS:
        return (f"{part}_left", f"{part}_right")
    raise KeyError(f"unknown body part {part!r}")


@dataclass(frozen=True)
class SkeletonPose:
    """Joint positions at one instant. Absent joints are simply not keys."""

    joints: Mapping[str, Point3]
    confidence: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "joints", dict(sorted(self.joints.items())))
        conf = {k: float(self.confidence.get(k, 1.0)) for k in self.joints}
        object.__setattr__(self, "confidence", conf)
        bad = set(self.joints) - JOINT_SET
        if bad:
            raise EntityError(f"unknown joints {sorted(bad)}")

    def __hash__(self):
        return hash(tuple(self.joints.items()))

    def tracked(self, min_confidence: float = MIN_CONFIDENCE) -> dict[str, Point3]:
        return {k: p for k, p in self.joints.items() if self.confidence[k] >= min_confidence}


@dataclass(frozen=True)
class SkeletonTrack:
    person: str
    times: tuple[float, ...]
    poses: tuple[SkeletonPose, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "poses", tuple(self.poses))
        if len(self.times) != len(self.poses):
            raise EntityError("times and poses differ in length")
        for i in range(1, len(self.times)):
            if not self.times[i] > self.times[i - 1]:
                raise EntityError(
                    f"skeleton {self.person!r}: timestamps not strictly increasing at sample {i}"
                )

    def joints_at(self, t: float, min_confidence: float = MIN_CONFIDENCE) -> dict[str, Point3]:
        """Tracked joints at t, interpolated between bracketing frames."""
        if not self.times or not (self.times[0] - 1e-9 <= t <= self.times[-1] + 1e-9):
            raise TimeRangeError(f"t={t} outside skeleton track of {self.person!r}")
        i = bisect.bisect_left(self.times, t)
        if i < len(self.times) and abs(self.times[i] - t) <= 1e-9:
            return self.poses[i].tracked(min_confidence)
        if i > 0 and abs(self.times[i - 1] - t) <= 1e-9:
            return self.poses[i - 1].tracked(min_confidence)
        t0, t1 = self.times[i - 1], self.times[i]
        s = (t - t0) / (t1 - t0)
        a = self.poses[i - 1].tracked(min_confidence)
        b = self.poses[i].tracked(min_confidence)
        out = {}
        for k in a.keys() & b.keys():
            pa, pb = a[k].array(), b[k].array()
            out[k] = Point3(*(pa + (pb - pa) * s))
        return out


def _entity_from_joints(person: str, part: BodyPart, joints: Mapping[str, Point3]) -> SpatialPrimitive:
    missing = [j for j in part.joints if j not in joints]
    if missing:
        raise PartialPoseError(person, part.name, missing)
    pts = [joints[j] for j in part.joints]
    if part.kind == "point":
        return pts[0]
    if part.kind == "segment":
        seg = LineSegment(pts[0], pts[1])
        if seg.length() <= TOL:
            raise EntityError(f"{person}: {part.name} collapses to a point")
        return seg
    ring = np.array([p.array() for p in pts])
    if signed_area_2d(polygon_plane_coords(ring)) < 0:
        pts = pts[::-1]
    return Polygon(tuple(pts))


def body_part_entity(track: SkeletonTrack, part: str, t: float,
                     min_confidence: float = MIN_CONFIDENCE) -> SpatialPrimitive:
    """Spatial primitive of a named body part of the tracked person at time t."""
    if part not in BODY_PARTS:
        raise KeyError(f"unknown body part {part!r}")
    return _entity_from_joints(track.person, BODY_PARTS[part], track.joints_at(t, min_confidence))


def angle_at(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    u, v = a - b, c - b
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu <= TOL or nv <= TOL:
        raise EntityError("joint angle needs non-degenerate segments")
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def joint_angle(track: SkeletonTrack, a: str, b: str, c: str, t: float,
                min_confidence: float = MIN_CONFIDENCE) -> MetricValue:
    """Interior angle at joint b between b->a and b->c, in [0, pi]."""
    joints = track.joints_at(t, min_confidence)
    missing = [j for j in (a, b, c) if j not in joints]
    if missing:
        raise PartialPoseError(track.person, f"angle {a}-{b}-{c}", missing)
    return MetricValue(angle_at(joints[a].array(), joints[b].array(), joints[c].array()), "rad")


def as_history(track: SkeletonTrack, part: str,
               min_confidence: float = MIN_CONFIDENCE, label: str | None = None) -> SpaceTimeHistory:
    """Space-time history of a body part; frames where it cannot be built are skipped."""
    times, prims, skipped = [], [], []
    for t, pose in zip(track.times, track.poses):
        try:
            prims.append(_entity_from_joints(track.person, BODY_PARTS[part], pose.tracked(min_confidence)))
            times.append(t)
        except EntityError:
            skipped.append(t)
    if skipped:
        warnings.warn(
            f"{track.person}/{part}: skipped {len(skipped)} frame(s) with missing joints",
            stacklevel=2,
        )
    if len(times) < 2:
        raise EntityError(f"{track.person}/{part}: fewer than 2 resolvable samples")
    return SpaceTimeHistory(label or f"{part}({track.person})", tuple(times), tuple(prims))
