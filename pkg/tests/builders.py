"""Small scene builders shared by the test modules."""

import numpy as np

from qsground.body import JOINTS, SkeletonPose, SkeletonTrack
from qsground.entities import Box3, DomainObject, Point3, SpaceTimeHistory
from qsground.scene import Scene


def frames(duration, rate=30.0):
    n = int(round(duration * rate))
    return [round(k / rate, 9) for k in range(n + 1)]


def scene_of(tracks, rate=30.0, skeletons=None):
    """tracks: {id: (cls, [(t, primitive), ...])}."""
    objects = [DomainObject(oid, cls) for oid, (cls, _) in sorted(tracks.items())]
    hist = {oid: SpaceTimeHistory.from_samples(oid, samples) for oid, (_, samples) in tracks.items()}
    skeletons = skeletons or {}
    objects += [DomainObject(pid, "person") for pid in sorted(skeletons)]
    return Scene(rate, objects, hist, skeletons)


def point_track(fn, times):
    return [(t, Point3(*fn(t))) for t in times]


def box_track(fn, half, times):
    h = np.asarray(half, dtype=float)
    out = []
    for t in times:
        c = np.asarray(fn(t), dtype=float)
        out.append((t, Box3.from_bounds(c - h, c + h)))
    return out


def skeleton(pid, hand_fn, times, base=(0.0, 0.0, 0.0)):
    """A rigid standing pose whose right hand follows hand_fn(t)."""
    bx, by, bz = base
    rest = {name: Point3(bx, by + 0.01 * k, bz + 0.05 * k) for k, name in enumerate(JOINTS)}
    poses = []
    for t in times:
        joints = dict(rest)
        joints["hand_right"] = Point3(*hand_fn(t))
        poses.append(SkeletonPose(joints, {}))
    return SkeletonTrack(pid, tuple(times), tuple(poses))
