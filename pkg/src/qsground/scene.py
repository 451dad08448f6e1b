"""Scenes: declared domain objects with their histories and skeleton tracks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from . import body
from .entities import (
    DomainObject,
    EntityError,
    Point3,
    SpaceTimeHistory,
    SpatialPrimitive,
    TimeRangeError,
    sample_at,
)


class UnknownObjectError(KeyError):
    pass


@dataclass(frozen=True)
class PartRef:
    """A body part of a person, as written ``body_part(hand_right, person1)``."""

    part: str
    person: str

    def __str__(self) -> str:
        return f"body_part({self.part},{self.person})"


Ref = Union[str, PartRef]

PERSON_ANCHOR_JOINTS = ("spine_mid", "spine_base", "spine_shoulder")


class Scene:
    def __init__(self, frame_rate: float, objects, histories: Mapping[str, SpaceTimeHistory],
                 skeletons: Mapping[str, "body.SkeletonTrack"] | None = None):
        self.frame_rate = float(frame_rate)
        self.objects: tuple[DomainObject, ...] = tuple(objects)
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise EntityError("duplicate object ids in scene")
        self._by_id = {o.id: o for o in self.objects}
        self.histories = dict(sorted(histories.items()))
        self.skeletons = dict(sorted((skeletons or {}).items()))
        for key in list(self.histories) + list(self.skeletons):
            if key not in self._by_id:
                raise EntityError(f"history/skeleton for undeclared object {key!r}")
        for key, h in self.histories.items():
            if h.object != key:
                raise EntityError(f"history keyed {key!r} belongs to {h.object!r}")
        for key, s in self.skeletons.items():
            if s.person != key:
                raise EntityError(f"skeleton keyed {key!r} belongs to {s.person!r}")
        stamps = set()
        for h in self.histories.values():
            stamps.update(h.times)
        for s in self.skeletons.values():
            stamps.update(s.times)
        self.times = np.array(sorted(stamps))
        self._cache: dict = {}

    # --- identity -------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scene):
            return NotImplemented
        return (
            self.frame_rate == other.frame_rate
            and self.objects == other.objects
            and self.histories == other.histories
            and self.skeletons == other.skeletons
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Scene({len(self.objects)} objects, {len(self.times)} frames @ {self.frame_rate} Hz)"

    def obj(self, object_id: str) -> DomainObject:
        try:
            return self._by_id[object_id]
        except KeyError:
            raise UnknownObjectError(f"unknown object {object_id!r}") from None

    def object_ids(self) -> list[str]:
        return [o.id for o in self.objects]

    def is_person(self, object_id: str) -> bool:
        return self.obj(object_id).cls == "person"

    # --- resolution -----------------------------------------------------

    def history(self, ref: Ref) -> SpaceTimeHistory:
        """History of an object or body part; persons default to their spine."""
        if ref in self._cache:
            return self._cache[ref]
        if isinstance(ref, PartRef):
            self.obj(ref.person)
            if ref.person not in self.skeletons:
                raise UnknownObjectError(f"no skeleton for {ref.person!r}")
            h = body.as_history(self.skeletons[ref.person], ref.part, label=str(ref))
        else:
            self.obj(ref)
            if ref in self.histories:
                h = self.histories[ref]
            elif ref in self.skeletons:
                h = self._anchor_history(ref)
            else:
                raise UnknownObjectError(f"object {ref!r} has no history")
        self._cache[ref] = h
        return h

    def _anchor_history(self, person: str) -> SpaceTimeHistory:
        track = self.skeletons[person]
        times, pts = [], []
        for t, pose in zip(track.times, track.poses):
            joints = pose.tracked()
            for name in PERSON_ANCHOR_JOINTS:
                if name in joints:
                    times.append(t)
                    pts.append(joints[name])
                    break
        if len(times) < 2:
            raise EntityError(f"person {person!r} has no trackable spine")
        return SpaceTimeHistory(person, tuple(times), tuple(pts))

    def has_history(self, ref: Ref) -> bool:
        try:
            self.history(ref)
            return True
        except (EntityError, KeyError):
            return False

    def entity_at(self, ref: Ref, t: float) -> SpatialPrimitive:
        return sample_at(self.history(ref), t)

    def span_of(self, *refs: Ref) -> tuple[float, float] | None:
        lo, hi = -np.inf, np.inf
        for r in refs:
            h = self.history(r)
            lo, hi = max(lo, h.times[0]), min(hi, h.times[-1])
        if lo > hi:
            return None
        return (float(lo), float(hi))

    def frames_in(self, lo: float, hi: float) -> np.ndarray:
        i = np.searchsorted(self.times, lo - 1e-9, side="left")
        j = np.searchsorted(self.times, hi + 1e-9, side="right")
        return self.times[i:j]

    def check_time(self, ref: Ref, t: float) -> None:
        h = self.history(ref)
        if not h.covers(t):
            raise TimeRangeError(f"t={t} outside span [{h.times[0]}, {h.times[-1]}] of {ref}")

    # --- transforms -----------------------------------------------------

    def time_reversed(self) -> "Scene":
        """Mirror of the scene in time, t -> t_first + t_last - t."""
        pivot = float(self.times[0] + self.times[-1])
        hist = {
            k: SpaceTimeHistory(k, tuple(pivot - t for t in reversed(h.times)), tuple(reversed(h.primitives)))
            for k, h in self.histories.items()
        }
        skel = {
            k: body.SkeletonTrack(k, tuple(pivot - t for t in reversed(s.times)), tuple(reversed(s.poses)))
            for k, s in self.skeletons.items()
        }
        return Scene(self.frame_rate, self.objects, hist, skel)


def point(p) -> Point3:
    return Point3.of(p)
