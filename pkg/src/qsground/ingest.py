"""Scene files (``.scene.json``) and synthetic activity fixtures.

A scene file is one JSON document::

    {
      "format_version": 1,
      "frame_rate": 30.0,
      "objects": [{"id": "cup1", "class": "cup", "shape": "box"}, ...],
      "frames": [
        {"t": 0.0,
         "skeletons": {"person1": {"hand_right": [x, y, z, confidence], ...}},
         "objects": {"cup1": {"centroid": [x, y, z], "bbox": [[x0, y0, z0], [x1, y1, z1]]}}},
        ...
      ]
    }

Object shapes are ``point`` (``centroid`` only), ``box`` (``bbox``) or
``polygon`` (``polygon``: list of vertices). Persons use shape ``skeleton``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .body import JOINT_SET, MIN_CONFIDENCE, SkeletonPose, SkeletonTrack
from .entities import Box3, DomainObject, Point3, Polygon, SpaceTimeHistory, centroid, validate
from .scene import Scene

FORMAT_VERSION = 1
SHAPES = ("point", "box", "polygon", "skeleton")


class SceneFormatError(ValueError):
    def __init__(self, message: str, frame: int | None = None, path: str = ""):
        where = []
        if frame is not None:
            where.append(f"frame {frame}")
        if path:
            where.append(path)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.frame = frame
        self.path = path


class LowConfidenceWarning(UserWarning):
    pass


# --- loading -----------------------------------------------------------------


def _vec(value, n: int, frame, path) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise SceneFormatError(f"expected a list of {n} numbers", frame, path)
    out = []
    for k, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SceneFormatError(f"element {k} is not a finite number", frame, path)
        out.append(float(v))
    return out


def _field(record, key, frame, path, kind=None):
    if not isinstance(record, dict) or key not in record:
        raise SceneFormatError(f"missing field {key!r}", frame, path)
    value = record[key]
    if kind is not None and not isinstance(value, kind):
        raise SceneFormatError(f"field {key!r} has the wrong type", frame, f"{path}.{key}" if path else key)
    return value


def _shape(kind: str, rec, frame: int, path: str):
    if not isinstance(rec, dict):
        raise SceneFormatError("expected an object record", frame, path)
    if kind == "point":
        return Point3(*_vec(_field(rec, "centroid", frame, path), 3, frame, path + ".centroid"))
    if "centroid" in rec:
        _vec(rec["centroid"], 3, frame, path + ".centroid")
    if kind == "box":
        bb = _field(rec, "bbox", frame, path, list)
        if len(bb) != 2:
            raise SceneFormatError("bbox needs [min, max]", frame, path + ".bbox")
        lo = _vec(bb[0], 3, frame, path + ".bbox[0]")
        hi = _vec(bb[1], 3, frame, path + ".bbox[1]")
        shape = Box3(Point3(*lo), Point3(*hi))
    elif kind == "polygon":
        verts = _field(rec, "polygon", frame, path, list)
        if len(verts) < 3:
            raise SceneFormatError("polygon needs at least 3 vertices", frame, path + ".polygon")
        shape = Polygon(tuple(Point3(*_vec(v, 3, frame, f"{path}.polygon[{k}]")) for k, v in enumerate(verts)))
    else:
        raise SceneFormatError(f"shape {kind!r} has no object record", frame, path)
    report = validate(shape)
    if not report.ok:
        raise SceneFormatError("; ".join(report.violations), frame, path)
    return shape


def from_dict(doc) -> Scene:
    if not isinstance(doc, dict):
        raise SceneFormatError("scene document must be an object")
    version = _field(doc, "format_version", None, "")
    if version != FORMAT_VERSION:
        raise SceneFormatError(f"unsupported format_version {version!r}", None, "format_version")
    rate = _field(doc, "frame_rate", None, "")
    if isinstance(rate, bool) or not isinstance(rate, (int, float)) or not rate > 0:
        raise SceneFormatError("frame_rate must be a positive number", None, "frame_rate")
    objects, kinds = [], {}
    for k, o in enumerate(_field(doc, "objects", None, "", list)):
        p = f"objects[{k}]"
        oid = _field(o, "id", None, p, str)
        cls = _field(o, "class", None, p, str)
        shape = _field(o, "shape", None, p, str)
        if shape not in SHAPES:
            raise SceneFormatError(f"unknown shape {shape!r}", None, p + ".shape")
        if oid in kinds:
            raise SceneFormatError(f"duplicate object id {oid!r}", None, p + ".id")
        if (shape == "skeleton") != (cls == "person"):
            raise SceneFormatError("persons and only persons use shape 'skeleton'", None, p)
        kinds[oid] = shape
        objects.append(DomainObject(oid, cls))

    obj_samples = {oid: [] for oid, s in kinds.items() if s != "skeleton"}
    skel_samples = {oid: [] for oid, s in kinds.items() if s == "skeleton"}
    dropped = {}
    prev_t = None
    for f, frame in enumerate(_field(doc, "frames", None, "", list)):
        if not isinstance(frame, dict):
            raise SceneFormatError("expected a frame record", f, "")
        t = frame.get("t")
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t):
            raise SceneFormatError("t must be a finite number", f, "t")
        t = float(t)
        if prev_t is not None and not t > prev_t:
            raise SceneFormatError(f"timestamp {t} is not after the previous frame ({prev_t})", f, "t")
        prev_t = t
        skels = frame.get("skeletons", {})
        if not isinstance(skels, dict):
            raise SceneFormatError("expected a map of persons", f, "skeletons")
        for pid, joints in skels.items():
            path = f"skeletons.{pid}"
            if pid not in skel_samples:
                raise SceneFormatError(f"undeclared person {pid!r}", f, path)
            if not isinstance(joints, dict):
                raise SceneFormatError("expected a map of joints", f, path)
            pts, conf = {}, {}
            for jn, val in joints.items():
                jp = f"{path}.{jn}"
                if jn not in JOINT_SET:
                    raise SceneFormatError(f"unknown joint {jn!r}", f, jp)
                if not isinstance(val, list) or len(val) not in (3, 4):
                    raise SceneFormatError("expected [x, y, z] or [x, y, z, confidence]", f, jp)
                v = _vec(val, len(val), f, jp)
                if len(v) == 4 and not 0.0 <= v[3] <= 1.0:
                    raise SceneFormatError("confidence must lie in [0, 1]", f, jp)
                pts[jn] = Point3(*v[:3])
                conf[jn] = v[3] if len(v) == 4 else 1.0
                if conf[jn] < MIN_CONFIDENCE:
                    dropped[pid] = dropped.get(pid, 0) + 1
            skel_samples[pid].append((t, SkeletonPose(pts, conf)))
        objs = frame.get("objects", {})
        if not isinstance(objs, dict):
            raise SceneFormatError("expected a map of objects", f, "objects")
        for oid, rec in objs.items():
            path = f"objects.{oid}"
            if oid not in kinds:
                raise SceneFormatError(f"undeclared object {oid!r}", f, path)
            if kinds[oid] == "skeleton":
                raise SceneFormatError(f"{oid!r} is a person; use skeletons", f, path)
            other = {"point": "centroid", "box": "bbox", "polygon": "polygon"}
            for shape, key in other.items():
                if shape != kinds[oid] and key in rec and key != "centroid":
                    raise SceneFormatError(f"shape of {oid!r} is {kinds[oid]}, found {key!r}", f, path)
            obj_samples[oid].append((t, _shape(kinds[oid], rec, f, path)))

    for pid, n in sorted(dropped.items()):
        warnings.warn(f"{pid}: {n} joint sample(s) below confidence {MIN_CONFIDENCE} are ignored",
                      LowConfidenceWarning, stacklevel=3)
    histories = {oid: SpaceTimeHistory.from_samples(oid, s) for oid, s in obj_samples.items() if s}
    skeletons = {
        pid: SkeletonTrack(pid, tuple(t for t, _ in s), tuple(p for _, p in s))
        for pid, s in skel_samples.items() if s
    }
    return Scene(float(rate), objects, histories, skeletons)


def load(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SceneFormatError(f"not valid JSON ({e.msg} at line {e.lineno}, column {e.colno})") from None
    return from_dict(doc)


# --- saving ------------------------------------------------------------------


def _shape_kind(prim) -> str:
    if isinstance(prim, Point3):
        return "point"
    if isinstance(prim, Box3):
        return "box"
    if isinstance(prim, Polygon):
        return "polygon"
    raise SceneFormatError(f"cannot store {type(prim).__name__} objects")


def _xyz(p: Point3) -> list[float]:
    return [p.x, p.y, p.z]


def _record(prim) -> dict:
    rec = {"centroid": [float(c) for c in centroid(prim)]}
    if isinstance(prim, Box3):
        rec["bbox"] = [_xyz(prim.min), _xyz(prim.max)]
    elif isinstance(prim, Polygon):
        rec["polygon"] = [_xyz(v) for v in prim.vertices]
    elif isinstance(prim, Point3):
        rec["centroid"] = _xyz(prim)
    return rec


def to_dict(scene: Scene) -> dict:
    objects = []
    for o in scene.objects:
        if o.id in scene.skeletons or o.cls == "person":
            shape = "skeleton"
        elif o.id in scene.histories:
            shape = _shape_kind(scene.histories[o.id].primitives[0])
        else:
            shape = "point"
        objects.append({"id": o.id, "class": o.cls, "shape": shape})
    frames = {}
    for oid, h in scene.histories.items():
        for t, prim in h.samples():
            frames.setdefault(t, {"t": t, "skeletons": {}, "objects": {}})["objects"][oid] = _record(prim)
    for pid, track in scene.skeletons.items():
        for t, pose in zip(track.times, track.poses):
            joints = {j: _xyz(p) + [pose.confidence[j]] for j, p in pose.joints.items()}
            frames.setdefault(t, {"t": t, "skeletons": {}, "objects": {}})["skeletons"][pid] = joints
    return {
        "format_version": FORMAT_VERSION,
        "frame_rate": scene.frame_rate,
        "objects": objects,
        "frames": [frames[t] for t in sorted(frames)],
    }


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def save(scene_or_doc, path) -> None:
    doc = to_dict(scene_or_doc) if isinstance(scene_or_doc, Scene) else scene_or_doc
    Path(path).write_text(dumps(doc), encoding="utf-8")


def truth_path(scene_path) -> Path:
    p = Path(scene_path)
    name = p.name
    if name.endswith(".scene.json"):
        return p.with_name(name[: -len(".scene.json")] + ".truth.json")
    return p.with_name(p.stem + ".truth.json")


# --- fixtures ----------------------------------------------------------------

FIXTURES = ("pass_cup", "reach_only", "pick_put", "parallel_motion", "cyclic_stir")


class UnknownFixtureError(KeyError):
    pass


@dataclass
class FixtureParams:
    seed: int = 0
    sigma: float = 0.0
    frame_rate: float = 30.0


class Path3:
    """Piecewise-linear trajectory through timed keyframes."""

    def __init__(self, keys):
        self.t = np.array([k[0] for k in keys], dtype=float)
        self.p = np.array([k[1] for k in keys], dtype=float)

    def __call__(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.t, self.p[:, a]) for a in range(3)])

    def then(self, t: float, delta) -> "Path3":
        """Extend with a linear move ending at time t."""
        keys = list(zip(self.t, self.p))
        last_t, last_p = keys[-1]
        if t > last_t:
            keys.append((t, last_p + np.asarray(delta, dtype=float)))
        return Path3(keys)

    def hold(self, t: float) -> "Path3":
        return self.then(t, (0.0, 0.0, 0.0))


def _frames(duration: float, rate: float) -> np.ndarray:
    n = int(round(duration * rate)) + 1
    return np.round(np.arange(n) / rate, 9)


def _skeleton(base: np.ndarray, facing: float, hands: dict) -> dict[str, np.ndarray]:
    """A seated 25-joint pose; ``hands`` maps side -> hand position."""
    f = np.array([math.cos(facing), math.sin(facing), 0.0])
    left = np.array([-f[1], f[0], 0.0])
    up = np.array([0.0, 0.0, 1.0])
    j = {
        "spine_base": base,
        "spine_mid": base + 0.25 * up,
        "spine_shoulder": base + 0.5 * up,
        "neck": base + 0.57 * up,
        "head": base + 0.67 * up,
    }
    for side, s in (("left", 1.0), ("right", -1.0)):
        shoulder = base + 0.47 * up + s * 0.18 * left
        hip = base + s * 0.1 * left
        hand = hands[side]
        wrist = hand - 0.06 * f
        elbow = 0.5 * (shoulder + wrist) - 0.08 * up
        knee = hip + 0.42 * f
        ankle = knee - 0.45 * up
        j[f"shoulder_{side}"] = shoulder
        j[f"elbow_{side}"] = elbow
        j[f"wrist_{side}"] = wrist
        j[f"hand_{side}"] = hand
        j[f"hand_tip_{side}"] = hand + 0.07 * f
        j[f"thumb_{side}"] = hand + 0.03 * f + s * 0.03 * left
        j[f"hip_{side}"] = hip
        j[f"knee_{side}"] = knee
        j[f"ankle_{side}"] = ankle
        j[f"foot_{side}"] = ankle + 0.1 * f
    return j


class _Builder:
    def __init__(self, params: FixtureParams, duration: float):
        self.params = params
        self.times = _frames(duration, params.frame_rate)
        self.rng = np.random.default_rng(params.seed)
        self.objects = []
        self.frames = [{"t": float(t), "skeletons": {}, "objects": {}} for t in self.times]

    def _noise(self, shape) -> np.ndarray:
        if self.params.sigma <= 0:
            return np.zeros(shape)
        return self.rng.normal(0.0, self.params.sigma, size=shape)

    def person(self, pid: str, base, facing: float, hands: dict) -> None:
        self.objects.append({"id": pid, "class": "person", "shape": "skeleton"})
        base = np.asarray(base, dtype=float)
        for k, t in enumerate(self.times):
            joints = _skeleton(base, facing, {s: h(t) for s, h in hands.items()})
            out = {}
            for name in sorted(joints):
                p = joints[name] + self._noise(3)
                out[name] = [round(float(x), 6) for x in p] + [1.0]
            self.frames[k]["skeletons"][pid] = out

    def box(self, oid: str, cls: str, centre: Path3, size) -> None:
        self.objects.append({"id": oid, "class": cls, "shape": "box"})
        half = np.asarray(size, dtype=float) / 2.0
        for k, t in enumerate(self.times):
            c = centre(t) + self._noise(3)
            lo, hi = c - half, c + half
            self.frames[k]["objects"][oid] = {
                "centroid": [round(float(x), 6) for x in c],
                "bbox": [[round(float(x), 6) for x in lo], [round(float(x), 6) for x in hi]],
            }

    def point(self, oid: str, cls: str, path: Path3) -> None:
        self.objects.append({"id": oid, "class": cls, "shape": "point"})
        for k, t in enumerate(self.times):
            c = path(t) + self._noise(3)
            self.frames[k]["objects"][oid] = {"centroid": [round(float(x), 6) for x in c]}

    def document(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "frame_rate": float(self.params.frame_rate),
            "objects": self.objects,
            "frames": self.frames,
        }


class _Truth:
    """Ground-truth intervals derived from the trajectory construction.

    Boundary times are worked out in closed form from the motion profile and
    the default thresholds, then snapped to the frame grid.
    """

    def __init__(self, times: np.ndarray):
        self.times = times
        self.interactions = []
        self.fluents = []

    def first_after(self, t: float) -> float:
        return float(self.times[np.searchsorted(self.times, t + 1e-9, side="left")])

    def first_at_or_after(self, t: float) -> float:
        return float(self.times[np.searchsorted(self.times, t - 1e-9, side="left")])

    def last_before(self, t: float) -> float:
        return float(self.times[np.searchsorted(self.times, t - 1e-9, side="left") - 1])

    def last_at_or_before(self, t: float) -> float:
        return float(self.times[np.searchsorted(self.times, t + 1e-9, side="right") - 1])

    def interaction(self, rule, args, t1, t2):
        self.interactions.append({"rule": rule, "args": list(args), "interval": [round(t1, 9), round(t2, 9)]})

    def fluent(self, atom, t1, t2, check="timeline"):
        self.fluents.append({"atom": atom, "interval": [round(t1, 9), round(t2, 9)], "check": check})

    def document(self, name, params: FixtureParams) -> dict:
        order = sorted(self.interactions, key=lambda r: (r["interval"][0], r["rule"], r["args"]))
        return {
            "fixture": name,
            "seed": params.seed,
            "sigma": params.sigma,
            "frame_rate": float(params.frame_rate),
            "tolerance_frames": 2,
            "interactions": order,
            "fluents": self.fluents,
        }


# Defaults the closed-form truth is derived for.
_CONTACT = 0.03  # contact_distance
_MARGIN = 0.02  # 2 x adjacency_tolerance
_W = 0.2  # trend window
_DRIFT = 0.02 * 2 * _W + _MARGIN  # attached drift allowance over a full window


def _approach_bounds(ts, te, v, v_after=0.0, v_before=0.0):
    """Open interval of window centres where a distance closing at rate v on
    [ts, te] (rates v_before / v_after outside) passes the windowed test."""
    on = ts + (_MARGIN - v_before * _W) / (v - v_before)
    off = te - (_MARGIN - v_after * _W) / (v - v_after)
    return on, off


def _attached_start(t_contact, v):
    # all frames of [t - w, t + w] within contact and relative drift below the allowance
    return max(t_contact - _CONTACT / v + _W, t_contact + _W - _DRIFT / v)


def _attached_end(t_leave, v):
    return min(t_leave + _CONTACT / v - _W, t_leave - _W + _DRIFT / v)


# Shared tabletop layout (metres): table top at z = 0.75, cup 8 x 8 x 12 cm.
_TABLE_C, _TABLE_S = (0.65, 0.0, 0.725), (0.8, 0.8, 0.05)
_CUP_S = (0.08, 0.08, 0.12)
_HAND_Z = 0.81
# Still lead-in before any motion; longer than a full trend window.
_REST = 0.3


def _pass_cup(p: FixtureParams):
    S = _REST
    b = _Builder(p, 4.0 + S)
    cup0 = np.array([0.5, 0.0, 0.81])
    # person1's right hand: rest, reach, hold, lift, carry, pause, hand-over push, hold, retract
    carry = ((S + 1.4, (0, 0, 0.10)), (S + 2.0, (0.378, 0, 0)), (S + 2.6, (0, 0, 0)), (S + 2.75, (0.06, 0, 0)))
    h1 = Path3([(0.0, (0.16, 0.0, _HAND_Z))]).hold(S + 0.2).then(S + 0.8, (0.30, 0, 0)).hold(S + 1.2)
    cup = Path3([(0.0, cup0)]).hold(S + 1.2)
    for t, delta in carry:
        h1, cup = h1.then(t, delta), cup.then(t, delta)
    h1 = h1.hold(S + 3.3).then(S + 3.6, (-0.075, 0, 0)).hold(S + 4.0)
    cup = cup.hold(S + 4.0)
    h2 = Path3([(0.0, (0.978, 0.0, 0.91))]).hold(S + 4.0)
    b.person("person1", (0.0, 0.0, 0.55), 0.0,
             {"right": h1, "left": Path3([(0.0, (0.1, 0.25, 0.7))])})
    b.person("person2", (1.3, 0.0, 0.55), math.pi,
             {"right": h2, "left": Path3([(0.0, (1.2, -0.25, 0.7))])})
    b.box("table1", "table", Path3([(0.0, _TABLE_C)]), _TABLE_S)
    b.box("cup1", "cup", cup, _CUP_S)

    T = _Truth(b.times)
    # reach: hand closes 0.30 m at 0.5 m/s and stops at the cup face
    a_on, a_off = _approach_bounds(S + 0.2, S + 0.8, 0.5)
    approach = (T.first_after(a_on), T.last_before(a_off))
    touch1 = (T.first_at_or_after(S + 0.8 - _CONTACT / 0.5), T.last_at_or_before(S + 3.3 + _CONTACT / 0.25))
    attached1 = (T.first_after(_attached_start(S + 0.8, 0.5)), T.last_before(_attached_end(S + 3.3, 0.25)))
    on_table_end = T.last_at_or_before(S + 1.2 + _CONTACT / 0.5)
    # carry towards person2 at 0.63 m/s, stopping 6 cm short of person2's hand
    c_on, c_off = _approach_bounds(S + 1.4, S + 2.0, 0.63)
    carried = (T.first_after(c_on), T.last_before(c_off))
    # the final push at 0.4 m/s is too brief to last min_duration as approaching
    touch2_on = T.first_at_or_after(S + 2.6 + (0.06 - _CONTACT) / 0.4)
    T.interaction("reach_for", ["person1", "cup1"], approach[0], touch1[1])
    T.interaction("pick_up", ["person1", "cup1"], attached1[0], on_table_end)
    T.interaction("move_towards", ["person1", "cup1", "person2"], max(carried[0], attached1[0]), carried[1])
    T.interaction("grasp", ["person2", "cup1"], touch2_on, attached1[1])
    T.interaction("release", ["person1", "cup1"], touch2_on, touch1[1])
    T.interaction("passing_over", ["person1", "person2", "cup1"], attached1[0], touch1[1])
    T.fluent("approaching(body_part(hand_right,person1),cup1)", *approach)
    T.fluent("touches(body_part(hand_right,person1),cup1)", *touch1)
    T.fluent("attached(body_part(hand_right,person1),cup1)", *attached1)
    return b, T


def _reach_only(p: FixtureParams):
    S = _REST
    b = _Builder(p, 2.0 + S)
    h1 = Path3([(0.0, (0.16, 0.0, _HAND_Z))]).hold(S + 0.2).then(S + 0.8, (0.30, 0, 0)).hold(S + 2.0)
    b.person("person1", (0.0, 0.0, 0.55), 0.0,
             {"right": h1, "left": Path3([(0.0, (0.1, 0.25, 0.7))])})
    b.box("table1", "table", Path3([(0.0, _TABLE_C)]), _TABLE_S)
    b.box("cup1", "cup", Path3([(0.0, (0.5, 0.0, 0.81))]), _CUP_S)
    T = _Truth(b.times)
    a_on, a_off = _approach_bounds(S + 0.2, S + 0.8, 0.5)
    approach = (T.first_after(a_on), T.last_before(a_off))
    touch = (T.first_at_or_after(S + 0.8 - _CONTACT / 0.5), float(b.times[-1]))
    T.interaction("reach_for", ["person1", "cup1"], approach[0], touch[1])
    T.fluent("approaching(body_part(hand_right,person1),cup1)", *approach)
    T.fluent("touches(body_part(hand_right,person1),cup1)", *touch)
    return b, T


def _pick_put(p: FixtureParams):
    S = _REST
    b = _Builder(p, 3.4 + S)
    h1 = (Path3([(0.0, (0.16, 0.0, _HAND_Z))]).hold(S + 0.2).then(S + 0.8, (0.30, 0, 0)).hold(S + 1.2)
          .then(S + 1.4, (0, 0, 0.10)).then(S + 2.0, (0, 0.2, 0)).then(S + 2.2, (0, 0, -0.10)).hold(S + 2.6)
          .then(S + 2.9, (-0.075, 0, 0)).hold(S + 3.4))
    cup = (Path3([(0.0, (0.5, 0.0, 0.81))]).hold(S + 1.2).then(S + 1.4, (0, 0, 0.10))
           .then(S + 2.0, (0, 0.2, 0)).then(S + 2.2, (0, 0, -0.10)).hold(S + 3.4))
    b.person("person1", (0.0, 0.0, 0.55), 0.0,
             {"right": h1, "left": Path3([(0.0, (0.1, 0.25, 0.7))])})
    b.box("table1", "table", Path3([(0.0, _TABLE_C)]), _TABLE_S)
    b.box("cup1", "cup", cup, _CUP_S)
    T = _Truth(b.times)
    a_on, a_off = _approach_bounds(S + 0.2, S + 0.8, 0.5)
    approach = (T.first_after(a_on), T.last_before(a_off))
    touch_end = T.last_at_or_before(S + 2.6 + _CONTACT / 0.25)
    attached = (T.first_after(_attached_start(S + 0.8, 0.5)), T.last_before(_attached_end(S + 2.6, 0.25)))
    lifted = T.last_at_or_before(S + 1.2 + _CONTACT / 0.5)
    landed = T.first_at_or_after(S + 2.2 - _CONTACT / 0.5)
    T.interaction("reach_for", ["person1", "cup1"], approach[0], touch_end)
    T.interaction("pick_up", ["person1", "cup1"], attached[0], lifted)
    T.interaction("put_down", ["person1", "cup1"], landed, attached[1])
    T.fluent("attached(body_part(hand_right,person1),cup1)", *attached)
    return b, T


def _parallel_motion(p: FixtureParams):
    b = _Builder(p, 3.0)
    v = 0.3
    c1 = Path3([(0.0, (0.0, 0.0, 0.1))]).hold(0.5).then(2.5, (2 * v, 0, 0)).hold(3.0)
    c2 = Path3([(0.0, (0.0, 0.5, 0.1))]).hold(0.5).then(2.5, (2 * v, 0, 0)).hold(3.0)
    b.box("cart1", "cart", c1, (0.2, 0.2, 0.2))
    b.box("cart2", "cart", c2, (0.2, 0.2, 0.2))
    T = _Truth(b.times)
    # the weakest window pair straddles the start (or end) of the motion
    v_min = 0.02
    on = 0.5 + v_min * _W / v
    off = 2.5 - v_min * _W / v
    T.fluent("parallel(cart1,cart2)", T.first_at_or_after(on), T.last_at_or_before(off))
    T.fluent("moving(cart1)", T.first_at_or_after(on), T.last_at_or_before(off))
    return b, T


def _cyclic_stir(p: FixtureParams):
    b = _Builder(p, 3.4)
    r, period, t0, t1 = 0.05, 0.8, 0.5, 2.9
    centre = np.array([0.5, 0.0, 0.85])
    keys = [(0.0, centre + (r, 0, 0)), (t0, centre + (r, 0, 0))]
    for t in np.arange(t0, t1 + 1e-9, 1.0 / (4 * p.frame_rate))[1:]:
        a = 2 * math.pi * (t - t0) / period
        keys.append((float(t), centre + (r * math.cos(a), r * math.sin(a), 0.0)))
    keys.append((3.4, keys[-1][1]))
    b.point("spoon1", "spoon", Path3(keys))
    b.box("cup1", "cup", Path3([(0.0, (0.5, 0.0, 0.81))]), (0.14, 0.14, 0.12))
    T = _Truth(b.times)
    T.fluent("cyclic(spoon1)", t0, t1, check="holds")
    T.fluent("cyclic(spoon1)", t0, t0 + 0.4 * period, check="not_holds")
    return b, T


_BUILDERS = {
    "pass_cup": _pass_cup,
    "reach_only": _reach_only,
    "pick_put": _pick_put,
    "parallel_motion": _parallel_motion,
    "cyclic_stir": _cyclic_stir,
}


def fixture(name: str, seed: int = 0, sigma: float = 0.0, frame_rate: float = 30.0) -> tuple[dict, dict]:
    """Scene document and ground-truth sidecar for a named synthetic activity."""
    if name not in _BUILDERS:
        raise UnknownFixtureError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    params = FixtureParams(seed=seed, sigma=sigma, frame_rate=frame_rate)
    builder, truth = _BUILDERS[name](params)
    return builder.document(), truth.document(name, params)


def write_fixture(name: str, out, seed: int = 0, sigma: float = 0.0, frame_rate: float = 30.0) -> tuple[Path, Path]:
    doc, truth = fixture(name, seed, sigma, frame_rate)
    out = Path(out)
    save(doc, out)
    side = truth_path(out)
    side.write_text(json.dumps(truth, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return out, side
