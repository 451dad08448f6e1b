"""Motion predicates over space-time histories.

Predicates are evaluated on a run of scene frames. Per-frame signals
(positions, distances, sizes, headings, topology) are computed once per
object or pair by :class:`SignalStore` and lightly smoothed before the
threshold tests, so repeated evaluation over sliding windows stays cheap.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from . import metrics
from .config import DEFAULT_CONFIG, EngineConfig
from .entities import TOL, TimeRangeError, centroid
from .geometry import min_distance
from .relations import LR, Topology, UnsupportedPairError, lr, topology
from .entities import LineSegment, Point3


class MotionPredicate(str, Enum):
    MOVING = "moving"
    STATIONARY = "stationary"
    GROWING = "growing"
    SHRINKING = "shrinking"
    APPROACHING = "approaching"
    MOVING_AWAY = "moving_away"
    PARALLEL = "parallel"
    MERGING = "merging"
    SPLITTING = "splitting"
    MOVING_INTO = "moving_into"
    MOVING_OUT = "moving_out"
    ATTACHED = "attached"
    CURVED = "curved"
    CYCLIC = "cyclic"
    PASSING_IN_FRONT = "passing_in_front"
    PASSING_BEHIND = "passing_behind"
    ROTATING_CW = "rotating_cw"
    ROTATING_CCW = "rotating_ccw"

    def __str__(self) -> str:
        return self.value


UNARY = {
    MotionPredicate.MOVING, MotionPredicate.STATIONARY, MotionPredicate.GROWING,
    MotionPredicate.SHRINKING, MotionPredicate.CURVED, MotionPredicate.CYCLIC,
    MotionPredicate.ROTATING_CW, MotionPredicate.ROTATING_CCW,
}

# Predicates judged on the short trend window; the rest describe a whole
# episode (a transition or a path shape) and use the longer event window.
TREND = {
    MotionPredicate.MOVING, MotionPredicate.STATIONARY, MotionPredicate.GROWING,
    MotionPredicate.SHRINKING, MotionPredicate.APPROACHING, MotionPredicate.MOVING_AWAY,
    MotionPredicate.PARALLEL, MotionPredicate.ATTACHED, MotionPredicate.ROTATING_CW,
    MotionPredicate.ROTATING_CCW,
}

ALIASES = {"moving_towards": MotionPredicate.APPROACHING}


def arity(pred: MotionPredicate) -> int:
    return 1 if pred in UNARY else 2


def predicate_from_name(name: str) -> MotionPredicate:
    return ALIASES.get(name) or MotionPredicate(name)


def _smooth(values: np.ndarray, half: int) -> np.ndarray:
    """Centred moving average that ignores NaN and shrinks at the edges."""
    if half <= 0:
        return values
    v = values.reshape(len(values), -1)
    out = np.full_like(v, np.nan, dtype=float)
    valid = ~np.isnan(v[:, 0])
    n = len(v)
    for i in np.flatnonzero(valid):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        # symmetric window keeps time reversal exact
        k = min(i - lo, hi - 1 - i)
        seg = v[i - k:i + k + 1]
        ok = ~np.isnan(seg[:, 0])
        if np.all(ok):
            out[i] = seg.mean(axis=0)
        else:
            out[i] = v[i]
    return out.reshape(values.shape)


class SignalStore:
    """Per-frame signals of one scene, aligned to ``scene.times``."""

    def __init__(self, scene, config: EngineConfig = DEFAULT_CONFIG):
        self.scene = scene
        self.config = config
        self.times = scene.times
        dt = 1.0 / scene.frame_rate if scene.frame_rate > 0 else 0.0
        self.half = int(round(config.smoothing / dt / 2.0)) if dt > 0 and config.smoothing > 0 else 0
        self._cache: dict = {}

    # --- raw per-reference samples ---------------------------------------

    def valid_range(self, *refs) -> tuple[int, int] | None:
        """Inclusive frame-index range where every reference has data."""
        span = self.scene.span_of(*refs)
        if span is None:
            return None
        i = int(np.searchsorted(self.times, span[0] - 1e-9, side="left"))
        j = int(np.searchsorted(self.times, span[1] + 1e-9, side="right")) - 1
        if j < i:
            return None
        return i, j

    def entities(self, ref):
        key = ("ent", ref)
        if key not in self._cache:
            rng = self.valid_range(ref)
            ents = [None] * len(self.times)
            if rng is not None:
                for k in range(rng[0], rng[1] + 1):
                    ents[k] = self.scene.entity_at(ref, float(self.times[k]))
            self._cache[key] = ents
        return self._cache[key]

    def position(self, ref) -> np.ndarray:
        key = ("pos", ref)
        if key not in self._cache:
            arr = np.full((len(self.times), 3), np.nan)
            for k, e in enumerate(self.entities(ref)):
                if e is not None:
                    arr[k] = centroid(e)
            self._cache[key] = _smooth(arr, self.half)
        return self._cache[key]

    def raw_distance(self, a, b) -> np.ndarray:
        key = ("raw",) + tuple(sorted((a, b), key=str))
        if key not in self._cache:
            ea, eb = self.entities(a), self.entities(b)
            arr = np.full(len(self.times), np.nan)
            for k in range(len(self.times)):
                if ea[k] is not None and eb[k] is not None:
                    arr[k] = min_distance(ea[k], eb[k])
            self._cache[key] = arr
        return self._cache[key]

    def distance(self, a, b) -> np.ndarray:
        """Smoothed extent distance, used for trends."""
        key = ("dist",) + tuple(sorted((a, b), key=str))
        if key not in self._cache:
            self._cache[key] = _smooth(self.raw_distance(a, b), self.half)
        return self._cache[key]

    def size(self, ref) -> tuple[np.ndarray, str]:
        key = ("size", ref)
        if key not in self._cache:
            arr = np.full(len(self.times), np.nan)
            unit = "m"
            for k, e in enumerate(self.entities(ref)):
                if e is not None:
                    mv = metrics.primitive_size(e)
                    arr[k], unit = mv.value, mv.unit
            self._cache[key] = (_smooth(arr, self.half), unit)
        return self._cache[key]

    def char_length(self, ref) -> float:
        key = ("len", ref)
        if key not in self._cache:
            ents = [e for e in self.entities(ref) if e is not None]
            self._cache[key] = max((metrics.characteristic_length(e) for e in ents), default=0.0)
        return self._cache[key]

    def facing(self, ref) -> np.ndarray:
        """Unit orientation per frame; bare points use their motion direction."""
        key = ("facing", ref)
        if key not in self._cache:
            arr = np.full((len(self.times), 3), np.nan)
            pos = self.position(ref)
            ents = self.entities(ref)
            half_w = self.config.window / 2.0
            for k, e in enumerate(ents):
                if e is None:
                    continue
                v = metrics.orientation_vector(e)
                if v is None:
                    lo = int(np.searchsorted(self.times, self.times[k] - half_w - 1e-9))
                    hi = int(np.searchsorted(self.times, self.times[k] + half_w + 1e-9, side="right")) - 1
                    while ents[lo] is None:
                        lo += 1
                    while ents[hi] is None:
                        hi -= 1
                    d = pos[hi] - pos[lo]
                    if np.linalg.norm(d) > max(TOL, self.config.adjacency_tolerance):
                        v = d / np.linalg.norm(d)
                if v is not None:
                    arr[k] = v
            self._cache[key] = arr
        return self._cache[key]

    def topology(self, a, b) -> list:
        key = ("topo", a, b)
        if key not in self._cache:
            ea, eb = self.entities(a), self.entities(b)
            tol = self.config.geometric_tolerance
            out = []
            for k in range(len(self.times)):
                if ea[k] is None or eb[k] is None:
                    out.append(None)
                    continue
                try:
                    out.append(topology(ea[k], eb[k], tol))
                except UnsupportedPairError:
                    out.append(Topology.DC if min_distance(ea[k], eb[k]) > tol else Topology.PO)
            self._cache[key] = out
        return self._cache[key]


# --- helpers over a frame run [i, j] ---------------------------------------------


def window_pairs(times: np.ndarray, i: int, j: int, w: float):
    """(a, b) index pairs with b the first frame at least w after a."""
    eps = 1e-9
    for a in range(i, j + 1):
        b = int(np.searchsorted(times, times[a] + w - eps, side="left"))
        if b > j:
            break
        yield a, b


def _all_pairs_first(times, i, j, w):
    """For each a, the first b >= a + w (or None), as two arrays."""
    starts, firsts = [], []
    for a, b in window_pairs(times, i, j, w):
        starts.append(a)
        firsts.append(b)
    return np.array(starts, dtype=int), np.array(firsts, dtype=int)


def _trend(series: np.ndarray, times, i, j, w, margin, decreasing: bool) -> bool:
    seg = series[i:j + 1]
    if np.any(np.isnan(seg)):
        return False
    a_idx, b_idx = _all_pairs_first(times, i, j, w)
    if len(a_idx) == 0:
        return False
    rel = b_idx - i
    if decreasing:
        # every later sample spaced >= w must be below d(a) - margin
        suffix = np.maximum.accumulate(seg[::-1])[::-1]
        return bool(np.all(seg[a_idx - i] - suffix[rel] > margin))
    suffix = np.minimum.accumulate(seg[::-1])[::-1]
    return bool(np.all(suffix[rel] - seg[a_idx - i] > margin))


def _velocities(pos, times, i, j, w) -> np.ndarray | None:
    pairs = list(window_pairs(times, i, j, w))
    if not pairs:
        return None
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    disp = np.linalg.norm(pos[b] - pos[a], axis=1)
    return disp / (times[b] - times[a])


# Isoperimetric ratio 4*pi*A/P^2 a closed path must reach to count as a loop
# (1 for a circle, about 0.35 for a 10:1 ellipse, 0 for a retraced line).
MIN_ROUNDNESS = 0.05


def _roundness(ring: np.ndarray) -> float:
    x, y = ring[:, 0], ring[:, 1]
    area = 0.5 * abs(float(np.dot(x[:-1], y[1:]) - np.dot(x[1:], y[:-1])))
    perim = float(np.sum(np.linalg.norm(np.diff(ring, axis=0), axis=1)))
    return 4.0 * math.pi * area / (perim * perim) if perim > TOL else 0.0


class MotionEvaluator:
    """Truth of motion predicates on frame runs of a scene."""

    def __init__(self, store: SignalStore):
        self.store = store
        self.cfg = store.config
        self.times = store.times

    # public entry -------------------------------------------------------------

    def holds(self, pred: MotionPredicate, args, i: int, j: int) -> bool:
        pred = MotionPredicate(pred)
        if len(args) != arity(pred):
            raise ValueError(f"{pred.value} takes {arity(pred)} argument(s)")
        if j <= i:
            return False
        return getattr(self, "_" + pred.value)(*args, i=i, j=j)

    # unary --------------------------------------------------------------------

    def _vel(self, o, i, j):
        pos = self.store.position(o)
        if np.any(np.isnan(pos[i:j + 1])):
            return None
        return _velocities(pos, self.times, i, j, self.cfg.window)

    def _moving(self, o, *, i, j):
        v = self._vel(o, i, j)
        return v is not None and bool(np.all(v >= self.cfg.v_min))

    def _stationary(self, o, *, i, j):
        v = self._vel(o, i, j)
        return v is not None and bool(np.all(v < self.cfg.v_min))

    def _size_trend(self, o, i, j, growing: bool):
        s, _ = self.store.size(o)
        seg = s[i:j + 1]
        if np.any(np.isnan(seg)):
            return False
        pairs = list(window_pairs(self.times, i, j, self.cfg.window))
        if not pairs:
            return False
        for a, b in pairs:
            if growing and s[b] < s[a]:
                return False
            if not growing and s[b] > s[a]:
                return False
        first, last = seg[0], seg[-1]
        change = (last - first) if growing else (first - last)
        return bool(change > self.cfg.growth_margin * max(first, last) and change > 0)

    def _growing(self, o, *, i, j):
        return self._size_trend(o, i, j, True)

    def _shrinking(self, o, *, i, j):
        return self._size_trend(o, i, j, False)

    def _path(self, o, i, j):
        pos = self.store.position(o)[i:j + 1, :2]
        if np.any(np.isnan(pos)):
            return None
        kept = [pos[0]]
        step = self.cfg.adjacency_tolerance
        for p in pos[1:]:
            if np.linalg.norm(p - kept[-1]) >= step:
                kept.append(p)
        return pos, np.array(kept)

    @staticmethod
    def _turning(points: np.ndarray) -> np.ndarray:
        """Cumulative signed turning between successive chords."""
        chords = np.diff(points, axis=0)
        heads = np.arctan2(chords[:, 1], chords[:, 0])
        turns = [metrics.wrap_angle(b - a) for a, b in zip(heads, heads[1:])]
        return np.concatenate([[0.0], np.cumsum(turns)]) if len(heads) else np.array([])

    def _closure(self, pos) -> float:
        extent = float(np.max(np.ptp(pos, axis=0)))
        return max(self.cfg.cyclic_closure_factor * extent, self.cfg.geometric_tolerance)

    def _cyclic(self, o, *, i, j):
        got = self._path(o, i, j)
        if got is None:
            return False
        pos, kept = got
        if len(kept) < 4:
            return False
        closure = self._closure(pos)
        need = 2.0 * math.pi - self.cfg.rad("cyclic_margin_deg")
        for k in range(3, len(kept)):
            gap = np.linalg.norm(kept[k] - kept[0])
            if gap > closure:
                continue
            loop = kept[:k + 1]
            if gap > TOL:
                loop = np.vstack([loop, kept[:1]])
            if _roundness(loop) < MIN_ROUNDNESS:
                continue  # out-and-back strokes enclose no area
            # close the ring: include the turn from the last chord back to the first
            loop = np.vstack([loop, loop[1:2]])
            turn = self._turning(loop)
            if len(turn) and abs(turn[-1]) >= need:
                return True
        return False

    def _curved(self, o, *, i, j):
        got = self._path(o, i, j)
        if got is None:
            return False
        pos, kept = got
        if len(kept) < 3:
            return False
        if np.linalg.norm(kept[-1] - kept[0]) <= self._closure(pos):
            return False
        turn = self._turning(kept)
        return bool(abs(turn[-1]) > self.cfg.rad("curved_angle_deg"))

    def _rotation(self, o, i, j):
        f = self.store.facing(o)[i:j + 1]
        if np.any(np.isnan(f)) or np.any(np.hypot(f[:, 0], f[:, 1]) <= TOL):
            return None
        yaws = np.arctan2(f[:, 1], f[:, 0])
        return sum(metrics.wrap_angle(b - a) for a, b in zip(yaws, yaws[1:]))

    def _rotating_ccw(self, o, *, i, j):
        r = self._rotation(o, i, j)
        return r is not None and r > self.cfg.rad("rotation_threshold_deg")

    def _rotating_cw(self, o, *, i, j):
        r = self._rotation(o, i, j)
        return r is not None and r < -self.cfg.rad("rotation_threshold_deg")

    # binary -------------------------------------------------------------------

    def _distance_trend(self, a, b, i, j, decreasing):
        # the smoothed signal must move by more than the noise margin and the
        # raw signal must still be strictly monotone at the window scale
        w, margin = self.cfg.window, self.cfg.noise_margin
        return (_trend(self.store.distance(a, b), self.times, i, j, w, margin, decreasing)
                and _trend(self.store.raw_distance(a, b), self.times, i, j, w, 0.0, decreasing))

    def _approaching(self, a, b, *, i, j):
        return self._distance_trend(a, b, i, j, True)

    def _moving_away(self, a, b, *, i, j):
        return self._distance_trend(a, b, i, j, False)

    def _parallel(self, a, b, *, i, j):
        if not (self._moving(a, i=i, j=j) and self._moving(b, i=i, j=j)):
            return False
        pa, pb = self.store.position(a), self.store.position(b)
        limit = self.cfg.rad("parallel_angle_deg")
        for s, e in window_pairs(self.times, i, j, self.cfg.window):
            da, db = (pa[e] - pa[s])[:2], (pb[e] - pb[s])[:2]
            if np.linalg.norm(da) <= TOL or np.linalg.norm(db) <= TOL:
                return False
            ang = math.atan2(abs(da[0] * db[1] - da[1] * db[0]), float(da @ db))
            if ang >= limit:
                return False
        sep = np.linalg.norm(pa[i:j + 1] - pb[i:j + 1], axis=1)
        mean = float(np.mean(sep))
        if mean <= TOL:
            return True
        return bool(np.ptp(sep) < self.cfg.parallel_distance_variation * mean)

    def _trace(self, a, b, i, j):
        trace = self.store.topology(a, b)[i:j + 1]
        if any(x is None for x in trace):
            return None
        return trace

    def _connection(self, a, b, i, j, forward: bool):
        trace = self._trace(a, b, i, j)
        if trace is None:
            return False
        conn = [x is not Topology.DC for x in trace]
        if not forward:
            conn = conn[::-1]
        if conn[0] or not conn[-1]:
            return False
        first = conn.index(True)
        return all(conn[first:])

    def _merging(self, a, b, *, i, j):
        return self._connection(a, b, i, j, forward=True)

    def _splitting(self, a, b, *, i, j):
        return self._connection(a, b, i, j, forward=False)

    _STAGE = {Topology.DC: 0, Topology.EC: 0, Topology.PO: 1,
              Topology.TPP: 2, Topology.NTPP: 2, Topology.EQ: 2}

    def _containment(self, a, b, i, j, forward: bool):
        trace = self._trace(a, b, i, j)
        if trace is None or any(x not in self._STAGE for x in trace):
            return False
        stages = [self._STAGE[x] for x in trace]
        if not forward:
            stages = stages[::-1]
        if stages[0] != 0 or stages[-1] != 2:
            return False
        return all(y >= x for x, y in zip(stages, stages[1:]))

    def _moving_into(self, a, b, *, i, j):
        return self._containment(a, b, i, j, forward=True)

    def _moving_out(self, a, b, *, i, j):
        return self._containment(a, b, i, j, forward=False)

    def _attached(self, a, b, *, i, j):
        d = self.store.distance(a, b)[i:j + 1]
        if np.any(np.isnan(d)) or np.any(d > self.cfg.contact_distance):
            return False
        rel = self.store.position(a)[i:j + 1] - self.store.position(b)[i:j + 1]
        drift = np.linalg.norm(rel[:, None, :] - rel[None, :, :], axis=2).max()
        allowed = self.cfg.v_min * (self.times[j] - self.times[i]) + self.cfg.noise_margin
        return bool(drift < allowed)

    def _passing(self, a, b, i, j, in_front: bool):
        pa, pb = self.store.position(a), self.store.position(b)
        fb = self.store.facing(b)
        if np.any(np.isnan(pa[i:j + 1])) or np.any(np.isnan(pb[i:j + 1])) or np.any(np.isnan(fb[i:j + 1])):
            return False
        L = max(self.store.char_length(a), self.store.char_length(b), self.cfg.qdc_min_length)
        near = self.cfg.qdc_near_factor * L
        d = self.store.distance(a, b)[i:j + 1]
        if np.any(d >= near):
            return False
        sides = []
        for k in range(i, j + 1):
            base = pb[k]
            seg = LineSegment(Point3(*base), Point3(*(base + fb[k])))
            try:
                lab = lr(seg, Point3(*pa[k]), self.cfg.geometric_tolerance)
            except ValueError:
                return False
            if lab in (LR.LEFT, LR.RIGHT):
                if not sides or sides[-1] != lab:
                    sides.append(lab)
        if len(sides) != 2:
            return False
        k = i + int(np.argmin(d))
        ahead = float(np.dot((pa[k] - pb[k])[:2], fb[k][:2]))
        return ahead > 0 if in_front else ahead < 0

    def _passing_in_front(self, a, b, *, i, j):
        return self._passing(a, b, i, j, True)

    def _passing_behind(self, a, b, *, i, j):
        return self._passing(a, b, i, j, False)


def frame_range(times: np.ndarray, t1: float, t2: float) -> tuple[int, int]:
    i = int(np.searchsorted(times, t1 - 1e-9, side="left"))
    j = int(np.searchsorted(times, t2 + 1e-9, side="right")) - 1
    return i, j


def evaluate(pred, args, interval, scene, config: EngineConfig = DEFAULT_CONFIG,
             store: SignalStore | None = None) -> bool:
    """Truth of a motion predicate over a time interval of the scene."""
    pred = predicate_from_name(pred) if isinstance(pred, str) else pred
    t1, t2 = (interval.t1, interval.t2) if hasattr(interval, "t1") else interval
    store = store or SignalStore(scene, config)
    rng = store.valid_range(*args)
    if rng is None or t1 < store.times[rng[0]] - 1e-9 or t2 > store.times[rng[1]] + 1e-9:
        raise TimeRangeError(f"[{t1}, {t2}] is outside the common span of {', '.join(map(str, args))}")
    i, j = frame_range(store.times, t1, t2)
    return MotionEvaluator(store).holds(pred, list(args), i, j)
