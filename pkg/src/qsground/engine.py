"""Fluent evaluation and interaction matching.

The engine answers three kinds of questions about a scene:

* ``holds_at(atom, t)``: is a ground fluent true at a time point;
* ``timeline(atom)``: the maximal intervals over which it holds;
* ``detect(rule)``: every occurrence of an interaction rule.

Timelines are memoized per ground atom. Matching first collects every
ground atom a rule needs, computes their timelines (optionally in a thread
pool), then walks interval combinations in chronological order.
"""

from __future__ import annotations

import itertools
import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .body import SIDED_PARTS, part_variants
from .config import DEFAULT_CONFIG, EngineConfig
from .dsl import AllenLit, Atom, BodyPartTerm, Const, Decl, Guard, HoldsIn, Var
from .entities import EntityError, OrientedPoint, Point3, TimeInterval, TimeRangeError, LineSegment
from .motion import TREND, MotionEvaluator, MotionPredicate, SignalStore, predicate_from_name
from .relations import (
    LR,
    Allen,
    OrientationUndefinedError,
    Topology,
    allen_from_name,
    interval_relation,
    lr,
    qdc_label,
    relative_orientation,
    size_label,
    UnitMismatchError,
)
from .scene import PartRef, UnknownObjectError
from .vocabulary import BUILTIN_ARITY, COARSE, FACING, FRAME_PREDICATES, QDC, RCC8, SIDES, SIZE

EPS = 1e-9


class UnknownPredicateError(KeyError):
    pass


@dataclass(frozen=True)
class FluentAtom:
    pred: str
    args: tuple

    def __str__(self) -> str:
        return f"{self.pred}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class FluentTimeline:
    atom: FluentAtom
    intervals: tuple
    merged_gaps: tuple = ()

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains(self, t1: float, t2: float) -> bool:
        return any(iv.t1 - EPS <= t1 and t2 <= iv.t2 + EPS for iv in self.intervals)

    def covering(self, t: float):
        for iv in self.intervals:
            if iv.t1 - EPS <= t <= iv.t2 + EPS:
                return iv
        return None


@dataclass(frozen=True)
class InteractionOccurrence:
    rule: str
    args: tuple
    interval: TimeInterval
    grounding: tuple = ()  # (body index, TimeInterval) per holds-in literal
    atoms: tuple = ()  # (body index, ground atom text)

    def key(self):
        return (self.interval.t1, self.rule, self.args, self.interval.t2)

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "args": list(self.args),
            "interval": self.interval.as_list(),
            "grounding": {str(k): iv.as_list() for k, iv in self.grounding},
            "atoms": {str(k): a for k, a in self.atoms},
        }


def occurrences_json(occs) -> list[dict]:
    return [o.to_json() for o in sorted(occs, key=InteractionOccurrence.key)]


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class _Grounded:
    """One rule binding with body parts resolved to concrete sides."""

    binding: dict
    literals: list  # (body index, ivar, FluentAtom)


class Engine:
    def __init__(self, scene, rules=(), config: EngineConfig = DEFAULT_CONFIG):
        self.scene = scene
        self.config = config
        self.store = SignalStore(scene, config)
        self.motion = MotionEvaluator(self.store)
        self.rules: dict[str, Decl] = {}
        for d in rules:
            self.rules[d.name] = d
        self._timelines: dict = {}
        self._frames: dict = {}
        self._detected: dict = {}
        self._lock = threading.RLock()

    # --- atoms ------------------------------------------------------------

    def atom(self, pred: str, *args) -> FluentAtom:
        return FluentAtom(pred, tuple(args))

    def arity(self, pred: str) -> int:
        if pred in BUILTIN_ARITY:
            return BUILTIN_ARITY[pred]
        if pred in self.rules:
            return self.rules[pred].arity
        raise UnknownPredicateError(f"unknown predicate {pred}")

    def _check_atom(self, atom: FluentAtom) -> None:
        n = self.arity(atom.pred)
        if n != len(atom.args):
            raise ValueError(f"{atom.pred} takes {n} argument(s), got {len(atom.args)}")
        for a in atom.args:
            self.scene.obj(a.person if isinstance(a, PartRef) else a)

    def _refs_ok(self, atom: FluentAtom) -> bool:
        return all(self.scene.has_history(a) for a in atom.args)

    # --- per-frame truth of frame-level relations ----------------------------

    def _frame_truth(self, atom: FluentAtom) -> np.ndarray:
        """Boolean per scene frame; False where an argument has no data."""
        key = atom
        if key in self._frames:
            return self._frames[key]
        n = len(self.store.times)
        out = np.zeros(n, dtype=bool)
        if self._refs_ok(atom):
            a, b = atom.args
            rng = self.store.valid_range(a, b)
            if rng is not None:
                lo, hi = rng
                out[lo:hi + 1] = self._relation_series(atom.pred, a, b, lo, hi)
        with self._lock:
            self._frames[key] = out
        return out

    def _relation_series(self, pred, a, b, lo, hi) -> np.ndarray:
        cfg = self.config
        k = np.arange(lo, hi + 1)
        if pred in ("touches", "apart"):
            d = self.store.raw_distance(a, b)[k]
            return d <= cfg.contact_distance if pred == "touches" else d > cfg.contact_distance
        if pred in RCC8 or pred in COARSE or pred == "inside":
            trace = self.store.topology(a, b)
            if pred in RCC8:
                return np.array([trace[i] is RCC8[pred] for i in k])
            if pred == "inside":
                return np.array([trace[i] in (Topology.TPP, Topology.NTPP) for i in k])
            code = COARSE[pred]
            return np.array([code in trace[i].coarse() for i in k])
        if pred in QDC:
            d = self.store.raw_distance(a, b)[k]
            L = max(self.store.char_length(a), self.store.char_length(b))
            return np.array([qdc_label(x, L, cfg).value == pred for x in d])
        if pred in SIZE:
            sa, ua = self.store.size(a)
            sb, ub = self.store.size(b)
            if ua != ub:
                raise UnitMismatchError(f"{pred} compares sizes in {ua} and {ub}")
            from .metrics import MetricValue

            return np.array([size_label(MetricValue(sa[i], ua), MetricValue(sb[i], ub), cfg).value == pred
                             for i in k])
        if pred in FACING or pred in SIDES:
            pa, pb = self.store.position(a), self.store.position(b)
            fa, fb = self.store.facing(a), self.store.facing(b)
            res = np.zeros(len(k), dtype=bool)
            for n_, i in enumerate(k):
                res[n_] = self._oriented(pred, pa[i], pb[i], fa[i], fb[i])
            return res
        raise UnknownPredicateError(f"unknown predicate {pred}")

    def _oriented(self, pred, pa, pb, fa, fb) -> bool:
        if pred in SIDES:
            if np.any(np.isnan(fb)) or math.hypot(fb[0], fb[1]) <= EPS:
                return False
            seg = LineSegment(Point3(*pb), Point3(*(pb + fb)))
            try:
                return lr(seg, Point3(*pa), self.config.geometric_tolerance) is LR(pred)
            except ValueError:
                return False
        if np.any(np.isnan(fa)) or np.any(np.isnan(fb)):
            return False
        try:
            rel = relative_orientation(OrientedPoint(Point3(*pa), tuple(fa)),
                                       OrientedPoint(Point3(*pb), tuple(fb)), self.config)
        except (OrientationUndefinedError, EntityError, ValueError):
            return False
        return pred in {x.value for x in rel.labels()}

    # --- holds_at -------------------------------------------------------------

    def _motion_window(self, pred: MotionPredicate) -> float:
        return self.config.window if pred in TREND else self.config.event_window

    def _frame_index(self, atom: FluentAtom, t: float) -> tuple[int, tuple[int, int]]:
        rng = self.store.valid_range(*atom.args)
        times = self.store.times
        if rng is None or t < times[rng[0]] - EPS or t > times[rng[1]] + EPS:
            raise TimeRangeError(f"t={t} is outside the common span of {atom}")
        k = int(np.argmin(np.abs(times[rng[0]:rng[1] + 1] - t))) + rng[0]
        return k, rng

    def _motion_at(self, pred: MotionPredicate, args, k: int, rng) -> bool:
        times = self.store.times
        half = self._motion_window(pred)
        i = max(rng[0], int(np.searchsorted(times, times[k] - half - EPS, side="left")))
        j = min(rng[1], int(np.searchsorted(times, times[k] + half + EPS, side="right")) - 1)
        return self.motion.holds(pred, list(args), i, j)

    def holds_at(self, atom: FluentAtom, t: float) -> bool:
        self._check_atom(atom)
        if atom.pred in self.rules:
            return self.timeline(atom).covering(t) is not None
        k, rng = self._frame_index(atom, t)
        if atom.pred in FRAME_PREDICATES:
            return bool(self._frame_truth(atom)[k])
        return self._motion_at(predicate_from_name(atom.pred), atom.args, k, rng)

    # --- timelines --------------------------------------------------------------

    def timeline(self, atom: FluentAtom) -> FluentTimeline:
        cached = self._timelines.get(atom)
        if cached is not None:
            return cached
        self._check_atom(atom)
        if atom.pred in self.rules:
            tl = self._derived_timeline(atom)
        elif not self._refs_ok(atom) or self.store.valid_range(*atom.args) is None:
            tl = FluentTimeline(atom, ())
        else:
            tl = self._builtin_timeline(atom)
        with self._lock:
            self._timelines.setdefault(atom, tl)
        return self._timelines[atom]

    def _truth_series(self, atom: FluentAtom, rng) -> np.ndarray:
        if atom.pred in FRAME_PREDICATES:
            return self._frame_truth(atom)
        pred = predicate_from_name(atom.pred)
        out = np.zeros(len(self.store.times), dtype=bool)
        for k in range(rng[0], rng[1] + 1):
            out[k] = self._motion_at(pred, atom.args, k, rng)
        return out

    def _builtin_timeline(self, atom: FluentAtom) -> FluentTimeline:
        rng = self.store.valid_range(*atom.args)
        truth = self._truth_series(atom, rng)
        runs = _runs(truth[rng[0]:rng[1] + 1], rng[0])
        motion = None if atom.pred in FRAME_PREDICATES else predicate_from_name(atom.pred)
        merged, gaps = self._merge_runs(runs, motion, atom.args)
        return self._finish(atom, merged, gaps)

    def _merge_runs(self, runs, motion, args):
        times = self.store.times
        out, gaps = [], []
        for run in runs:
            if out:
                prev = out[-1]
                gap = times[run[0]] - times[prev[1]]
                if gap <= self.config.gap_merge + EPS:
                    # a merged motion run must still satisfy the predicate as a whole
                    if motion is None or self.motion.holds(motion, list(args), prev[0], run[1]):
                        gaps.append((prev[1], run[0]))
                        out[-1] = (prev[0], run[1])
                        continue
            out.append(run)
        return out, gaps

    def _finish(self, atom, runs, gaps) -> FluentTimeline:
        times = self.store.times
        ivs = []
        for i, j in runs:
            t1, t2 = float(times[i]), float(times[j])
            if t2 - t1 > 0 and t2 - t1 >= self.config.min_duration - EPS:
                ivs.append(TimeInterval(t1, t2))
        flagged = tuple(TimeInterval(float(times[a]), float(times[b])) for a, b in gaps
                        if any(iv.t1 <= times[a] and times[b] <= iv.t2 for iv in ivs))
        return FluentTimeline(atom, tuple(ivs), flagged)

    def _derived_timeline(self, atom: FluentAtom) -> FluentTimeline:
        spans = sorted((o.interval.t1, o.interval.t2) for o in self.detect(self.rules[atom.pred])
                       if o.args == tuple(atom.args))
        merged = []
        for t1, t2 in spans:
            if merged and t1 <= merged[-1][1] + self.config.gap_merge + EPS:
                merged[-1] = (merged[-1][0], max(merged[-1][1], t2))
            else:
                merged.append((t1, t2))
        ivs = tuple(TimeInterval(a, b) for a, b in merged if b - a >= self.config.min_duration - EPS)
        return FluentTimeline(atom, ivs)

    def holds_in(self, atom: FluentAtom, interval) -> bool:
        t1, t2 = (interval.t1, interval.t2) if hasattr(interval, "t1") else interval
        return self.timeline(atom).contains(t1, t2)

    def prefetch(self, atoms) -> None:
        """Compute timelines for many atoms, in parallel when configured."""
        todo = sorted({a for a in atoms if a not in self._timelines}, key=str)
        # derived atoms recurse into detect(); keep them on this thread
        plain = [a for a in todo if a.pred not in self.rules]
        derived = [a for a in todo if a.pred in self.rules]
        workers = max(1, int(self.config.workers))
        if workers > 1 and len(plain) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(self.timeline, plain))
        else:
            for a in plain:
                self.timeline(a)
        for a in derived:
            self.timeline(a)

    # --- rule matching ------------------------------------------------------------

    def _guard_ok(self, cls: str, obj_id: str) -> bool:
        o = self.scene.obj(obj_id)
        if cls == "person":
            return o.cls == "person"
        if cls == "object":
            return o.cls != "person"
        return o.cls == cls

    def bindings(self, rule: Decl, fixed: dict | None = None):
        """Assignments of the rule's variables to distinct scene objects."""
        order, guards, persons = [], {}, set()
        for lit in rule.body:
            terms = [lit.term] if isinstance(lit, Guard) else list(lit.atom.args) if isinstance(lit, HoldsIn) else []
            for term in terms:
                if isinstance(term, Var):
                    name = term.name
                elif isinstance(term, BodyPartTerm) and isinstance(term.person, Var):
                    name = term.person.name
                    persons.add(name)
                else:
                    continue
                if name not in order:
                    order.append(name)
            if isinstance(lit, Guard) and isinstance(lit.term, Var):
                guards.setdefault(lit.term.name, []).append(lit.cls)
        for p in rule.params:
            if p not in order:
                order.append(p)
        ids = self.scene.object_ids()
        fixed = dict(fixed or {})

        def candidates(var):
            pool = [fixed[var]] if var in fixed else sorted(ids)
            out = []
            for oid in pool:
                if oid not in self.scene._by_id:
                    raise UnknownObjectError(f"unknown object {oid!r}")
                if not all(self._guard_ok(c, oid) for c in guards.get(var, ())):
                    continue
                if var in persons and oid not in self.scene.skeletons:
                    continue
                out.append(oid)
            return out

        domains = [candidates(v) for v in order]
        for combo in itertools.product(*domains):
            if len(set(combo)) == len(combo):
                yield dict(zip(order, combo))

    def _const_guards_ok(self, rule: Decl) -> bool:
        for lit in rule.body:
            if isinstance(lit, Guard) and isinstance(lit.term, Const):
                if not self._guard_ok(lit.cls, lit.term.name):
                    return False
        return True

    def ground(self, rule: Decl, binding: dict) -> list[_Grounded]:
        """Resolve terms under a binding, one variant per choice of body sides."""
        sided = []
        for _, lit in rule.holds_literals():
            for term in lit.atom.args:
                if isinstance(term, BodyPartTerm) and term.part in SIDED_PARTS:
                    key = (term.part, _resolve_name(term.person, binding))
                    if key not in sided:
                        sided.append(key)
        out = []
        for sides in itertools.product(*[part_variants(p) for p, _ in sided]):
            choice = dict(zip(sided, sides))
            lits = []
            for idx, lit in rule.holds_literals():
                args = tuple(_resolve(term, binding, choice) for term in lit.atom.args)
                lits.append((idx, lit.ivar, FluentAtom(lit.atom.pred, args)))
            out.append(_Grounded(binding, lits))
        return out

    def detect(self, rule: Decl) -> list[InteractionOccurrence]:
        if rule.name in self._detected:
            return self._detected[rule.name]
        if rule.name not in self.rules:
            self.rules[rule.name] = rule
        found = []
        if self._const_guards_ok(rule):
            groundings = [g for b in self.bindings(rule) for g in self.ground(rule, b)]
            self.prefetch(a for g in groundings for _, _, a in g.literals)
            for g in groundings:
                found.extend(self._solve(rule, g))
        seen, unique = set(), []
        for occ in sorted(found, key=InteractionOccurrence.key):
            k = (occ.rule, occ.args, occ.interval)
            if k not in seen:
                seen.add(k)
                unique.append(occ)
        with self._lock:
            self._detected.setdefault(rule.name, unique)
        return self._detected[rule.name]

    def detect_all(self, rules=None) -> list[InteractionOccurrence]:
        rules = list(self.rules.values()) if rules is None else list(rules)
        for r in rules:
            self.rules.setdefault(r.name, r)
        out = []
        for r in rules:
            if r.kind == "interaction":
                out.extend(self.detect(r))
        return sorted(out, key=InteractionOccurrence.key)

    def _solve(self, rule: Decl, g: _Grounded) -> list[InteractionOccurrence]:
        lits = g.literals
        timelines = [self.timeline(a).intervals for _, _, a in lits]
        if any(len(t) == 0 for t in timelines):
            return []
        allen = [lit for lit in rule.body if isinstance(lit, AllenLit)]
        remaining = {}
        for _, iv, _ in lits:
            remaining[iv] = remaining.get(iv, 0) + 1
        # an Allen literal can be checked once both of its variables are final
        checks_at: dict[int, list] = {}
        done = dict.fromkeys(remaining, 0)
        for pos, (_, iv, _) in enumerate(lits):
            done[iv] += 1
            if done[iv] == remaining[iv]:
                for a in allen:
                    if iv in (a.a, a.b) and all(v in remaining and (v == iv or done[v] == remaining[v])
                                                for v in (a.a, a.b)):
                        checks_at.setdefault(pos, []).append(a)
        min_len = self.config.min_duration
        tol = self.config.time_tolerance
        results = []
        current: dict[str, tuple[float, float]] = {}

        def rec(pos):
            if pos == len(lits):
                occ = self._finish_occurrence(rule, g, dict(current), allen, tol)
                if occ is not None:
                    results.append(occ)
                return
            _, iv, _ = lits[pos]
            prev = current.get(iv)
            for cand in timelines[pos]:
                lo, hi = cand.t1, cand.t2
                if prev is not None:
                    lo, hi = max(lo, prev[0]), min(hi, prev[1])
                if hi - lo <= 0 or hi - lo < min_len - EPS:
                    continue
                current[iv] = (lo, hi)
                if all(_allen_ok(a, current, tol) for a in checks_at.get(pos, ())):
                    rec(pos + 1)
            if prev is None:
                current.pop(iv, None)
            else:
                current[iv] = prev

        rec(0)
        return results

    def _finish_occurrence(self, rule, g, bound, allen, tol):
        d_name = rule.ivar
        if d_name is not None and d_name in bound:
            d = bound[d_name]
        else:
            start = end = None
            for a in allen:
                op = allen_from_name(a.op)
                if a.b == d_name and a.a in bound:
                    x = bound[a.a]
                    if op in (Allen.STARTS, Allen.EQUALS) and start is None:
                        start = x[0]
                    if op in (Allen.FINISHES, Allen.EQUALS) and end is None:
                        end = x[1]
                elif a.a == d_name and a.b in bound:
                    x = bound[a.b]
                    if op in (Allen.STARTED_BY, Allen.EQUALS) and start is None:
                        start = x[0]
                    if op in (Allen.FINISHED_BY, Allen.EQUALS) and end is None:
                        end = x[1]
            if start is None:
                start = min(v[0] for v in bound.values())
            if end is None:
                end = max(v[1] for v in bound.values())
            d = (start, end)
        if not d[1] - d[0] > 0:
            return None
        full = dict(bound)
        if d_name is not None:
            full[d_name] = d
        if not all(_allen_ok(a, full, tol) for a in allen):
            return None
        args = tuple(g.binding[p] for p in rule.params)
        grounding = tuple((idx, TimeInterval(*full[iv])) for idx, iv, _ in g.literals)
        atoms = tuple((idx, str(a)) for idx, _, a in g.literals)
        return InteractionOccurrence(rule.name, args, TimeInterval(*d), grounding, atoms)

    # --- queries ------------------------------------------------------------------

    def solve_goal(self, goal) -> list[tuple[dict, object]]:
        """All (binding, answer) pairs for a parsed goal.

        The answer is a TimeInterval for interval goals and ``True`` for
        point goals that hold.
        """
        atom = goal.atom
        arity = self.arity(atom.pred)
        if arity != len(atom.args):
            raise ValueError(f"{atom.pred} takes {arity} argument(s), got {len(atom.args)}")
        probe = Decl("fluent", "_goal", tuple(_vars_of(atom)), None, (HoldsIn(atom, "G"),))
        rows = []
        for binding in self.bindings(probe):
            for g in self.ground(probe, binding):
                fa = g.literals[0][2]
                if goal.time is not None:
                    try:
                        ok = self.holds_at(fa, goal.time)
                    except TimeRangeError:
                        ok = False
                    if ok:
                        rows.append((binding, True))
                    continue
                if fa.pred in self.rules and self.rules[fa.pred].kind == "interaction":
                    ivs = [o.interval for o in self.detect(self.rules[fa.pred]) if o.args == fa.args]
                else:
                    ivs = list(self.timeline(fa).intervals)
                rows.extend((binding, iv) for iv in ivs)
        uniq = {}
        for b, ans in rows:
            k = (tuple(sorted(b.items())), (ans.t1, ans.t2) if isinstance(ans, TimeInterval) else ())
            uniq.setdefault(k, (b, ans))
        return [uniq[k] for k in sorted(uniq, key=lambda k: (k[1], k[0]))]


# --- helpers --------------------------------------------------------------------


def _runs(mask: np.ndarray, offset: int) -> list[tuple[int, int]]:
    runs, start = [], None
    for k, v in enumerate(mask):
        if v and start is None:
            start = k
        elif not v and start is not None:
            runs.append((start + offset, k - 1 + offset))
            start = None
    if start is not None:
        runs.append((start + offset, len(mask) - 1 + offset))
    return runs


def _resolve_name(term, binding) -> str:
    if isinstance(term, Var):
        return binding[term.name]
    return term.name


def _resolve(term, binding, choice):
    if isinstance(term, BodyPartTerm):
        person = _resolve_name(term.person, binding)
        part = choice.get((term.part, person), term.part)
        return PartRef(part, person)
    return _resolve_name(term, binding)


def _vars_of(atom: Atom) -> list[str]:
    out = []
    for term in atom.args:
        name = term.name if isinstance(term, Var) else (
            term.person.name if isinstance(term, BodyPartTerm) and isinstance(term.person, Var) else None)
        if name and name not in out:
            out.append(name)
    return out


def _allen_ok(lit: AllenLit, bound: dict, tol: float) -> bool:
    if lit.a not in bound or lit.b not in bound:
        return True
    # frame times carry rounding error; a gap of exactly tol counts as equal
    return interval_relation(bound[lit.a], bound[lit.b], tol + EPS) is allen_from_name(lit.op)


def holds_at(atom: FluentAtom, t: float, scene, config: EngineConfig = DEFAULT_CONFIG) -> bool:
    return Engine(scene, config=config).holds_at(atom, t)


def timeline(atom: FluentAtom, scene, config: EngineConfig = DEFAULT_CONFIG) -> FluentTimeline:
    return Engine(scene, config=config).timeline(atom)


def holds_in(atom: FluentAtom, interval, scene, config: EngineConfig = DEFAULT_CONFIG) -> bool:
    return Engine(scene, config=config).holds_in(atom, interval)


def detect(rule: Decl, scene, config: EngineConfig = DEFAULT_CONFIG, library=()) -> list[InteractionOccurrence]:
    return Engine(scene, list(library) + [rule], config).detect(rule)


def detect_all(rules, scene, config: EngineConfig = DEFAULT_CONFIG) -> list[InteractionOccurrence]:
    return Engine(scene, rules, config).detect_all()
