"""Compare engine output against a fixture's ground-truth sidecar."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .engine import Engine, FluentAtom
from .motion import MotionPredicate, evaluate
from .scene import PartRef

_TERM = re.compile(r"body_part\((\w+),(\w+)\)|([\w.\-]+)")


def parse_atom(text: str) -> FluentAtom:
    """Parse the printed form of a ground atom, e.g. ``touches(body_part(hand_right,p1),cup1)``."""
    text = text.replace(" ", "")
    m = re.fullmatch(r"(\w+)\((.*)\)", text)
    if not m:
        raise ValueError(f"not a ground atom: {text!r}")
    args = []
    for t in _TERM.finditer(m.group(2)):
        args.append(PartRef(t.group(1), t.group(2)) if t.group(1) else t.group(3))
    return FluentAtom(m.group(1), tuple(args))


@dataclass(frozen=True)
class Mismatch:
    kind: str  # interaction | fluent
    expected: str
    found: str

    def __str__(self) -> str:
        return f"{self.kind}: expected {self.expected}, found {self.found}"


def _close(a, b, tol) -> bool:
    return abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol


def compare(engine: Engine, truth: dict, occurrences=None) -> list[Mismatch]:
    """Every way the engine's answers differ from the sidecar, within its frame tolerance.

    Interactions must match in number, order, rule and arguments, and each
    interval within ``tolerance_frames``. Fluent entries are checked as
    declared: ``timeline`` needs a maximal interval with matching endpoints,
    ``holds`` / ``not_holds`` evaluate the atom over exactly the given interval.
    """
    tol = truth.get("tolerance_frames", 0) / truth["frame_rate"] + 1e-6
    occs = engine.detect_all() if occurrences is None else occurrences
    out = []
    got = [(o.rule, list(o.args), [o.interval.t1, o.interval.t2]) for o in occs]
    want = [(r["rule"], r["args"], r["interval"]) for r in truth["interactions"]]
    if [g[:2] for g in got] != [w[:2] for w in want]:
        out.append(Mismatch("interaction", _seq(want), _seq(got)))
    else:
        for g, w in zip(got, want):
            if not _close(g[2], w[2], tol):
                out.append(Mismatch("interaction", f"{w[0]}{tuple(w[1])} {w[2]}", f"{g[2]}"))
    for f in truth["fluents"]:
        atom = parse_atom(f["atom"])
        iv = f["interval"]
        check = f.get("check", "timeline")
        if check == "timeline":
            ivs = [[x.t1, x.t2] for x in engine.timeline(atom).intervals]
            if not any(_close(x, iv, tol) for x in ivs):
                out.append(Mismatch("fluent", f"{atom} on {iv}", f"timeline {ivs}"))
            continue
        if atom.pred in MotionPredicate._value2member_map_:
            value = evaluate(atom.pred, list(atom.args), tuple(iv), engine.scene, engine.config, engine.store)
        else:
            value = engine.holds_in(atom, tuple(iv))
        if value != (check == "holds"):
            out.append(Mismatch("fluent", f"{check} {atom} on {iv}", str(value)))
    return out


def _seq(rows) -> str:
    return "[" + ", ".join(f"{r}{tuple(a)}" for r, a, _ in rows) + "]"
