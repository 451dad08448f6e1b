"""Names and arities of the built-in fluent predicates."""

from __future__ import annotations

from .motion import MotionPredicate, arity as motion_arity
from .relations import Topology

RCC8 = {t.value: t for t in Topology}
COARSE = {"discrete": "dr", "overlapping": "o", "connected": "c", "part_of": "p"}
DISTANCE = {"touches", "apart"}
QDC = {"adjacent", "near", "far"}
SIZE = {"smaller", "equi_sized", "larger"}
FACING = {"facing_towards", "facing_away", "same_direction", "opposite_direction"}
SIDES = {"left", "right", "front", "back"}
INSIDE = {"inside"}

FRAME_PREDICATES = set(RCC8) | set(COARSE) | DISTANCE | QDC | SIZE | FACING | SIDES | INSIDE

BUILTIN_ARITY: dict[str, int] = {name: 2 for name in FRAME_PREDICATES}
BUILTIN_ARITY.update({p.value: motion_arity(p) for p in MotionPredicate})
BUILTIN_ARITY["moving_towards"] = 2

ALLEN_OPS = {
    "before", "meets", "overlaps", "starts", "during", "finishes", "equals", "ends",
    "after", "met_by", "overlapped_by", "started_by", "contains", "finished_by",
}
