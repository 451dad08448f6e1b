"""
Writing an interaction rule
===========================

Defines a small rule in the rule language, runs it over a scripted scene of
two tracked objects, and answers one-shot goals the way the command line
does.
"""

from qsground import Engine, dsl
from qsground.entities import Box3, DomainObject, Point3, SpaceTimeHistory
from qsground.scene import Scene

# Two objects at 30 Hz: a toy car rolls up to a block, rests against it,
# then pushes it along.
rate = 30.0
times = [k / rate for k in range(91)]


def block_x(t):
    return 0.0 if t < 2.2 else 0.3 * (t - 2.2)


def car_x(t):
    return -1.0 + 0.6 * t if t < 1.5 else block_x(t) - 0.1


car = [(t, Point3(car_x(t), 0.0, 0.05)) for t in times]
block = [(t, Box3.from_bounds((block_x(t) - 0.1, -0.1, 0.0), (block_x(t) + 0.1, 0.1, 0.2))) for t in times]
scene = Scene(
    rate,
    [DomainObject("car", "toy"), DomainObject("block", "box")],
    {"car": SpaceTimeHistory.from_samples("car", car), "block": SpaceTimeHistory.from_samples("block", block)},
    {},
)

# A rule: A approaches B until they touch, and B starts moving later while
# the two are still in contact.
source = """
interaction push(A, B) during D :-
    toy(A), box(B),
    approaching(A, B) holds-in I1,
    touches(A, B) holds-in I2,
    moving(B) holds-in I3,
    meets(I1, I2), finishes(I3, I2),
    starts(I1, D), ends(I3, D).
"""
result = dsl.parse(source)
for d in result.diagnostics:
    print(d)
rules = result.declarations
print(dsl.pretty(rules))

engine = Engine(scene, rules)
for occ in engine.detect_all():
    print(f"{occ.rule}({', '.join(occ.args)}) during [{occ.interval.t1:.2f}, {occ.interval.t2:.2f}]")

# Mistakes are reported with a position rather than raising.
broken = dsl.parse("interaction oops(A) during D :- flies(A) holds-in D.")
for d in broken.diagnostics:
    print("diagnostic:", d)

# Goals: who pushes what, and which object moves at t = 2.5?
for text in ("occurs-in(push(X, Y), D)", "holds-at(moving(block), 1.0)", "holds-at(moving(block), 2.5)"):
    goal, _ = dsl.parse_goal(text)
    rows = engine.solve_goal(goal)
    if not rows:
        print(f"{text}: no solutions")
    for binding, answer in rows:
        shown = [f"{k}={v}" for k, v in binding.items()]
        if hasattr(answer, "t1"):
            shown.append(f"D=[{answer.t1:.2f}, {answer.t2:.2f}]")
        print(f"{text}: {', '.join(shown) or 'true'}")
