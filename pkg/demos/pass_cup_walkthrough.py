"""
Grounding a cup hand-over
=========================

Builds the synthetic ``pass_cup`` scene, runs the standard interaction
library over it and prints each occurrence with the fluent intervals that
justify it.
"""

import tempfile
from pathlib import Path

from qsground import Engine, FluentAtom, PartRef, fixture, load, load_standard_library, save
from qsground.ingest import from_dict

# A fixture is a scene document plus its scripted ground truth.
doc, truth = fixture("pass_cup", seed=0, sigma=0.0)
scene = from_dict(doc)
print(f"{len(scene.times)} frames at {scene.frame_rate:g} Hz, objects: {', '.join(scene.object_ids())}")

# Scenes round-trip through JSON files.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "pass_cup.scene.json"
    save(scene, path)
    assert load(path) == scene

# The engine evaluates fluents lazily and caches their timelines.
engine = Engine(scene, load_standard_library())
hand = PartRef("hand_right", "person1")
for pred in ("approaching", "touches", "attached"):
    tl = engine.timeline(FluentAtom(pred, (hand, "cup1")))
    spans = ", ".join(f"[{iv.t1:.2f}, {iv.t2:.2f}]" for iv in tl.intervals) or "never"
    print(f"{pred}({hand}, cup1): {spans}")

# Every detected interaction carries its grounding: which literal matched which interval.
print()
for occ in engine.detect_all():
    print(f"{occ.rule}({', '.join(occ.args)}) during [{occ.interval.t1:.2f}, {occ.interval.t2:.2f}]")
    atoms = dict(occ.atoms)
    for idx, iv in occ.grounding:
        print(f"    {atoms[idx]:<55} [{iv.t1:.2f}, {iv.t2:.2f}]")

# The scripted truth lists the same interactions.
print()
print("scripted:", ", ".join(r["rule"] for r in truth["interactions"]))
