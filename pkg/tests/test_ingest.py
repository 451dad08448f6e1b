import copy
import json
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from qsground import dsl, ingest
from qsground.engine import Engine
from qsground.truth import compare


def minimal():
    return {
        "format_version": 1,
        "frame_rate": 30,
        "objects": [{"id": "cup1", "class": "cup", "shape": "box"}],
        "frames": [
            {"t": 0.0, "objects": {"cup1": {"centroid": [0.5, 0.5, 0.5], "bbox": [[0, 0, 0], [1, 1, 1]]}}},
            {"t": 1 / 30, "objects": {"cup1": {"centroid": [0.5, 0.5, 0.5], "bbox": [[0, 0, 0], [1, 1, 1]]}}},
        ],
    }


def test_minimal_file(tmp_path):
    p = tmp_path / "m.scene.json"
    p.write_text(json.dumps(minimal()))
    scene = ingest.load(p)
    assert list(scene.histories) == ["cup1"]
    assert len(scene.histories["cup1"]) == 2


def test_duplicate_timestamp_names_frame():
    doc = minimal()
    doc["frames"][1]["t"] = 0.0
    with pytest.raises(ingest.SceneFormatError, match="frame 1") as e:
        ingest.from_dict(doc)
    assert e.value.frame == 1


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d["frames"][0]["objects"].update({"ghost": {"centroid": [0, 0, 0]}}), "objects.ghost"),
    (lambda d: d["frames"][1]["objects"]["cup1"].update({"bbox": [[0, 0, 0], [0, 1, 1]]}), "objects.cup1"),
    (lambda d: d["frames"][0]["objects"]["cup1"].update({"polygon": [[0, 0, 0]] * 3}), "objects.cup1"),
    (lambda d: d["frames"][1]["objects"]["cup1"]["bbox"].__setitem__(0, [0, "x", 0]), "bbox[0]"),
    (lambda d: d["objects"].append({"id": "cup1", "class": "cup", "shape": "box"}), "objects[1].id"),
    (lambda d: d.update({"format_version": 7}), "format_version"),
    (lambda d: d.update({"frame_rate": 0}), "frame_rate"),
    (lambda d: d["objects"].append({"id": "p", "class": "person", "shape": "box"}), "objects[1]"),
])
def test_malformed_records_are_rejected_with_path(mutate, where):
    doc = minimal()
    mutate(doc)
    with pytest.raises(ingest.SceneFormatError, match=where.replace("[", r"\[").replace("]", r"\]")):
        ingest.from_dict(doc)


def test_low_confidence_warns():
    doc = {
        "format_version": 1, "frame_rate": 30,
        "objects": [{"id": "p1", "class": "person", "shape": "skeleton"}],
        "frames": [{"t": k / 30, "skeletons": {"p1": {"hand_left": [0, 0, 0, 0.1], "head": [0, 0, 1]}}}
                   for k in range(3)],
    }
    with pytest.warns(ingest.LowConfidenceWarning):
        scene = ingest.from_dict(doc)
    assert "hand_left" not in scene.skeletons["p1"].poses[0].tracked()


def test_two_people_and_cup_end_to_end():
    doc, _ = ingest.fixture("pass_cup")
    scene = ingest.from_dict(doc)
    assert sorted(o.id for o in scene.objects) == ["cup1", "person1", "person2", "table1"]
    assert len(scene.times) >= 90
    assert Engine(scene, dsl.load_standard_library()).detect_all()


def test_pass_cup_sidecar_lists_the_narrative():
    _, truth = ingest.fixture("pass_cup")
    rules = [r["rule"] for r in truth["interactions"]]
    for name in ("reach_for", "pick_up", "move_towards", "grasp", "release"):
        assert name in rules


def test_reach_only_has_one_interaction():
    _, truth = ingest.fixture("reach_only")
    assert len(truth["interactions"]) == 1


def test_same_seed_byte_identical(tmp_path):
    a = ingest.write_fixture("pass_cup", tmp_path / "a.scene.json", seed=3, sigma=0.005)
    b = ingest.write_fixture("pass_cup", tmp_path / "b.scene.json", seed=3, sigma=0.005)
    assert a[0].read_bytes() == b[0].read_bytes()
    assert a[1].read_bytes() == b[1].read_bytes()
    c = ingest.write_fixture("pass_cup", tmp_path / "c.scene.json", seed=4, sigma=0.005)
    assert c[0].read_bytes() != a[0].read_bytes()


def test_truth_path():
    assert ingest.truth_path("x/pass.scene.json").name == "pass.truth.json"


def test_unknown_fixture():
    with pytest.raises(ingest.UnknownFixtureError):
        ingest.fixture("juggling")


@pytest.mark.parametrize("name", ingest.FIXTURES)
def test_every_fixture_truth_is_reproduced(name):
    doc, truth = ingest.fixture(name)
    engine = Engine(ingest.from_dict(doc), dsl.load_standard_library())
    assert [str(m) for m in compare(engine, truth)] == []


@pytest.mark.parametrize("name", ingest.FIXTURES)
def test_round_trip(name, tmp_path):
    doc, _ = ingest.fixture(name, seed=1, sigma=0.003)
    scene = ingest.from_dict(doc)
    p = tmp_path / "rt.scene.json"
    ingest.save(scene, p)
    assert ingest.load(p) == scene


coord = st.floats(-2, 2, allow_nan=False).map(lambda v: round(v, 4))


@st.composite
def scene_docs(draw):
    n_obj = draw(st.integers(1, 3))
    n_frames = draw(st.integers(2, 6))
    objects, frames = [], []
    for k in range(n_obj):
        objects.append({"id": f"o{k}", "class": draw(st.sampled_from(["cup", "box"])),
                        "shape": draw(st.sampled_from(["point", "box", "polygon"]))})
    for f in range(n_frames):
        recs = {}
        for o in objects:
            x, y = draw(coord), draw(coord)
            if o["shape"] == "point":
                recs[o["id"]] = {"centroid": [x, y, 0.0]}
            elif o["shape"] == "box":
                recs[o["id"]] = {"centroid": [x + 0.5, y + 0.5, 0.5], "bbox": [[x, y, 0.0], [x + 1, y + 1, 1.0]]}
            else:
                recs[o["id"]] = {"centroid": [x, y, 0.0],
                                 "polygon": [[x, y, 0.0], [x + 1, y, 0.0], [x, y + 1, 0.0]]}
        frames.append({"t": f / 10, "objects": recs})
    return {"format_version": 1, "frame_rate": 10.0, "objects": objects, "frames": frames}


@settings(max_examples=100, deadline=None)
@given(scene_docs())
def test_round_trip_random(doc):
    scene = ingest.from_dict(doc)
    assert ingest.from_dict(json.loads(ingest.dumps(ingest.to_dict(scene)))) == scene


@settings(max_examples=200, deadline=None)
@given(scene_docs(), st.data())
def test_load_never_accepts_broken_invariants(doc, data):
    doc = copy.deepcopy(doc)
    kind = data.draw(st.sampled_from(["time", "undeclared", "shape", "nan"]))
    if kind == "time":
        doc["frames"][-1]["t"] = doc["frames"][0]["t"]
    elif kind == "undeclared":
        doc["frames"][0]["objects"]["zz"] = {"centroid": [0, 0, 0]}
    elif kind == "shape":
        o = doc["objects"][0]
        rec = doc["frames"][-1]["objects"][o["id"]]
        if o["shape"] == "box":
            rec.pop("bbox")
        elif o["shape"] == "polygon":
            rec["polygon"] = rec["polygon"][:2]
        else:
            rec["bbox"] = [[0, 0, 0], [1, 1, 1]]
    else:
        doc["frames"][0]["objects"][doc["objects"][0]["id"]]["centroid"][0] = float("nan")
    with pytest.raises(ingest.SceneFormatError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ingest.from_dict(doc)
