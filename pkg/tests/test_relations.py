import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from builders import scene_of
from qsground.config import DEFAULT_CONFIG
from qsground.entities import Box3, LineSegment, OrientedPoint, Point3, Polygon, TimeInterval
from qsground.metrics import MetricValue
from qsground.relations import (
    LR,
    Allen,
    Orientation,
    Qdc,
    SizeRel,
    Topology,
    UnitMismatchError,
    UnsupportedPairError,
    OrientationUndefinedError,
    block_relation,
    compose,
    interval_relation,
    lr,
    qdc,
    relative_orientation,
    size_label,
    size_relation,
    topology,
    topology_from_blocks,
)


def rect(x0, y0, x1, y1, z0=0.0, z1=1.0):
    return Box3.from_bounds((x0, y0, z0), (x1, y1, z1))


def square_poly(x0, y0, x1, y1):
    return Polygon(tuple(Point3(x, y) for x, y in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))))


class TestTopology:
    def test_dc(self):
        assert topology(rect(0, 0, 1, 1), rect(2, 2, 3, 3)) is Topology.DC

    def test_ec(self):
        assert topology(rect(0, 0, 1, 1), rect(1, 0, 2, 1)) is Topology.EC

    def test_ntppi(self):
        assert oracles.rcc8_grid(((0, 0), (4, 4)), ((1, 1), (2, 2))) == "ntppi"
        assert topology(rect(0, 0, 4, 4), rect(1, 1, 2, 2)) is Topology.NTPPI

    def test_polygons_match_boxes(self):
        for a, b in [((0, 0, 1, 1), (1, 0, 2, 1)), ((0, 0, 4, 4), (0, 1, 2, 2)), ((0, 0, 2, 2), (1, 1, 3, 3))]:
            assert topology(square_poly(*a), square_poly(*b)) is topology(rect(*a), rect(*b))

    def test_point_region(self):
        r = rect(0, 0, 1, 1)
        assert topology(Point3(0.5, 0.5), r) is Topology.NTPP
        assert topology(Point3(1, 0.5), r) is Topology.EC
        assert topology(Point3(2, 2), r) is Topology.DC
        assert topology(r, Point3(0.5, 0.5)) is Topology.NTPPI

    def test_unsupported(self):
        seg = LineSegment(Point3(0, 0), Point3(1, 0))
        with pytest.raises(UnsupportedPairError):
            topology(seg, rect(0, 0, 1, 1))

    def test_coarse_vocabulary(self):
        assert Topology.DC.coarse() == {"dr"}
        assert Topology.EC.coarse() == {"dr", "c"}
        assert Topology.NTPP.coarse() == {"o", "c", "p"}
        assert Topology.PO.rcc5() == "po" and Topology.TPPI.rcc5() == "ppi"


class TestIntervalRelation:
    def test_before(self):
        assert interval_relation((1, 2), (3, 4)) is Allen.BEFORE

    def test_meets(self):
        assert interval_relation(TimeInterval(1, 3), TimeInterval(3, 5)) is Allen.MEETS

    def test_during(self):
        assert interval_relation((2, 3), (1, 5)) is Allen.DURING

    def test_tolerance_snaps_endpoints(self):
        assert interval_relation((1, 2.95), (3, 5), tol=0.1) is Allen.MEETS


class TestBlock:
    def test_identical(self):
        b = rect(0, 0, 1, 1)
        assert block_relation(b, b, 3) == (Allen.EQUALS,) * 3

    def test_before_equals(self):
        assert block_relation(rect(0, 0, 1, 1), rect(2, 0, 3, 1)) == (Allen.BEFORE, Allen.EQUALS)

    def test_overlaps_overlapped_by(self):
        assert oracles.allen(0, 2, 1, 3) == "overlaps" and oracles.allen(1, 4, 0, 2) == "overlapped_by"
        assert block_relation(rect(0, 1, 2, 4), rect(1, 0, 3, 2)) == (Allen.OVERLAPS, Allen.OVERLAPPED_BY)

    def test_non_box(self):
        with pytest.raises(UnsupportedPairError):
            block_relation(Point3(0, 0), rect(0, 0, 1, 1))


class TestLR:
    seg = LineSegment(Point3(0, 0), Point3(1, 0))

    @pytest.mark.parametrize("p,label", [
        ((0.5, 1), LR.LEFT), ((0.5, -1), LR.RIGHT), ((2, 0), LR.FRONT), ((-1, 0), LR.BACK), ((0.5, 0), LR.ON),
    ])
    def test_labels(self, p, label):
        assert lr(self.seg, Point3(*p)) is label

    def test_degenerate(self):
        with pytest.raises(ValueError):
            lr(LineSegment(Point3(0, 0, 0), Point3(0, 0, 1)), Point3(1, 1))


def op(x, y, v):
    return OrientedPoint(Point3(x, y), v)


class TestOrientation:
    def test_facing_towards(self):
        assert relative_orientation(op(0, 0, (1, 0, 0)), op(2, 0, (0, 1, 0))).facing is Orientation.FACING_TOWARDS

    def test_facing_away(self):
        assert relative_orientation(op(0, 0, (-1, 0, 0)), op(2, 0, (0, 1, 0))).facing is Orientation.FACING_AWAY

    def test_same_direction(self):
        assert relative_orientation(op(0, 0, (1, 0, 0)), op(0, 3, (1, 0, 0))).alignment is Orientation.SAME_DIRECTION

    def test_opposite_direction(self):
        rel = relative_orientation(op(0, 0, (1, 0, 0)), op(0, 3, (-1, 0, 0)))
        assert rel.alignment is Orientation.OPPOSITE_DIRECTION

    def test_coincident(self):
        with pytest.raises(OrientationUndefinedError):
            relative_orientation(op(0, 0, (1, 0, 0)), op(0, 0, (1, 0, 0)))


def static_pair(a, b):
    return scene_of({"a": ("thing", [(0.0, a), (1.0, a)]), "b": ("thing", [(0.0, b), (1.0, b)])})


class TestQdc:
    def test_touching(self):
        assert qdc("a", "b", 0, static_pair(rect(0, 0, 1, 1), rect(1, 0, 2, 1))) is Qdc.ADJACENT

    def test_near(self):
        # L = 1; 0.1 <= 1 < 2
        assert qdc("a", "b", 0, static_pair(rect(0, 0, 1, 1), rect(2, 0, 3, 1))) is Qdc.NEAR

    def test_far(self):
        assert qdc("a", "b", 0, static_pair(rect(0, 0, 1, 1), rect(11, 0, 12, 1))) is Qdc.FAR


class TestSize:
    def test_identical(self):
        b = rect(0, 0, 1, 1)
        assert size_relation("a", "b", 0, static_pair(b, b)) is SizeRel.EQUI_SIZED

    def test_smaller(self):
        assert size_label(MetricValue(1, "m3"), MetricValue(8, "m3")) is SizeRel.SMALLER

    def test_within_ratio(self):
        assert size_label(MetricValue(1, "m3"), MetricValue(1.1, "m3")) is SizeRel.EQUI_SIZED

    def test_units(self):
        with pytest.raises(UnitMismatchError):
            size_label(MetricValue(1, "m2"), MetricValue(1, "m3"))


class TestCompose:
    def test_before_before(self):
        assert compose(Allen.BEFORE, Allen.BEFORE) == {Allen.BEFORE}

    @pytest.mark.parametrize("x", list(Allen))
    def test_equals_identity(self, x):
        assert compose(Allen.EQUALS, x) == {x}

    def test_meets_during(self):
        assert compose(Allen.MEETS, Allen.DURING) == {Allen.OVERLAPS, Allen.DURING, Allen.STARTS}

    def test_matches_brute_force_table(self):
        table = oracles.brute_force_composition()
        assert len(table) == 169
        for (r1, r2), expected in table.items():
            assert {x.value for x in compose(Allen(r1), Allen(r2))} == expected, (r1, r2)


lattice = st.integers(0, 8)


def lattice_rect():
    return st.tuples(lattice, lattice, st.integers(1, 5), st.integers(1, 5)).map(
        lambda t: ((t[0], t[1]), (t[0] + t[2], t[1] + t[3])))


@settings(max_examples=400, deadline=None)
@given(lattice_rect(), lattice_rect())
def test_box_topology_agrees_with_blocks_and_grid(r1, r2):
    b1, b2 = rect(*r1[0], *r1[1]), rect(*r2[0], *r2[1])
    direct = topology(b1, b2)
    assert direct.value == oracles.rcc8_grid(r1, r2)
    assert topology_from_blocks(block_relation(b1, b2)) is direct
    assert topology(b2, b1) is direct.converse()


iv = st.tuples(st.integers(0, 20), st.integers(1, 10)).map(lambda t: (t[0], t[0] + t[1]))


@settings(max_examples=500, deadline=None)
@given(iv, iv, iv)
def test_interval_relation_oracle_converse_and_composition(i, j, k):
    r_ij = interval_relation(i, j)
    assert r_ij.value == oracles.allen(*i, *j)
    assert interval_relation(j, i) is r_ij.converse()
    assert interval_relation(i, k) in compose(r_ij, interval_relation(j, k))


pt = st.tuples(st.floats(-5, 5), st.floats(-5, 5))


@settings(max_examples=300, deadline=None)
@given(pt, pt, pt)
def test_lr_flips_under_reversal(a, b, p):
    if math.dist(a, b) < 1e-3:
        return
    fwd = lr(LineSegment(Point3(*a), Point3(*b)), Point3(*p))
    back = lr(LineSegment(Point3(*b), Point3(*a)), Point3(*p))
    swap = {LR.LEFT: LR.RIGHT, LR.RIGHT: LR.LEFT, LR.FRONT: LR.BACK, LR.BACK: LR.FRONT, LR.ON: LR.ON,
            LR.COLLINEAR: LR.COLLINEAR}
    assert back is swap[fwd]


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_qdc_monotone_in_separation(d1, d2):
    lo, hi = sorted((d1, d2))
    rank = {Qdc.ADJACENT: 0, Qdc.NEAR: 1, Qdc.FAR: 2}
    a = qdc("a", "b", 0, static_pair(rect(0, 0, 1, 1), rect(1 + lo, 0, 2 + lo, 1)))
    b = qdc("a", "b", 0, static_pair(rect(0, 0, 1, 1), rect(1 + hi, 0, 2 + hi, 1)))
    assert rank[a] <= rank[b]


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), pt)
def test_orientation_aspects_exclusive(a1, a2, p):
    if math.hypot(*p) < 1e-3:
        return
    rel = relative_orientation(op(0, 0, (math.cos(a1), math.sin(a1), 0)), op(*p, (math.cos(a2), math.sin(a2), 0)))
    assert rel.facing in {Orientation.FACING_TOWARDS, Orientation.FACING_AWAY, Orientation.NEUTRAL}
    assert rel.alignment in {Orientation.SAME_DIRECTION, Orientation.OPPOSITE_DIRECTION, Orientation.NEUTRAL}


def test_default_thresholds():
    assert DEFAULT_CONFIG.facing_half_angle_deg == 45.0
    assert DEFAULT_CONFIG.alignment_threshold_deg == 30.0
    assert DEFAULT_CONFIG.size_ratio == 1.2
