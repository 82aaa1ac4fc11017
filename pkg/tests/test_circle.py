from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from circorder.circle import (
    INF,
    Cut,
    CutPointCollision,
    LiftedMap,
    MoebiusMap,
    PLCircleMap,
    ProjectivePoint as P,
    SupportViolation,
    arc_contains,
    compose,
    cyclic_ord,
    perturb,
    rotation_number,
    translation_number,
)

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=60)
turns = st.fractions(min_value=0, max_value=F(99, 100), max_denominator=100)


def test_projective_normalization():
    assert P(2, 4) == P(-1, -2) == P.of(F(1, 2))
    assert P(-3, 0) == INF
    with pytest.raises(ValueError):
        P(0, 0)


def test_turn_chart_reference_points():
    assert [P.of(x).turn() for x in (None, -1, 0, 1)] == [0, F(1, 4), F(1, 2), F(3, 4)]


@given(fracs)
def test_turn_chart_round_trip(x):
    assert P.from_turn(P.of(x).turn()) == P.of(x)


@given(fracs, fracs, fracs)
def test_cyclic_ord_matches_turn_order(x, y, z):
    px, py, pz = P.of(x), P.of(y), P.of(z)
    tx, ty, tz = px.turn(), py.turn(), pz.turn()
    if len({tx, ty, tz}) < 3:
        assert cyclic_ord(px, py, pz) == 0
    else:
        ccw = (tx < ty < tz) or (ty < tz < tx) or (tz < tx < ty)
        assert cyclic_ord(px, py, pz) == (1 if ccw else -1)


def test_cyclic_ord_on_infinity():
    assert cyclic_ord(INF, P.of(-1), P.of(0)) == 1
    assert cyclic_ord(INF, P.of(0), P.of(-1)) == -1


@given(fracs, fracs, fracs)
def test_moebius_preserves_orientation(x, y, z):
    m = MoebiusMap(2, 1, 1, 1)
    pts = [P.of(t) for t in (x, y, z)]
    assert cyclic_ord(*[m.apply(p) for p in pts]) == cyclic_ord(*pts)


def test_moebius_rejects_reversing():
    with pytest.raises(ValueError):
        MoebiusMap(0, 1, 1, 0)


def test_hyperbolic_fixes_and_contracts():
    m = MoebiusMap.hyperbolic(P.of(1), P.of(-1), 4)
    assert m.apply(P.of(1)) == P.of(1)
    assert m.apply(P.of(-1)) == P.of(-1)
    x = P.of(0)
    for _ in range(5):
        x = m.apply(x)
    assert abs(x.affine() - 1) < F(1, 100)


def test_moebius_inverse_and_json():
    m = MoebiusMap(3, 1, 2, 1)
    assert (m @ m.inverse()) == MoebiusMap.identity()
    assert MoebiusMap.from_json(m.to_json()) == m


def test_pl_map_basics():
    f = PLCircleMap((F(0), F(1, 2)), (F(0), F(1, 4)))
    assert f.apply_turn(F(1, 4)) == F(1, 8)
    assert f.apply_turn(F(3, 4)) == F(5, 8)
    assert f.inverse().compose(f).is_identity()
    with pytest.raises(ValueError):
        PLCircleMap((F(0), F(1, 2)), (F(1, 2), F(1, 2)))


@given(turns, turns)
def test_pl_composition_pointwise(s, t):
    f = PLCircleMap((F(0), F(1, 3)), (F(1, 10), F(2, 3)))
    g = PLCircleMap.rotation(s)
    assert f.compose(g).apply_turn(t) == f.apply_turn(g.apply_turn(t))
    assert compose(f, g).apply_turn(t) == f.apply_turn(g.apply_turn(t))


def test_perturb_checks_support():
    bump = PLCircleMap((F(1, 10), F(1, 5), F(3, 10)), (F(1, 10), F(1, 4), F(3, 10)))
    m = PLCircleMap.rotation(F(1, 7))
    out = perturb(m, bump, (F(1, 10), F(3, 10)))
    assert out.apply_turn(F(1, 2) - F(1, 7)) == F(1, 2)
    with pytest.raises(SupportViolation):
        perturb(m, bump, (F(1, 10), F(1, 5)))


def test_arc_contains_wraps():
    assert arc_contains(F(9, 10), F(1, 10), F(0))
    assert not arc_contains(F(9, 10), F(1, 10), F(1, 2))
    assert not arc_contains(F(1, 10), F(2, 10), F(1, 10), closed=False)


def test_cut_collision_and_round_trip():
    cut = Cut()
    with pytest.raises(CutPointCollision):
        cut.line_of_turn(F(0))
    x = F(13, 4)
    assert cut.to_line(cut.from_line(x)) == x


def test_lift_of_rotation_is_translation():
    rot = PLCircleMap.rotation(F(1, 3))
    lm = LiftedMap.through(rot, P.of(0))
    x = F(2, 5)
    assert lm.line_apply(x) == x + F(1, 3)
    assert lm.shifted(2).line_apply(x) == x + F(7, 3)
    assert lm.inverse().line_apply(lm.line_apply(x)) == x
    assert translation_number(lm, 10) == F(1, 3)


def test_lift_composition():
    f = LiftedMap.through(PLCircleMap((F(0), F(1, 2)), (F(0), F(1, 4))), P.of(0), 1)
    g = LiftedMap.through(PLCircleMap.rotation(F(2, 5)), P.of(-1))
    h = f.after(g)
    for x in (F(1, 7), F(3, 2), F(-5, 3)):
        assert h.line_apply(x) == f.line_apply(g.line_apply(x))


def test_rotation_number_of_elliptic_rational_map():
    # x -> (x - 1)/(x + 1) sends inf -> 1 -> 0 -> -1 -> inf: a quarter turn backwards
    m = MoebiusMap(1, -1, 1, 1)
    lm = LiftedMap.through(m, P.of(0), cut=Cut(P.of(F(1, 3))))
    assert rotation_number(lm, 8) == F(3, 4)


def test_orbit_through_cut_point_is_an_error():
    m = MoebiusMap(1, -1, 1, 1)
    lm = LiftedMap.through(m, P.of(0))
    with pytest.raises(CutPointCollision):
        rotation_number(lm, 8)


def test_rotation_number_finite_order_elliptic():
    # trace^2 / det = 3: order six, turning backwards
    m = MoebiusMap(2, -1, 1, 1)
    lm = LiftedMap.through(m, P.of(0), cut=Cut(P.of(F(1, 3))))
    assert rotation_number(lm, 6) == F(5, 6)


def test_rotation_number_undetermined_for_irrational():
    # trace^2 / det = 9/4: rotation by an irrational angle
    m = MoebiusMap(2, -1, 2, 1)
    lm = LiftedMap.through(m, P.of(0), cut=Cut(P.of(F(1, 3))))
    assert rotation_number(lm, 6) is None


def test_hyperbolic_lift_through_fixed_point_has_zero_rotation():
    m = MoebiusMap.hyperbolic(P.of(1), P.of(-1), 3)
    lm = LiftedMap.fixed_point_lift(m, P.of(1))
    assert translation_number(lm, 5) == 0
    assert rotation_number(lm.shifted(1), 5, cover_degree=3) == F(1, 3)
