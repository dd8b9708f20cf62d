import math

import pytest
from hypothesis import given, strategies as st

from projfilter.bands import windows_from_mu, windows_from_theta
from projfilter.errors import CoincidentPoints, DegenerateMap, DegenerateWindows, OutOfRange
from projfilter.projline import (INF, PI, ZERO, Arc, MobiusMap, ProjPoint, cross_ratio,
                                 cyclic_position, cyclically_ordered, fubini_study_distance)

reals = st.floats(-1e6, 1e6, allow_nan=False)
angles = st.floats(0, math.pi, exclude_max=True)


def test_infinity_and_zero_are_canonical():
    assert ProjPoint.from_real("inf") == INF
    assert ProjPoint.from_real(math.inf).is_infinite
    assert ProjPoint(0.0, -2.0) == ZERO
    assert INF.angle == pytest.approx(PI / 2)


@given(reals)
def test_real_round_trip(x):
    assert ProjPoint.from_real(x).to_real() == pytest.approx(x, rel=1e-12, abs=1e-12)


@given(angles)
def test_angle_round_trip(phi):
    pt = ProjPoint.from_angle(phi)
    assert fubini_study_distance(pt, ProjPoint.from_angle(pt.angle)) < 1e-12


def test_distance_folds_at_half_turn():
    assert fubini_study_distance(ProjPoint.from_real(0.0), INF) == pytest.approx(PI / 2)
    a, b = ProjPoint.from_angle(0.1), ProjPoint.from_angle(PI - 0.1)
    assert fubini_study_distance(a, b) == pytest.approx(0.2)


def test_cyclic_order_through_infinity():
    pts = [ProjPoint.from_real(x) for x in (1.0, 5.0, "inf", -3.0)]
    assert cyclically_ordered(pts)
    assert not cyclically_ordered(pts[::-1])
    with pytest.raises(CoincidentPoints):
        cyclic_position(pts[0], pts[0], pts[1])


def test_singular_map_rejected():
    with pytest.raises(DegenerateMap):
        MobiusMap(1, 2, 2, 4)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4), reals)
def test_inverse_and_composition(coef, x):
    a, b, c, d = coef
    if abs(a * d - b * c) < 1e-2:
        return
    m = MobiusMap(a, b, c, d)
    pt = ProjPoint.from_real(x)
    assert fubini_study_distance(m.inverse()(m(pt)), pt) < 1e-8
    assert fubini_study_distance(m.compose(m.inverse())(pt), pt) < 1e-8


def test_rotation_shifts_angle():
    m = MobiusMap.rotation(0.3)
    pt = ProjPoint.from_angle(0.5)
    assert m(pt).angle == pytest.approx(0.8)
    assert m.preserves_orientation


def test_arc_through_infinity():
    arc = Arc.from_reals(2.0, -2.0)
    assert arc.contains_infinity
    assert arc.contains(ProjPoint.from_real(100.0))
    assert not arc.contains(ZERO)
    assert arc.length == pytest.approx(2 * math.atan(0.5))


def test_arc_image_under_reflection_swaps_ends():
    arc = Arc.from_reals(1.0, 2.0)
    img = arc.image(MobiusMap(-1, 0, 0, 1))
    assert img.start.to_real() == pytest.approx(-2.0)
    assert img.end.to_real() == pytest.approx(-1.0)


def test_cross_ratio_examples():
    assert cross_ratio(windows_from_mu(1 / 3)) == pytest.approx(9.0, rel=1e-12)
    assert cross_ratio(windows_from_theta(0.5)) == pytest.approx(25 / 16, rel=1e-12)


def test_windows_must_be_disjoint_and_ordered():
    from projfilter.bands import ValueWindows
    with pytest.raises(DegenerateWindows):
        ValueWindows.from_reals(-1.0, 0.5, 0.5, 1.0)
    with pytest.raises(DegenerateWindows):
        ValueWindows.from_reals(0.5, 1.0, -1.0, -0.5 + 2.0)
    with pytest.raises(OutOfRange):
        windows_from_mu(1.0)
