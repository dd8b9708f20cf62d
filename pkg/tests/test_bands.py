import numpy as np
import pytest
from hypothesis import given, strategies as st

from projfilter.bands import (BandSystem, ValueWindows, enlarge, kappa_from_mu, kappa_from_theta,
                              max_excess, membership, mu_form, strictly_inside, three_point_map,
                              tight_windows, transform, validate, windows_from_mu,
                              windows_from_theta)
from projfilter.errors import DegenerateImage, DegenerateWindows
from projfilter.projline import MobiusMap, ProjPoint, fubini_study_distance
from projfilter.ratfun import RealRational, compose_source, compose_target

from problems import random_problem, t3, t3_bands, t3_windows


def test_t3_problem_is_valid_and_member():
    e = t3_bands()
    assert validate(e) == []
    assert membership(e, t3_windows(), t3())
    assert not membership(e, ValueWindows.from_reals(-1.0, -0.6, 0.6, 1.0), t3())


def test_validation_messages():
    overlap = BandSystem.from_intervals([("plus", 0, 2), ("minus", 1, 3)])
    assert any("overlap" in m for m in validate(overlap))
    one_type = BandSystem.from_intervals([("plus", 0, 1), ("plus", 2, 3)])
    assert any("type" in m for m in validate(one_type))


def test_band_with_infinite_endpoint():
    e = BandSystem.from_intervals([("minus", -1, 1), ("plus", 2, "inf")])
    assert validate(e) == [] and e.has_infinite_endpoint
    assert e.transitions[1].arc.start.is_infinite


def test_transform_round_trip_and_reversal():
    e = t3_bands()
    m = MobiusMap(0.0, 1.0, 1.0, 0.0)
    e2 = transform(e, m)
    assert validate(e2) == []
    assert [b.id for b in e2.bands] == ["B3", "B2", "B1", "B0"]
    back = transform(e2, m.inverse())
    for b0, b1 in zip(e.bands, back.bands):
        assert fubini_study_distance(b0.arc.start, b1.arc.start) < 1e-12
    assert back.transition_ids == e.transition_ids


def test_transform_keeps_transition_between_same_bands():
    e = t3_bands()
    e2 = transform(e, MobiusMap(-1.0, 0.0, 0.0, 1.0))
    for t in e.transitions:
        t2 = e2.transition(t.id)
        assert {t.left, t.right} == {t2.left, t2.right}


def test_degenerate_image():
    e = BandSystem.from_intervals([("minus", 0, 1), ("plus", 1 + 1e-13, 2)])
    with pytest.raises(DegenerateImage):
        transform(e, MobiusMap.identity())


@given(st.floats(0.01, 0.99))
def test_mu_and_theta_forms(x):
    assert windows_from_mu(x).kappa == pytest.approx(kappa_from_mu(x), rel=1e-10)
    assert windows_from_theta(x).kappa == pytest.approx(kappa_from_theta(x), rel=1e-10)


def test_tight_windows_recover_t3_windows():
    f = tight_windows(t3(), t3_bands())
    for a, b in zip(f.endpoints(), t3_windows().endpoints()):
        assert fubini_study_distance(a, b) < 1e-9


def test_mu_form_maps_windows():
    f = ValueWindows.from_reals(3.0, "inf", -2.0, 0.5)
    beta, target = mu_form(f)
    assert beta.preserves_orientation
    for a, b in zip(f.transform(beta).endpoints(), target.endpoints()):
        assert fubini_study_distance(a, b) < 1e-9


def test_three_point_map():
    src = [ProjPoint.from_real(x) for x in (0.0, 1.0, "inf")]
    dst = [ProjPoint.from_real(x) for x in (2.0, 5.0, -1.0)]
    m = three_point_map(src, dst)
    for a, b in zip(src, dst):
        assert fubini_study_distance(m(a), b) < 1e-12


def test_enlarge_and_strict_inclusion():
    f = windows_from_mu(0.3)
    big = enlarge(f, 0.01)
    assert strictly_inside(f, big)
    assert not strictly_inside(big, f)
    assert big.kappa < f.kappa


def test_membership_is_invariant_under_transforms():
    rng = np.random.default_rng(5)
    for _ in range(5):
        e, f, r = random_problem(rng, 3)
        alpha, beta = MobiusMap(1.0, 0.2, -0.4, 1.5), MobiusMap(0.5, -1.0, 1.0, 0.3)
        r2 = compose_target(compose_source(r, alpha), beta)
        e2, f2 = transform(e, alpha), f.transform(beta)
        assert abs(max_excess(r2, e2, f2) - max_excess(r, e, f)) < 1e-8


def test_interlaced_ranges_have_no_windows():
    e = BandSystem.from_intervals([("plus", -1, -0.5), ("minus", 0.5, 1)])
    with pytest.raises(DegenerateWindows):
        tight_windows(RealRational([0.0, 0.0, 1.0], [1.0]), e)  # x^2 equal on both bands
