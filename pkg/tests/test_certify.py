import json

import numpy as np
import pytest

from projfilter.bands import ValueWindows, transform
from projfilter.certify import (NOT_CERTIFIED, OPTIMAL, certify, coincidence_count,
                                ext_tolerance, extremal_points)
from projfilter.errors import ClassInfeasible, MembershipViolated
from projfilter.projline import INF, MobiusMap, ProjPoint
from projfilter.ratfun import RealRational, compose_source
from projfilter.stiefel import IndexArray

from problems import chebyshev_problem, cos9, own_class, t3, t3_bands, t3_windows


def test_t3_extremal_points():
    ext = extremal_points(t3(), t3_bands(), t3_windows())
    xs = sorted(x.x for x in ext)
    assert np.allclose(xs, sorted(-cos9(j) for j in range(10)), atol=1e-9)


def test_t3_is_optimal_for_its_class():
    e, f, r = t3_bands(), t3_windows(), t3()
    cert = certify(r, e, f, own_class(r, e, f))
    assert cert.optimal and cert.alt == 10 and cert.rhs == 8 and cert.malozemov == 10


@pytest.mark.parametrize("tid", ["T0", "T1", "T2", "T3"])
def test_t3_optimal_in_degree_four_after_one_flip(tid):
    e, f, r = t3_bands(), t3_windows(), t3()
    cert = certify(r.with_nominal(4), e, f, own_class(r, e, f).flipped_at(tid))
    assert cert.optimal and cert.sigma_hamming == 1 and cert.defect == 1


def test_same_class_degree_seven_is_not_certified():
    e, f, r = t3_bands(), t3_windows(), t3()
    cert = certify(r.with_nominal(7), e, f, own_class(r, e, f))
    assert cert.verdict == NOT_CERTIFIED and cert.alt < cert.rhs


def test_class_errors():
    e, f, r = t3_bands(), t3_windows(), t3()
    with pytest.raises(ClassInfeasible):
        certify(r, e, f, IndexArray({"T0": 0, "T1": 0, "T2": 0, "T3": 0}))
    with pytest.raises(ClassInfeasible):
        certify(r.with_nominal(5), e, f, IndexArray({"T0": 1, "T1": 1, "T2": 1, "T3": 0}))
    with pytest.raises(MembershipViolated):
        certify(r, e, ValueWindows.from_reals(-1.0, -0.6, 0.6, 1.0), own_class(r, e, f))


@pytest.mark.parametrize("k,alt", [(2, 6), (3, 10), (4, 12), (5, 16)])
def test_chebyshev_problems_are_optimal(k, alt):
    e, f, r = chebyshev_problem(k, 0.5)
    cert = certify(r, e, f, own_class(r, e, f))
    assert cert.optimal and cert.alt == alt


def test_certificate_survives_inversion_but_malozemov_changes():
    e, f, r = t3_bands(-0.99), t3_windows(), t3()
    cls = IndexArray({"T0": 0, "T1": 0, "T2": 0, "T3": 0})
    base = certify(r.with_nominal(4), e, f, cls)
    m = MobiusMap(0.0, 1.0, 1.0, 0.0)
    moved = certify(compose_source(r, m.inverse()).with_nominal(4), transform(e, m), f, cls)
    assert base.summary() == moved.summary()
    assert (base.malozemov, moved.malozemov) == (9, 8)


def test_json_is_serializable():
    e, f, r = t3_bands(), t3_windows(), t3()
    d = certify(r, e, f, own_class(r, e, f)).to_json()
    back = json.loads(json.dumps(d))
    assert back["verdict"] == OPTIMAL and len(back["extremal_points"]) == 10


def test_tolerance_override(monkeypatch):
    monkeypatch.setenv("ZK_TOL", "1e-5")
    assert ext_tolerance() == 1e-5
    monkeypatch.delenv("ZK_TOL")
    assert ext_tolerance() == 1e-8


def test_coincidences_count_infinity():
    # 4x^3 - 3x = x at -1, 0, 1 and both are infinite at infinity
    x = RealRational([0.0, 1.0], [1.0])
    assert coincidence_count(t3(), x, INF, INF) == 4
    assert coincidence_count(t3(), x, ProjPoint.from_real(-0.5), ProjPoint.from_real(2.0)) == 2
