import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import polynomial as npoly

from projfilter import polyutil as pu


def test_trim_and_degree():
    assert pu.degree([1.0, 2.0, 0.0, 1e-20]) == 1
    assert pu.degree([0.0]) == -1


def test_multiple_roots_are_clustered():
    c = pu.from_roots([1.0, 1.0, 1.0, -2.0])
    # a triple root splits by about eps**(1/3), so the cluster tolerance must exceed that
    roots = pu.roots_with_multiplicity(c, cluster_tol=1e-4)
    mult = {round(z.real, 6): k for z, k in roots}
    assert mult == {1.0: 3, -2.0: 1}


def test_complex_pairs_from_roots():
    c = pu.from_roots([1 + 2j])
    assert np.allclose(c, [5.0, -2.0, 1.0])
    assert pu.real_roots(c) == []


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=8), st.floats(-3, 3))
def test_compensated_horner_matches_numpy(c, x):
    ref = npoly.polyval(x, c)
    scale = npoly.polyval(abs(x), np.abs(c)) + 1e-300
    assert abs(pu.comp_horner(np.array(c), x) - ref) <= 1e-12 * scale


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=7), st.floats(-2, 2))
def test_taylor_shift(c, z):
    t = pu.shift_taylor(np.array(c), z)
    for x in (-0.7, 0.3, 1.1):
        assert npoly.polyval(x - z, t) == pytest.approx(npoly.polyval(x, c), abs=1e-8)


def test_common_roots_and_deflate():
    a = pu.from_roots([1.0, 2.0, 3.0])
    b = pu.from_roots([2.0, -1.0])
    common = pu.common_roots(a, b)
    assert len(common) == 1 and abs(common[0][0] - 2.0) < 1e-9
    assert np.allclose(pu.deflate(a, 2.0), pu.from_roots([1.0, 3.0]))


def test_homogeneous_evaluation_is_continuous_through_infinity():
    c = np.array([1.0, -3.0, 2.0])
    phi = np.linspace(1.4, 1.75, 50)
    v = pu.hom_eval(c, 2, np.sin(phi), np.cos(phi))
    ref = np.cos(phi) ** 2 - 3 * np.sin(phi) * np.cos(phi) + 2 * np.sin(phi) ** 2
    assert np.allclose(v, ref)
