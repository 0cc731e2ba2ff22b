import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skelcurve.errors import DegenerateVertexSet, ToleranceError
from skelcurve.geometry import (PointSnapper, Similitude, Tolerance, apply, apply_word, compose,
                                default_tolerance, fixed_point, points_equal, word_ratio)

LAM = cmath.exp(1j * math.pi / 6) / math.sqrt(3)
OMEGA = cmath.exp(2j * math.pi / 3)
TERDRAGON = [Similitude(LAM, 1), Similitude(LAM, OMEGA), Similitude(LAM, OMEGA**2)]
A = [-OMEGA**2 / LAM, -1 / LAM, -OMEGA / LAM]
D4 = [0j, cmath.exp(1j * math.pi / 6), cmath.exp(5j * math.pi / 6), -1j]


def test_terdragon_cells_meet_at_origin():
    assert abs(apply(TERDRAGON[0], A[1])) < 1e-14
    assert abs(apply(TERDRAGON[1], A[2])) < 1e-14
    assert abs(apply(TERDRAGON[2], A[0])) < 1e-14


def test_homothety_keeps_origin():
    assert apply(Similitude(0.5), 0j) == 0j


def test_four_star_first_map():
    s1 = Similitude(-0.5, D4[0])
    assert apply(s1, 1 + 0j) == pytest.approx(-0.5 + 0j)


def test_compose_ratios_multiply():
    assert compose(Similitude(0.5), Similitude(0.5)).ratio == pytest.approx(0.25)


def test_two_reflections_do_not_reflect():
    r = Similitude(0.5, 1j, reflects=True)
    q = Similitude(0.3j, 2, reflects=True)
    assert not compose(r, q).reflects
    p = 0.7 - 0.2j
    assert compose(r, q)(p) == pytest.approx(r(q(p)))


def test_terdragon_composite():
    s12 = compose(TERDRAGON[0], TERDRAGON[1])
    assert s12(A[2]) == pytest.approx(1 + 0j, abs=1e-14)
    assert apply_word(TERDRAGON, (0, 1), A[2]) == pytest.approx(1 + 0j, abs=1e-14)


def test_fixed_points():
    a1 = fixed_point(TERDRAGON[0])
    assert a1 == pytest.approx(1 / (1 - LAM), abs=1e-14)
    assert a1 == pytest.approx(A[0], abs=1e-14)
    assert fixed_point(Similitude(0.5)) == 0j
    assert fixed_point(Similitude(-0.5, D4[1])) == pytest.approx(2 * D4[1] / 3)


def test_reflecting_fixed_point():
    s = Similitude(0.4 + 0.3j, 1 - 2j, reflects=True)
    z = fixed_point(s)
    assert abs(s(z) - z) < 1e-14


def test_points_equal():
    tol = Tolerance(1e-9)
    assert points_equal(0.3 + 0.1j, 0.3 + 0.1j, tol)
    assert not points_equal(0j, 2e-9 + 0j, tol)
    assert points_equal(TERDRAGON[0](A[1]), TERDRAGON[1](A[2]), default_tolerance(A))


def test_empty_word_is_identity():
    assert apply_word(TERDRAGON, (), 0.25 + 1j) == 0.25 + 1j
    assert word_ratio(TERDRAGON, ()) == 1.0
    assert word_ratio(TERDRAGON, (0, 2)) == pytest.approx(1 / 3)


@pytest.mark.parametrize("scale", [1.0, 1j, 2, 0, complex("nan")])
def test_non_contractions_rejected(scale):
    with pytest.raises(ValueError):
        Similitude(scale)


def test_bad_tolerance_rejected():
    with pytest.raises(ToleranceError):
        Tolerance(0.0)


def test_similitude_accepts_arrays():
    z = np.array([0, 1, 1j])
    s = Similitude(0.5j, 1, reflects=True)
    assert np.allclose(s(z), [s(complex(w)) for w in z])


def test_snapper_merges_within_epsilon_and_rejects_ambiguity():
    snap = PointSnapper(Tolerance(1e-6))
    assert snap.snap(0j) == 0
    assert snap.snap(5e-7 + 0j) == 0
    assert snap.snap(1 + 0j) == 1
    with pytest.raises(DegenerateVertexSet):
        snap.snap(1.5e-6 + 0j)


scales = st.builds(cmath.rect, st.floats(0.05, 0.95), st.floats(-math.pi, math.pi))
points = st.builds(complex, st.floats(-10, 10), st.floats(-10, 10))
sims = st.builds(Similitude, scales, points, st.booleans())


@settings(max_examples=200, deadline=None)
@given(sims, sims, sims, points)
def test_compose_associative(s, t, u, p):
    left = compose(s, compose(t, u))(p)
    right = compose(compose(s, t), u)(p)
    diam = max(1.0, abs(p), abs(left), abs(s.offset), abs(t.offset), abs(u.offset))
    assert abs(left - right) <= 10 * np.finfo(float).eps * diam
    assert abs(left - s(t(u(p)))) <= 1e-12 * diam


@settings(max_examples=200, deadline=None)
@given(sims)
def test_fixed_point_is_fixed(s):
    z = fixed_point(s)
    assert abs(s(z) - z) <= 1e-9 * max(1.0, abs(z))


@settings(max_examples=200, deadline=None)
@given(sims, points, points)
def test_contraction_ratio(s, p, q):
    if abs(p - q) < 1e-6:
        return
    assert abs(s(p) - s(q)) == pytest.approx(s.ratio * abs(p - q), rel=1e-12)
