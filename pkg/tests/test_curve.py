import numpy as np
import pytest

from skelcurve.curve import (CurveApproximation, convergence_diagnostic, holder_diagnostic,
                             nesting_violation, sample_curve)
from skelcurve.errors import DepthOverflow
from skelcurve.geometry import apply_word, word_ratio
from skelcurve.graphs import AbstractEdge, build_loop, edge_points
from skelcurve.substitution import iterate

from conftest import BUILTINS, build


def anchors_hit(approx, sk):
    """Vertex indices where each v_j of the initial loop starts."""
    starts = np.flatnonzero(np.diff(np.concatenate([[-1], approx.seg_root])))
    return [approx.points[k] for k in starts], [approx.t[k] for k in starts]


def test_depth_zero(gasket):
    a = sample_curve(gasket.gifs, 0)
    assert len(a.points) == 4
    assert a.t.tolist() == pytest.approx([0, 1 / 3, 2 / 3, 1])
    assert np.allclose(a.points, list(gasket.skeleton.points) + [gasket.skeleton.points[0]])


def test_terdragon_depth_one(terdragon):
    a = sample_curve(terdragon.gifs, 1)
    assert len(a.points) == 10
    assert np.allclose(a.seg_mass, 1 / 9, atol=1e-15)


def test_gasket_depth_three_matches_symbolic_path(gasket):
    a = sample_curve(gasket.gifs, 3)
    assert len(a.points) == 82
    path = iterate(gasket.rule, build_loop(3), 3)
    starts = [edge_points(e, gasket.ifs, gasket.skeleton)[0] for e in path]
    assert np.abs(a.points[:-1] - np.array(starts)).max() < 1e-12
    assert [tuple(w) for w in a.seg_words.tolist()] == [e.word for e in path]


@pytest.mark.parametrize("name", BUILTINS)
def test_curve_invariants(name):
    b = build(name)
    g, sk = b.gifs, b.skeleton
    eps = sk.tol.epsilon
    h = [g.weights[AbstractEdge(j, 1)] for j in range(sk.m)]
    prev = None
    for n in range(0, 6):
        a = sample_curve(g, n)
        assert a.n_segments == sk.m * b.ifs.N**n
        assert abs(a.t[-1] - 1) <= 1e-9
        assert abs(a.points[0] - sk.points[0]) <= eps and abs(a.points[-1] - sk.points[0]) <= eps
        pts, ts = anchors_hit(a, sk)
        assert np.abs(np.array(pts) - np.array(sk.points)).max() <= eps
        assert np.allclose(ts, np.concatenate([[0], np.cumsum(h)[:-1]]), atol=1e-12)
        assert a.max_gap <= eps
        # parameter mass of each cylinder is c_I^s h_v
        for k in range(0, a.n_segments, max(1, a.n_segments // 50)):
            word = tuple(a.seg_words[k])
            want = word_ratio(b.ifs.maps, word) ** g.dimension * g.weights[a.states[a.seg_state[k]]]
            assert a.seg_mass[k] == pytest.approx(want, rel=1e-12)
            u = a.states[a.seg_state[k]]
            assert abs(a.points[k] - apply_word(b.ifs.maps, word, g.head(u))) <= eps
        if prev is not None:
            assert nesting_violation(prev, a) <= eps
        prev = a


def test_depth_overflow(terdragon):
    with pytest.raises(DepthOverflow) as info:
        sample_curve(terdragon.gifs, 10, segment_cap=1000)
    assert info.value.code == "DEPTH_OVERFLOW"
    with pytest.raises(ValueError):
        sample_curve(terdragon.gifs, -1)


def test_piecewise_linear_evaluation(terdragon):
    a = sample_curve(terdragon.gifs, 2)
    assert np.allclose(a(a.t), a.points)
    mid = 0.5 * (a.t[3] + a.t[4])
    assert a(mid) == pytest.approx(0.5 * (a.points[3] + a.points[4]))
    assert [s.t for s in a.samples()] == a.t.tolist()


def test_constant_curve_has_zero_holder_statistic():
    t = np.linspace(0, 1, 11)
    flat = CurveApproximation(1, t, np.full(11, 2 + 1j), np.zeros(10, int), np.zeros((10, 1), np.uint8),
                              np.full(10, 0.1), (AbstractEdge(0, 1),), 2.0)
    assert holder_diagnostic(flat, pairs=1000) == 0.0


@pytest.mark.parametrize("name", ["terdragon", "gasket"])
def test_holder_statistic_plateaus(name):
    g = build(name).gifs
    stats = [holder_diagnostic(sample_curve(g, n)) for n in range(2, 7)]
    assert all(np.isfinite(stats))
    ratios = [b / a for a, b in zip(stats, stats[1:])]
    # depths 4 -> 5 and 5 -> 6
    assert max(ratios[2:]) <= 1.05


def test_holder_is_deterministic(terdragon):
    a = sample_curve(terdragon.gifs, 3)
    assert holder_diagnostic(a, seed=7) == holder_diagnostic(a, seed=7)


def test_convergence_needs_consecutive_depths(terdragon):
    a = sample_curve(terdragon.gifs, 2)
    with pytest.raises(ValueError):
        convergence_diagnostic(a, a)


@pytest.mark.parametrize("name,ratio", [("terdragon", 1 / np.sqrt(3)), ("gasket", 0.5)])
def test_convergence_ratio(name, ratio):
    g = build(name).gifs
    curves = [sample_curve(g, n) for n in range(2, 7)]
    diffs = [convergence_diagnostic(a, b) for a, b in zip(curves, curves[1:])]
    for d0, d1 in zip(diffs, diffs[1:]):
        assert d1 / d0 == pytest.approx(ratio, abs=1e-6)
        assert d1 / d0 <= 0.63
