from collections import Counter

import pytest

from skelcurve import get_example
from skelcurve.catalog import GASKET_RULE
from skelcurve.errors import PartitionNotFound, SearchExhausted
from skelcurve.geometry import Similitude, Tolerance
from skelcurve.graphs import (AbstractEdge, LabeledEdge, affine_copy, build_loop, edge_points,
                              find_consistent_partition, gray_code_orientations, induced_graph,
                              iter_consistent_partitions, path_breaks, reverse_path, search_orientation)
from skelcurve.ifs import IfsSystem, Skeleton, validate_skeleton
from skelcurve.substitution import coarse, parse_rule, rule_from_partition


def setup(name):
    cfg = get_example(name)
    ifs = cfg.ifs()
    return ifs, validate_skeleton(ifs, cfg.skeleton)


def accept_all(partition, beta):
    return True, "ok"


def E(j, d=1):
    return AbstractEdge(j, d)


def test_loops():
    assert build_loop(3) == tuple(LabeledEdge((), E(j)) for j in range(3))
    assert len(build_loop(4)) == 4
    inv = reverse_path(build_loop(4))
    assert inv == tuple(LabeledEdge((), E(j, -1)) for j in (3, 2, 1, 0))
    assert [str(e) for e in inv] == ["v4^-1", "v3^-1", "v2^-1", "v1^-1"]


def test_edge_endpoints():
    assert E(0).endpoints(3) == (0, 1)
    assert E(2).endpoints(3) == (2, 0)
    assert E(2, -1).endpoints(3) == (0, 2)


def test_affine_copy():
    e = LabeledEdge((), E(1, -1))
    assert affine_copy((), e) == e
    assert affine_copy((0,), affine_copy((2, 1), e)) == affine_copy((0, 2, 1), e)
    assert str(affine_copy((1, 0), e)) == "S21(v2^-1)"


def test_terdragon_copies_meet_at_zero():
    ifs, sk = setup("terdragon")
    copy1 = affine_copy((0,), build_loop(sk))
    copy2 = affine_copy((1,), build_loop(sk))
    assert [str(e) for e in copy2] == ["S2(v1)", "S2(v2)", "S2(v3)"]
    pts1 = {p for e in copy1 for p in edge_points(e, ifs, sk)}
    pts2 = {p for e in copy2 for p in edge_points(e, ifs, sk)}
    common = [p for p in pts1 for q in pts2 if abs(p - q) < 1e-12]
    assert len(common) == 1 and abs(common[0]) < 1e-12


def test_gasket_induced_graph():
    ifs, sk = setup("gasket")
    g = induced_graph(ifs, sk, (1, -1, -1))
    assert g.n_edges == 9
    assert len(g.vertices) == 6  # three corners and three midpoints
    assert g.is_connected()
    signs = {e.word: {f.edge.direction for f in g.edges if f.word == e.word} for e in g.edges}
    assert signs == {(0,): {1}, (1,): {-1}, (2,): {-1}}


def test_terdragon_induced_graph():
    ifs, sk = setup("terdragon")
    g = induced_graph(ifs, sk, (1, 1, 1))
    assert g.n_edges == 9
    zero = [k for k, v in enumerate(g.vertices) if abs(v) < 1e-12]
    assert len(zero) == 1
    assert g.tails.count(zero[0]) == 3 and g.heads.count(zero[0]) == 3


def test_carpet_induced_graph():
    ifs, sk = setup("carpet")
    assert induced_graph(ifs, sk, (1,) * 8).n_edges == 32


def test_bad_orientation():
    ifs, sk = setup("gasket")
    with pytest.raises(ValueError):
        induced_graph(ifs, sk, (1, 0, 1))


@pytest.mark.parametrize("name", ["terdragon", "gasket", "carpet", "four-star"])
def test_balanced_and_all_ones_partition_exists(name):
    ifs, sk = setup(name)
    g = induced_graph(ifs, sk, (1,) * ifs.N)
    for v in range(len(g.vertices)):
        assert g.tails.count(v) == g.heads.count(v)
    partition = find_consistent_partition(g)
    check_partition(partition, g, ifs, sk)


def check_partition(partition, g, ifs, sk):
    m = sk.m
    assert len(partition) == m
    walk = [e for p in partition for e in p]
    assert Counter(walk) == Counter(g.edges)
    for j, p in enumerate(partition):
        assert path_breaks(p, ifs, sk) == []
        assert abs(edge_points(p[0], ifs, sk)[0] - sk.points[j]) <= sk.tol.epsilon
        assert abs(edge_points(p[-1], ifs, sk)[1] - sk.points[(j + 1) % m]) <= sk.tol.epsilon


def test_gasket_path_partition_is_found():
    ifs, sk = setup("gasket")
    g = induced_graph(ifs, sk, (1, -1, -1))
    expected = parse_rule(GASKET_RULE, 3)
    want = tuple(expected[E(j)] for j in range(3))
    found = list(iter_consistent_partitions(g))
    assert want in found
    for p in found:
        check_partition(p, g, ifs, sk)


def test_terdragon_partition_matches_t_rule():
    ifs, sk = setup("terdragon")
    p = find_consistent_partition(induced_graph(ifs, sk, (1, 1, 1)))
    cs, _ = coarse(rule_from_partition(p))
    assert cs.images == ((0, 2, 0), (1, 0, 1), (2, 1, 2))


def test_disconnected_graph_not_found():
    ifs = IfsSystem((Similitude(0.25), Similitude(0.25, 0.75)))
    sk = Skeleton((0j, 1 + 0j), ((), ()), Tolerance(1e-9))
    g = induced_graph(ifs, sk, (1, 1))
    assert not g.is_connected()
    with pytest.raises(PartitionNotFound) as info:
        find_consistent_partition(g)
    assert info.value.code == "NOT_FOUND"


@pytest.mark.parametrize("name", ["terdragon", "gasket", "four-star"])
def test_reversal_duality(name):
    ifs, sk = setup(name)
    for beta in gray_code_orientations(ifs.N):
        g = induced_graph(ifs, sk, beta)
        try:
            partition = find_consistent_partition(g)
        except PartitionNotFound:
            continue
        minus = induced_graph(ifs, sk, tuple(-b for b in beta))
        reversed_paths = [reverse_path(p) for p in partition]
        assert Counter(e for p in reversed_paths for e in p) == Counter(minus.edges)
        for p in reversed_paths:
            assert path_breaks(p, ifs, sk) == []


def test_gray_code():
    betas = list(gray_code_orientations(4))
    assert betas[0] == (1, 1, 1, 1)
    assert len(set(betas)) == 16
    for a, b in zip(betas, betas[1:]):
        assert sum(x != y for x, y in zip(a, b)) == 1


def test_search_terdragon():
    ifs, sk = setup("terdragon")
    res = search_orientation(ifs, sk, accept_all)
    assert res.beta == (1, 1, 1)
    assert res.failures == []


def test_search_gasket_at_given_beta():
    ifs, sk = setup("gasket")
    assert search_orientation(ifs, sk, accept_all).beta == (1, 1, 1)
    res = search_orientation(ifs, sk, accept_all, betas=[(1, -1, -1)])
    assert res.beta == (1, -1, -1)


def test_search_budget_exhaustion_reports_every_orientation():
    ifs, sk = setup("carpet")
    with pytest.raises(SearchExhausted) as info:
        search_orientation(ifs, sk, accept_all, node_budget=5, max_orientations=3)
    assert info.value.code == "EXHAUSTED"
    detail = info.value.detail
    assert [b for b, _ in detail[:3]] == list(gray_code_orientations(8))[:3]
    assert all("BUDGET_EXCEEDED" in reason for _, reason in detail[:3])
    assert detail[-1][1] == "orientation budget reached"


def test_search_rejections_are_recorded():
    ifs, sk = setup("gasket")
    with pytest.raises(SearchExhausted) as info:
        search_orientation(ifs, sk, lambda p, b: (False, "nope"), max_partitions=2)
    assert len(info.value.detail) == 8
    assert all("nope" in reason or "no consistent" in reason for _, reason in info.value.detail)
