"""IFS container, skeleton validation and similarity dimension."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
from scipy.optimize import brentq

from .errors import SkeletonRejected, ToleranceError
from .geometry import PointSnapper, Similitude, Tolerance, default_tolerance, points_equal


@dataclass(frozen=True)
class IfsSystem:
    maps: tuple[Similitude, ...]
    name: str = ""
    osc: bool = True  # asserted by the user, never verified

    def __post_init__(self) -> None:
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.maps) < 2:
            raise ValueError("an IFS needs at least two maps")

    @property
    def N(self) -> int:
        return len(self.maps)

    @property
    def ratios(self) -> tuple[float, ...]:
        return tuple(s.ratio for s in self.maps)


@dataclass(frozen=True)
class HataGraph:
    n_vertices: int
    edges: frozenset[tuple[int, int]]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        g.add_edges_from(self.edges)
        return g

    def components(self) -> list[list[int]]:
        return sorted(sorted(c) for c in nx.connected_components(self.to_networkx()))

    def is_connected(self) -> bool:
        return len(self.components()) == 1


@dataclass(frozen=True)
class Skeleton:
    points: tuple[complex, ...]
    # preimages[i] lists every (j, k) with S_j(a_k) == a_i
    preimages: tuple[tuple[tuple[int, int], ...], ...]
    tol: Tolerance
    spanning_tree: tuple[tuple[int, int], ...] = field(default=())

    @property
    def m(self) -> int:
        return len(self.points)


def hata_graph(ifs: IfsSystem, F: Sequence[complex], tol: Tolerance) -> HataGraph:
    if not F:
        raise ValueError("F must be nonempty")
    images = [[s(p) for p in F] for s in ifs.maps]
    edges = set()
    for i in range(ifs.N):
        for j in range(i + 1, ifs.N):
            if any(points_equal(p, q, tol) for p in images[i] for q in images[j]):
                edges.add((i, j))
    return HataGraph(ifs.N, frozenset(edges))


def check_tolerance(ifs: IfsSystem, points: Sequence[complex], tol: Tolerance) -> None:
    """Distinct level-1 vertices must sit more than ``2 * epsilon`` apart."""
    snapper = PointSnapper(tol)
    try:
        for p in points:
            snapper.snap(p)
        for s in ifs.maps:
            for p in points:
                snapper.snap(s(p))
    except Exception as exc:
        raise ToleranceError(f"tolerance {tol.epsilon:g} does not separate the level-1 vertex set") from exc


def validate_skeleton(ifs: IfsSystem, points: Sequence[complex], tol: Tolerance | None = None) -> Skeleton:
    points = tuple(complex(p) for p in points)
    if len(points) < 2:
        raise SkeletonRejected("a skeleton needs at least two points", code="REJECT_TOO_SMALL")
    if tol is None:
        tol = default_tolerance(points)
    for i, p in enumerate(points):
        for j in range(i):
            if points_equal(p, points[j], tol):
                raise SkeletonRejected(f"points a{j + 1} and a{i + 1} coincide", code="REJECT_DUPLICATE",
                                       detail={"points": [j + 1, i + 1]})
    check_tolerance(ifs, points, tol)

    preimages = []
    for i, a in enumerate(points):
        pre = tuple((j, k) for j, s in enumerate(ifs.maps) for k, b in enumerate(points)
                    if points_equal(s(b), a, tol))
        if not pre:
            raise SkeletonRejected(f"a{i + 1} = {a!r} is not in the union of S_j(A)",
                                   code="REJECT_NOT_COVERED", detail={"point": i + 1, "value": a})
        preimages.append(pre)

    h = hata_graph(ifs, points, tol)
    comps = h.components()
    if len(comps) > 1:
        raise SkeletonRejected(
            f"Hata graph H(A) has {len(comps)} components: {[[i + 1 for i in c] for c in comps]}",
            code="REJECT_DISCONNECTED", detail={"components": comps})
    tree = tuple(sorted(tuple(sorted(e)) for e in nx.bfs_edges(h.to_networkx(), 0)))
    return Skeleton(points, tuple(preimages), tol, tree)


def similarity_dimension(ifs: IfsSystem | Sequence[float]) -> float:
    """Solve ``sum c_j**s == 1`` by Brent's method on ``[0, 64]``.

    The left side is strictly decreasing in ``s`` with value N - 1 > 0 at 0.
    """
    ratios = ifs.ratios if isinstance(ifs, IfsSystem) else tuple(ifs)
    return brentq(lambda s: sum(c ** s for c in ratios) - 1.0, 0.0, 64.0, xtol=1e-15,
                  maxiter=200)
