"""The loop through the skeleton, labeled affine copies, induced graphs and
the cut-and-glue search for consistent partitions.

Abstract edges are 0-based: ``AbstractEdge(j, +1)`` runs ``a_j -> a_{j+1}``
and ``AbstractEdge(j, -1)`` runs ``a_{j+1} -> a_j`` (indices mod m).  Map
words are tuples of 0-based map indices; ``(2, 0)`` stands for ``S_3 o S_1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import networkx as nx

from .errors import PartitionNotFound, SearchBudgetExceeded, SearchExhausted
from .geometry import PointSnapper, apply_word
from .ifs import IfsSystem, Skeleton

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 10**7


class AbstractEdge(NamedTuple):
    index: int
    direction: int = 1

    def reverse(self) -> "AbstractEdge":
        return AbstractEdge(self.index, -self.direction)

    def endpoints(self, m: int) -> tuple[int, int]:
        """Skeleton indices of (initial, terminal) point."""
        i, j = self.index, (self.index + 1) % m
        return (i, j) if self.direction > 0 else (j, i)

    def __str__(self) -> str:
        return f"v{self.index + 1}" + ("" if self.direction > 0 else "^-1")


class LabeledEdge(NamedTuple):
    """The pair (edge, S_word).  Identity is by label, never by geometry."""
    word: tuple[int, ...]
    edge: AbstractEdge

    def prefixed(self, word: Sequence[int]) -> "LabeledEdge":
        return LabeledEdge(tuple(word) + self.word, self.edge)

    def inverse(self) -> "LabeledEdge":
        return LabeledEdge(self.word, self.edge.reverse())

    def __str__(self) -> str:
        if not self.word:
            return str(self.edge)
        return "S" + "".join(str(i + 1) for i in self.word) + f"({self.edge})"


EdgePath = tuple[LabeledEdge, ...]
Partition = tuple[EdgePath, ...]


def edge_points(e: LabeledEdge, ifs: IfsSystem, skeleton: Skeleton) -> tuple[complex, complex]:
    i, j = e.edge.endpoints(skeleton.m)
    return (apply_word(ifs.maps, e.word, skeleton.points[i]),
            apply_word(ifs.maps, e.word, skeleton.points[j]))


def path_breaks(path: EdgePath, ifs: IfsSystem, skeleton: Skeleton) -> list[int]:
    """Positions k where edge k does not end where edge k+1 starts."""
    eps = skeleton.tol.epsilon
    pts = [edge_points(e, ifs, skeleton) for e in path]
    return [k for k in range(len(pts) - 1) if abs(pts[k][1] - pts[k + 1][0]) > eps]


def reverse_path(path: EdgePath) -> EdgePath:
    return tuple(e.inverse() for e in reversed(path))


def build_loop(skeleton: Skeleton | int) -> EdgePath:
    m = skeleton if isinstance(skeleton, int) else skeleton.m
    return tuple(LabeledEdge((), AbstractEdge(j, 1)) for j in range(m))


def affine_copy(word: Sequence[int], obj):
    """Prefix ``word`` to a labeled edge, a path, or every edge of an induced graph."""
    if isinstance(obj, LabeledEdge):
        return obj.prefixed(word)
    if isinstance(obj, InducedGraph):
        return tuple(e.prefixed(word) for e in obj.edges)
    return tuple(e.prefixed(word) for e in obj)


def loop_with_orientation(m: int, sign: int) -> EdgePath:
    loop = build_loop(m)
    return loop if sign > 0 else reverse_path(loop)


@dataclass(frozen=True)
class InducedGraph:
    """``G(S, A, beta)``: the union of the cells ``S_j(loop ** beta_j)``."""
    beta: tuple[int, ...]
    edges: tuple[LabeledEdge, ...]
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    vertices: tuple[complex, ...]
    anchors: tuple[int, ...]  # vertex id of each skeleton point a_i
    out_edges: dict = field(compare=False, repr=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        g.add_edges_from(zip(self.tails, self.heads))
        used = {v for v in g if g.degree(v) > 0}
        return bool(used) and nx.is_weakly_connected(g.subgraph(used)) and set(self.anchors) <= used


def _edge_sort_key(e: LabeledEdge) -> tuple:
    return (e.word, e.edge.index, -e.edge.direction)


def induced_graph(ifs: IfsSystem, skeleton: Skeleton, beta: Sequence[int]) -> InducedGraph:
    beta = tuple(int(b) for b in beta)
    if len(beta) != ifs.N or any(b not in (1, -1) for b in beta):
        raise ValueError(f"orientation vector must be in {{1,-1}}^{ifs.N}, got {beta}")
    snapper = PointSnapper(skeleton.tol)
    anchors = tuple(snapper.snap(a) for a in skeleton.points)
    edges, tails, heads = [], [], []
    for j, b in enumerate(beta):
        for e in affine_copy((j,), loop_with_orientation(skeleton.m, b)):
            p, q = edge_points(e, ifs, skeleton)
            edges.append(e)
            tails.append(snapper.snap(p))
            heads.append(snapper.snap(q))
    out: dict[int, list[int]] = {}
    for k in sorted(range(len(edges)), key=lambda k: _edge_sort_key(edges[k])):
        out.setdefault(tails[k], []).append(k)
    indeg = [0] * len(snapper)
    outdeg = [0] * len(snapper)
    for t, h in zip(tails, heads):
        outdeg[t] += 1
        indeg[h] += 1
    assert indeg == outdeg, "a union of cycles must be balanced"
    return InducedGraph(beta, tuple(edges), tuple(tails), tuple(heads), tuple(snapper.points), anchors, out)


class _Search:
    def __init__(self, g: InducedGraph, node_budget: int):
        self.g = g
        self.m = len(g.anchors)
        self.budget = node_budget
        self.nodes = 0
        self.used = [False] * g.n_edges
        self.n_used = 0
        self.paths: list[list[int]] = [[]]

    def _all_reachable(self, start: int) -> bool:
        """Every unused edge reachable from ``start`` through unused edges."""
        g = self.g
        seen = {start}
        stack = [start]
        reached = 0
        while stack:
            v = stack.pop()
            for k in g.out_edges.get(v, ()):
                if not self.used[k]:
                    reached += 1
                    h = g.heads[k]
                    if h not in seen:
                        seen.add(h)
                        stack.append(h)
        return reached == g.n_edges - self.n_used

    def run(self, pos: int, seg: int) -> Iterator[Partition]:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded(f"node budget {self.budget} exhausted")
        g, m = self.g, self.m
        if self.n_used == g.n_edges:
            if seg == m - 1 and pos == g.anchors[0]:
                yield tuple(tuple(g.edges[k] for k in p) for p in self.paths)
            return
        # cut first: P_seg ends as soon as it reaches a_{seg+1}
        if seg < m - 1 and pos == g.anchors[seg + 1]:
            self.paths.append([])
            yield from self.run(pos, seg + 1)
            self.paths.pop()
        for k in g.out_edges.get(pos, ()):
            if self.used[k]:
                continue
            self.used[k] = True
            self.n_used += 1
            nxt = g.heads[k]
            if self._all_reachable(nxt):
                self.paths[-1].append(k)
                yield from self.run(nxt, seg)
                self.paths[-1].pop()
            self.used[k] = False
            self.n_used -= 1


def iter_consistent_partitions(g: InducedGraph, node_budget: int = DEFAULT_NODE_BUDGET) -> Iterator[Partition]:
    """Yield consistent partitions in deterministic order.

    Circuits start at ``a_1``; outgoing edges are tried in (cell, edge index,
    direction) order and a path is cut at the earliest visit of its target
    before alternatives that run past it.  Raises ``SearchBudgetExceeded``
    once more than ``node_budget`` search nodes have been expanded.
    """
    if not g.is_connected():
        return
    search = _Search(g, node_budget)
    yield from search.run(g.anchors[0], 0)


def find_consistent_partition(g: InducedGraph, node_budget: int = DEFAULT_NODE_BUDGET) -> Partition:
    if not g.is_connected():
        raise PartitionNotFound(f"induced graph for beta={g.beta} is not connected")
    for partition in iter_consistent_partitions(g, node_budget):
        return partition
    raise PartitionNotFound(f"no consistent partition for beta={g.beta}")


def gray_code_orientations(N: int) -> Iterator[tuple[int, ...]]:
    """All of {1,-1}^N in reflected Gray-code order, starting at all ones."""
    for k in range(2**N):
        g = k ^ (k >> 1)
        yield tuple(-1 if (g >> i) & 1 else 1 for i in range(N))


@dataclass
class SearchResult:
    beta: tuple[int, ...]
    partition: Partition
    failures: list[tuple[tuple[int, ...], str]]
    partitions_tried: int


Certifier = Callable[[Partition, tuple[int, ...]], "tuple[bool, str]"]


def search_orientation(ifs: IfsSystem, skeleton: Skeleton, certifier: Certifier, *,
                       node_budget: int = DEFAULT_NODE_BUDGET, max_partitions: int = 64,
                       max_orientations: int | None = None,
                       betas: Sequence[Sequence[int]] | None = None) -> SearchResult:
    """Return the first (beta, partition) accepted by ``certifier``.

    Raises ``SearchExhausted`` with per-beta failure reasons in ``detail``.
    """
    failures: list[tuple[tuple[int, ...], str]] = []
    candidates = [tuple(b) for b in betas] if betas is not None else gray_code_orientations(ifs.N)
    tried = 0
    for n_beta, beta in enumerate(candidates):
        if max_orientations is not None and n_beta >= max_orientations:
            failures.append((beta, "orientation budget reached"))
            break
        g = induced_graph(ifs, skeleton, beta)
        if not g.is_connected():
            failures.append((beta, "induced graph disconnected"))
            continue
        reasons = []
        count = 0
        try:
            for partition in iter_consistent_partitions(g, node_budget):
                count += 1
                tried += 1
                ok, reason = certifier(partition, beta)
                if ok:
                    return SearchResult(beta, partition, failures, tried)
                reasons.append(reason)
                if count >= max_partitions:
                    break
        except SearchBudgetExceeded as exc:
            reasons.append(str(exc))
        if count == 0 and not reasons:
            reasons.append("no consistent partition")
        summary = f"{count} partition(s) rejected" if count else "no consistent partition"
        if reasons:
            summary += "; " + "; ".join(sorted(set(reasons)))
        failures.append((beta, summary))
        log.debug("beta %s failed: %s", beta, summary)
    raise SearchExhausted(f"no orientation produced an accepted partition ({len(failures)} tried)",
                          detail=failures)
