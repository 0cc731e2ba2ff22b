"""The ordered GIFS induced by a substitution rule, with its certificates.

Invariant sets are never materialized.  Each state ``u`` is known only
through its endpoints (head ``a_u``, tail ``b_u``), its ordered bridges and
its measure weight.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import networkx as nx
import numpy as np

from .errors import (BridgeCountViolation, DomainMiss, NonConvergent, NotStronglyConnected,
                     SpectralMismatch, WitnessInvalid)
from .geometry import apply_word
from .graphs import AbstractEdge
from .ifs import IfsSystem, Skeleton, similarity_dimension
from .substitution import PureCellWitness, SubstitutionRule, coarse, is_primitive

SPECTRAL_TOL = 1e-9
COLUMN_SUM_TOL = 1e-12
MAX_POWER_ITERATIONS = 10**5


class Bridge(NamedTuple):
    source: AbstractEdge
    order: int  # 1-based position in the image of ``source``
    map_index: int
    target: AbstractEdge


@dataclass(frozen=True)
class InducedGifs:
    ifs: IfsSystem
    skeleton: Skeleton
    states: tuple[AbstractEdge, ...]
    bridges: dict  # state -> tuple[Bridge, ...] in bridge order
    dimension: float
    weights: dict | None = field(default=None, compare=False)
    # every state receives exactly one bridge per map (the partition case)
    unicursal: bool = True

    def state_index(self) -> dict[AbstractEdge, int]:
        return {u: i for i, u in enumerate(self.states)}

    def all_bridges(self) -> list[Bridge]:
        return [b for u in self.states for b in self.bridges[u]]

    def head(self, u: AbstractEdge) -> complex:
        return self.skeleton.points[u.endpoints(self.skeleton.m)[0]]

    def tail(self, u: AbstractEdge) -> complex:
        return self.skeleton.points[u.endpoints(self.skeleton.m)[1]]

    def without_bridge(self, bridge: Bridge) -> "InducedGifs":
        bridges = dict(self.bridges)
        bridges[bridge.source] = tuple(b for b in bridges[bridge.source] if b != bridge)
        return replace(self, bridges=bridges, weights=None)


def induce_gifs(rule: SubstitutionRule, ifs: IfsSystem, skeleton: Skeleton, *,
                require_unicursal: bool = True) -> InducedGifs:
    """Build bridges ``(u, k, S_{u,k}, v_{u,k})`` over the states reachable
    from ``v_1..v_m`` and check that every state receives exactly one bridge
    per map.

    Traversing rules need not pass that check; with ``require_unicursal``
    off, a failure is recorded in ``unicursal`` instead of raised.
    """
    states = rule.reachable_states()
    missing = [u for u in states if u not in rule.images]
    if missing:
        raise DomainMiss(f"state {missing[0]} is reachable but has no image")
    bridges = {u: tuple(Bridge(u, k + 1, e.word[0], e.edge) for k, e in enumerate(rule.images[u]))
               for u in states}
    incoming: dict[AbstractEdge, Counter] = {u: Counter() for u in states}
    for u in states:
        for b in bridges[u]:
            incoming[b.target][b.map_index] += 1
    expected = Counter(range(ifs.N))
    unicursal = True
    for v in states:
        if incoming[v] != expected:
            unicursal = False
            if require_unicursal:
                got = sorted((i + 1, c) for i, c in incoming[v].items())
                raise BridgeCountViolation(
                    f"state {v} receives bridges with maps {got}; expected each of S1..S{ifs.N} once",
                    detail={"state": str(v), "incoming": got})
    return InducedGifs(ifs, skeleton, states, bridges, similarity_dimension(ifs), unicursal=unicursal)


@dataclass
class ChainReport:
    ok: bool
    bridge_joins: int  # one per bridge: its tail meets the next head, or b_u for the last
    bridge_joins_passed: int
    internal_junctions: int  # sum over states of (l_u - 1)
    head_anchors: int
    violations: list = field(default_factory=list)  # (state, order, kind, distance)
    max_error: float = 0.0


def check_chain_condition(g: InducedGifs) -> ChainReport:
    """Verify ``g_w(b_{t(w)}) == g_y(a_{t(y)})`` for consecutive bridges plus
    the head anchor ``S_{u,1}(a_{v_{u,1}}) == a_u`` and the tail anchor."""
    eps = g.skeleton.tol.epsilon
    maps = g.ifs.maps
    violations = []
    joins = passed = internal = 0
    worst = 0.0
    for u in g.states:
        bs = g.bridges[u]
        if not bs:
            violations.append((str(u), 0, "empty", float("inf")))
            continue
        first = bs[0]
        err = abs(maps[first.map_index](g.head(first.target)) - g.head(u))
        worst = max(worst, err)
        if err > eps:
            violations.append((str(u), 1, "head_anchor", err))
        for k, b in enumerate(bs):
            end = maps[b.map_index](g.tail(b.target))
            if k + 1 < len(bs):
                nb = bs[k + 1]
                want = maps[nb.map_index](g.head(nb.target))
                kind = "junction"
                internal += 1
            else:
                want = g.tail(u)
                kind = "tail_anchor"
            err = abs(end - want)
            worst = max(worst, err)
            joins += 1
            if err > eps:
                violations.append((str(u), b.order, kind, err))
            else:
                passed += 1
    return ChainReport(not violations, joins, passed, internal, len(g.states), violations, worst)


def dictionary_adjacency_violations(g: InducedGifs, k: int) -> list:
    """Check that dictionary-adjacent bridge paths of length ``k`` share a
    junction point: tail of the lower cylinder equals head of the upper."""
    maps = g.ifs.maps
    eps = g.skeleton.tol.epsilon
    bad = []
    for u in g.states:
        paths = [((), u)]
        for _ in range(k):
            paths = [(w + (b.map_index,), b.target) for w, v in paths for b in g.bridges[v]]
        for (w1, t1), (w2, t2) in zip(paths, paths[1:]):
            p = apply_word(maps, w1, g.tail(t1))
            q = apply_word(maps, w2, g.head(t2))
            if abs(p - q) > eps:
                bad.append((str(u), w1, w2, abs(p - q)))
    return bad


def associate_matrix(g: InducedGifs, s: float) -> np.ndarray:
    """Entry (u, v) is the sum of ``c**s`` over bridges from u to v."""
    idx = g.state_index()
    c = np.array(g.ifs.ratios) ** s
    M = np.zeros((len(g.states), len(g.states)))
    for b in g.all_bridges():
        M[idx[b.source], idx[b.target]] += c[b.map_index]
    return M


def simplified_matrix(g: InducedGifs, s: float) -> np.ndarray:
    """Rows over ``v_1..v_m`` with ``E_{v_j}`` and ``E_{v_j^-1}`` identified."""
    m = g.skeleton.m
    c = np.array(g.ifs.ratios) ** s
    M = np.zeros((m, m))
    for j in range(m):
        u = AbstractEdge(j, 1)
        for b in g.bridges.get(u, ()):
            M[j, b.target.index] += c[b.map_index]
    return M


def _perron(M: np.ndarray, rtol: float = 1e-13, max_iter: int = MAX_POWER_ITERATIONS):
    """Power iteration on the lazy matrix (M + I)/2 from the all-ones vector.

    Returns (lower, upper, x, iterations) where [lower, upper] are the
    Collatz-Wielandt bounds min/max (Mx)_i / x_i enclosing the spectral radius.
    """
    n = M.shape[0]
    x = np.ones(n)
    lo, hi = 0.0, np.inf
    for it in range(1, max_iter + 1):
        y = M @ x
        q = y / x
        lo, hi = q.min(), q.max()
        if hi - lo <= rtol * max(hi, 1e-300):
            return lo, hi, x, it
        x = 0.5 * (x + y)
        x /= x.max()
    return lo, hi, x, max_iter


def spectral_radius(M: np.ndarray) -> float:
    lo, hi, _, _ = _perron(M)
    return 0.5 * (lo + hi)


def _strongly_connected(M: np.ndarray) -> bool:
    G = nx.from_numpy_array((M > 0).astype(int), create_using=nx.DiGraph)
    return nx.is_strongly_connected(G)


@dataclass
class SpectralCertificate:
    dimension: float
    spectral_radius: float
    radius_bounds: tuple[float, float]
    sum_axis: str  # "column" for partition rules, "row" for traversing ones
    sum_min: float
    sum_max: float
    simplified_radius: float
    simplified_sum_min: float
    simplified_sum_max: float
    strongly_connected: bool
    primitive_exponent: int | None
    conditional: bool  # True when the coarse substitution is not primitive


def spectral_certify(g: InducedGifs, rule: SubstitutionRule | None = None) -> SpectralCertificate:
    """Certify rho(M(s)) = 1 at the similarity dimension.

    For a unicursal GIFS every column of M(s) sums to sum_i c_i**s = 1; for a
    traversing rule the rows do.  The simplified m x m matrix is checked the
    same way and must be strongly connected.
    """
    s = similarity_dimension(g.ifs)
    axis = 0 if g.unicursal else 1
    M = associate_matrix(g, s)
    lo, hi, _, _ = _perron(M)
    sums = M.sum(axis=axis)
    Mbar = simplified_matrix(g, s)
    blo, bhi, _, _ = _perron(Mbar)
    bsums = Mbar.sum(axis=axis)
    exponent = None
    conditional = True
    if rule is not None:
        primitive, exponent = is_primitive(coarse(rule)[1])
        conditional = not primitive
    cert = SpectralCertificate(s, 0.5 * (lo + hi), (lo, hi), "column" if axis == 0 else "row",
                               float(sums.min()), float(sums.max()), 0.5 * (blo + bhi),
                               float(bsums.min()), float(bsums.max()), _strongly_connected(Mbar),
                               exponent, conditional)
    if lo < 1 - SPECTRAL_TOL or hi > 1 + SPECTRAL_TOL:
        raise SpectralMismatch(f"spectral radius of M(s) in [{lo!r}, {hi!r}], expected 1", detail=cert)
    if abs(cert.sum_min - 1) > COLUMN_SUM_TOL or abs(cert.sum_max - 1) > COLUMN_SUM_TOL:
        raise SpectralMismatch(f"{cert.sum_axis} sums of M(s) span [{cert.sum_min!r}, {cert.sum_max!r}]",
                               detail=cert)
    if blo < 1 - SPECTRAL_TOL or bhi > 1 + SPECTRAL_TOL:
        raise SpectralMismatch(f"spectral radius of simplified M(s) in [{blo!r}, {bhi!r}]", detail=cert)
    if not cert.strongly_connected:
        raise NotStronglyConnected("simplified GIFS base graph is not strongly connected", detail=cert)
    return cert


def measure_weights(g: InducedGifs, rtol: float = 1e-12) -> dict[AbstractEdge, float]:
    """Positive eigenvector h = M(s) h, normalized so sum_j h_{v_j} = 1."""
    M = associate_matrix(g, g.dimension)
    lo, hi, x, it = _perron(M, rtol=rtol)
    if hi - lo > rtol * hi:
        raise NonConvergent(f"power iteration did not converge in {it} steps")
    # polish: solve (M - I) x = 0 together with sum(x) = sum(x_power)
    n = len(x)
    A = np.vstack([M - np.eye(n), np.ones((1, n))])
    rhs = np.concatenate([np.zeros(n), [x.sum()]])
    polished = np.linalg.lstsq(A, rhs, rcond=None)[0]
    if (polished > 0).all() and np.abs(M @ polished - polished).max() <= np.abs(M @ x - x).max():
        x = polished
    h = {u: float(v) for u, v in zip(g.states, x)}
    for u in g.states:
        if u.direction > 0 and u.reverse() in h:
            avg = 0.5 * (h[u] + h[u.reverse()])
            h[u] = h[u.reverse()] = avg
    total = sum(h[AbstractEdge(j, 1)] for j in range(g.skeleton.m))
    return {u: h[u] / total for u in g.states}


def with_weights(g: InducedGifs) -> InducedGifs:
    return replace(g, weights=measure_weights(g))


@dataclass
class PureCellReport:
    witness: PureCellWitness
    cylinders: tuple[AbstractEdge, ...]
    conclusion: str


def check_pure_cell_disjointness(g: InducedGifs, witness: PureCellWitness) -> PureCellReport:
    """Expand the set equation of the witness state n times (via bridges)
    and confirm every ``S_I(E_{v_j})`` of the cell appears on the right."""
    m = g.skeleton.m
    if witness.state not in g.bridges:
        raise WitnessInvalid(f"{witness.state} is not a state of the GIFS")
    terms = [((), witness.state)]
    for _ in range(witness.depth):
        terms = [(w + (b.map_index,), b.target) for w, v in terms for b in g.bridges[v]]
    present = {t for w, t in terms if w == tuple(witness.word)}
    cell = tuple(AbstractEdge(j, witness.sign) for j in range(m))
    if not set(cell) <= present:
        missing = [str(c) for c in cell if c not in present]
        raise WitnessInvalid(f"cylinders {missing} of the claimed cell are absent", detail=missing)
    return PureCellReport(witness, cell, "K = union of E_{v_j}, disjoint in s-dimensional measure")

