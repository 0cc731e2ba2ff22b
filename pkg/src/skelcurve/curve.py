"""Depth-n broken-line approximations of the parameterization and their diagnostics.

Expansion is vectorized: each segment carries its state, its map word and the
composed similitude ``S_I`` in (scale, offset, reflects) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import DepthOverflow
from .gifs import InducedGifs, measure_weights
from .graphs import AbstractEdge

DEFAULT_SEGMENT_CAP = 10**7
DEFAULT_SEED = 0x5FC
HOLDER_PAIRS = 100_000
# pair separations are drawn log-uniformly from [10**-HOLDER_DECADES, 1]
HOLDER_DECADES = 2.0


class CurveSample(NamedTuple):
    t: float
    point: complex


@dataclass
class CurveApproximation:
    depth: int
    t: np.ndarray          # m*N^n + 1 parameter values, t[0] = 0
    points: np.ndarray     # complex vertices of the broken line
    seg_state: np.ndarray  # index into ``states`` of each segment
    seg_words: np.ndarray  # (segments, depth) uint8 array of 0-based map indices
    seg_mass: np.ndarray
    states: tuple[AbstractEdge, ...]
    dimension: float
    max_gap: float = 0.0   # largest distance between a segment end and the next start
    seg_root: np.ndarray | None = None  # which v_j of the initial loop each segment descends from

    @property
    def n_segments(self) -> int:
        return len(self.seg_mass)

    def samples(self) -> Iterator[CurveSample]:
        for t, p in zip(self.t, self.points):
            yield CurveSample(float(t), complex(p))

    def __call__(self, t):
        """Piecewise-linear evaluation at parameter(s) ``t``."""
        return np.interp(t, self.t, self.points.real) + 1j * np.interp(t, self.t, self.points.imag)


def _segment_count(g: InducedGifs, n: int) -> int:
    idx = g.state_index()
    counts = np.zeros(len(g.states), dtype=object)
    for j in range(g.skeleton.m):
        counts[idx[AbstractEdge(j, 1)]] += 1
    for _ in range(n):
        nxt = np.zeros_like(counts)
        for u in g.states:
            for b in g.bridges[u]:
                nxt[idx[b.target]] += counts[idx[u]]
        counts = nxt
    return int(counts.sum())


def sample_curve(g: InducedGifs, n: int, *, weights: dict | None = None,
                 segment_cap: int = DEFAULT_SEGMENT_CAP) -> CurveApproximation:
    if n < 0:
        raise ValueError("depth must be nonnegative")
    total = _segment_count(g, n)
    if total > segment_cap:
        raise DepthOverflow(f"depth {n} needs {total} segments, cap is {segment_cap}")
    if weights is None:
        weights = g.weights if g.weights is not None else measure_weights(g)

    idx = g.state_index()
    ns = len(g.states)
    maps = g.ifs.maps
    ratio_s = np.array(g.ifs.ratios) ** g.dimension
    m_scale = np.array([s.scale for s in maps])
    m_offset = np.array([s.offset for s in maps])
    m_refl = np.array([s.reflects for s in maps])
    lens = np.array([len(g.bridges[u]) for u in g.states])
    width = max(1, lens.max())
    b_map = np.zeros((ns, width), dtype=np.int64)
    b_tgt = np.zeros((ns, width), dtype=np.int64)
    for u in g.states:
        for k, b in enumerate(g.bridges[u]):
            b_map[idx[u], k] = b.map_index
            b_tgt[idx[u], k] = idx[b.target]

    state = np.array([idx[AbstractEdge(j, 1)] for j in range(g.skeleton.m)], dtype=np.int64)
    scale = np.ones(len(state), dtype=complex)
    offset = np.zeros(len(state), dtype=complex)
    refl = np.zeros(len(state), dtype=bool)
    cyl = np.ones(len(state))
    words = np.zeros((len(state), 0), dtype=np.uint8)
    root = np.arange(len(state))
    h = np.array([weights[u] for u in g.states])
    # parameter value where each segment starts; refined level by level so
    # rounding grows with depth, not with the number of segments
    start = np.concatenate([[0.0], np.cumsum(h[state])[:-1]])
    for _ in range(n):
        k_per = lens[state]
        parent = np.repeat(np.arange(len(state)), k_per)
        starts = np.cumsum(k_per) - k_per
        k = np.arange(len(parent)) - starts[parent]
        ps = state[parent]
        mi = b_map[ps, k]
        # T o S with T = (scale, offset, refl)[parent], S = maps[mi]
        tr = refl[parent]
        s_scale = np.where(tr, np.conj(m_scale[mi]), m_scale[mi])
        s_off = np.where(tr, np.conj(m_offset[mi]), m_offset[mi])
        offset = scale[parent] * s_off + offset[parent]
        scale = scale[parent] * s_scale
        refl = tr ^ m_refl[mi]
        cyl = cyl[parent] * ratio_s[mi]
        words = np.column_stack([words[parent], mi.astype(np.uint8)])
        state = b_tgt[ps, k]
        root = root[parent]
        grid = np.zeros((len(k_per), width))
        grid[parent, k] = cyl * h[state]
        before = np.cumsum(grid, axis=1) - grid
        start = start[parent] + before[parent, k]

    heads = np.array([g.head(u) for u in g.states])
    tails = np.array([g.tail(u) for u in g.states])

    def img(z):
        return scale * np.where(refl, np.conj(z), z) + offset

    start_pts = img(heads[state])
    end_pts = img(tails[state])
    mass = cyl * h[state]
    t = np.concatenate([start, [start[-1] + mass[-1]]])
    points = np.concatenate([start_pts, end_pts[-1:]])
    gap = float(np.abs(end_pts[:-1] - start_pts[1:]).max()) if len(state) > 1 else 0.0
    return CurveApproximation(n, t, points, state, words, mass, g.states, g.dimension, gap, root)


def holder_diagnostic(approx: CurveApproximation, pairs: int = HOLDER_PAIRS,
                      seed: int = DEFAULT_SEED) -> float:
    """Max of |phi(t) - phi(t')| / |t - t'|**(1/s) over stratified random pairs.

    ``t`` is stratified over [0, 1]; separations are log-uniform over
    ``HOLDER_DECADES`` decades.  The same pairs are drawn for every depth.
    """
    if len(approx.t) < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    t = (np.arange(pairs) + rng.random(pairs)) / pairs
    delta = 10.0 ** (-HOLDER_DECADES * ((np.arange(pairs) + rng.random(pairs)) / pairs))
    rng.shuffle(delta)
    t2 = t + delta
    flip = t2 > 1.0
    t2[flip] = t[flip] - delta[flip]
    d = np.abs(approx(t) - approx(t2))
    return float(np.max(d / np.abs(t - t2) ** (1.0 / approx.dimension)))


def convergence_diagnostic(a1: CurveApproximation, a2: CurveApproximation) -> float:
    """sup_t |phi_{n+1}(t) - phi_n(t)| over the union of both breakpoint grids."""
    if a2.depth != a1.depth + 1:
        raise ValueError(f"expected consecutive depths, got {a1.depth} and {a2.depth}")
    grid = np.union1d(a1.t, a2.t)
    return float(np.max(np.abs(a2(grid) - a1(grid))))


def nesting_violation(coarse_approx: CurveApproximation, fine_approx: CurveApproximation) -> float:
    """Largest distance from a depth-n vertex to the depth-(n+1) vertex set."""
    fine = np.column_stack([fine_approx.points.real, fine_approx.points.imag])
    pts = np.column_stack([coarse_approx.points.real, coarse_approx.points.imag])
    dist, _ = cKDTree(fine).query(pts)
    return float(dist.max())
