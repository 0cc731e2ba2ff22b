"""Fine and coarse substitution rules, symbolic iteration, primitivity and pure cells."""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainMiss, RuleViolation
from .graphs import AbstractEdge, EdgePath, LabeledEdge, Partition, edge_points, reverse_path
from .ifs import IfsSystem, Skeleton

DEFAULT_PURE_CELL_DEPTH = 4


@dataclass(frozen=True)
class SubstitutionRule:
    m: int
    images: Mapping[AbstractEdge, EdgePath]

    @property
    def domain(self) -> tuple[AbstractEdge, ...]:
        return tuple(self.images)

    def __getitem__(self, u: AbstractEdge) -> EdgePath:
        return self.images[u]

    def lengths(self) -> dict[AbstractEdge, int]:
        return {u: len(p) for u, p in self.images.items()}

    def reachable_states(self) -> tuple[AbstractEdge, ...]:
        """States reachable from v_1..v_m, in domain order.

        For a partition of G(S, A, (1,...,1)) this is just the positive half.
        """
        seen = set()
        stack = [AbstractEdge(j, 1) for j in range(self.m) if AbstractEdge(j, 1) in self.images]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            for e in self.images.get(u, ()):
                if e.edge not in seen:
                    stack.append(e.edge)
        return tuple(u for u in self.domain if u in seen) + tuple(
            sorted(u for u in seen if u not in self.images))

    def restricted(self) -> "SubstitutionRule":
        keep = [u for u in self.reachable_states() if u in self.images]
        return SubstitutionRule(self.m, {u: self.images[u] for u in keep})

    def text(self) -> str:
        return format_rule(self)


def rule_from_partition(partition: Partition) -> SubstitutionRule:
    """``v_j -> P_j`` and ``v_j^-1 -> P_j^-1`` (reversed, each edge inverted)."""
    m = len(partition)
    if m < 2:
        raise ValueError("a partition needs m >= 2 paths")
    images: dict[AbstractEdge, EdgePath] = {}
    for j, path in enumerate(partition):
        images[AbstractEdge(j, 1)] = tuple(path)
    for j, path in enumerate(partition):
        images[AbstractEdge(j, -1)] = reverse_path(tuple(path))
    return SubstitutionRule(m, images)


@dataclass(frozen=True)
class RuleCertificate:
    states: int
    edges_checked: int
    junctions_checked: int


def validate_rule(rule: SubstitutionRule, ifs: IfsSystem, skeleton: Skeleton) -> RuleCertificate:
    """Check the two defining conditions of a substitution rule geometrically.

    Raises ``RuleViolation`` with code ``BAD_EDGE_FORM`` (edge not ``S_i(v)``
    with ``v`` in the domain) or ``BAD_ENDPOINTS`` (wrong end points or a
    broken junction inside a path).
    """
    eps = skeleton.tol.epsilon
    m = skeleton.m
    domain = set(rule.domain)
    edges = junctions = 0
    for u, path in rule.images.items():
        if not path:
            raise RuleViolation(f"empty image for {u}", code="BAD_ENDPOINTS", detail={"state": str(u)})
        for k, e in enumerate(path):
            if len(e.word) != 1 or not 0 <= e.word[0] < ifs.N or e.edge not in domain:
                raise RuleViolation(f"{u}: edge {k + 1} ({e}) is not S_i(v) with v in the domain",
                                    code="BAD_EDGE_FORM", detail={"state": str(u), "position": k + 1})
        pts = [edge_points(e, ifs, skeleton) for e in path]
        edges += len(pts)
        for k in range(len(pts) - 1):
            junctions += 1
            if abs(pts[k][1] - pts[k + 1][0]) > eps:
                raise RuleViolation(f"{u}: edges {k + 1} and {k + 2} do not chain",
                                    code="BAD_ENDPOINTS", detail={"state": str(u), "position": k + 1})
        i, j = u.endpoints(m)
        if abs(pts[0][0] - skeleton.points[i]) > eps or abs(pts[-1][1] - skeleton.points[j]) > eps:
            raise RuleViolation(f"{u}: image does not run from a{i + 1} to a{j + 1}",
                                code="BAD_ENDPOINTS", detail={"state": str(u), "position": 0})
    return RuleCertificate(len(rule.images), edges, junctions)


def partition_orientation(rule: SubstitutionRule, N: int) -> tuple[int, ...] | None:
    """Return beta if the images of v_1..v_m partition the edges of the
    induced graph G(S, A, beta) and each v_j^-1 maps to the reversed path.

    Endpoints are not checked here; ``validate_rule`` does that.
    """
    m = rule.m
    pos = [rule.images.get(AbstractEdge(j, 1)) for j in range(m)]
    if any(p is None for p in pos):
        return None
    used = Counter(e for p in pos for e in p)
    if any(c != 1 for c in used.values()) or len(used) != m * N:
        return None
    beta = []
    for i in range(N):
        dirs = {e.edge.direction for e in used if e.word == (i,)}
        idx = {e.edge.index for e in used if e.word == (i,)}
        if len(dirs) != 1 or len(idx) != m:
            return None
        beta.append(dirs.pop())
    for j, p in enumerate(pos):
        inv = rule.images.get(AbstractEdge(j, -1))
        if inv is not None and tuple(inv) != reverse_path(tuple(p)):
            return None
    return tuple(beta)


def is_traversing(rule: SubstitutionRule, ifs: IfsSystem) -> bool:
    """Every image uses each map S_i on exactly one abstract edge."""
    for path in rule.images.values():
        used: dict[int, set] = defaultdict(set)
        for e in path:
            used[e.word[0]].add(e.edge)
        if any(len(used.get(i, ())) != 1 for i in range(ifs.N)):
            return False
    return True


def iterate(rule: SubstitutionRule, path: Iterable[LabeledEdge], n: int) -> EdgePath:
    """Apply ``tau`` n times, using tau(S_I(u)) = S_I(tau(u)) edgewise."""
    out = tuple(path)
    for _ in range(n):
        nxt = []
        for e in out:
            image = rule.images.get(e.edge)
            if image is None:
                raise DomainMiss(f"{e.edge} is not in the rule's domain", detail=str(e))
            nxt.extend(LabeledEdge(e.word + f.word, f.edge) for f in image)
        out = tuple(nxt)
    return out


@dataclass(frozen=True)
class CoarseSubstitution:
    m: int
    images: tuple[tuple[int, ...], ...]  # images[j] lists the |v| indices of tau*(v_j)

    def text(self) -> str:
        return "\n".join(f"v{j + 1} -> " + " ".join(f"v{k + 1}" for k in img)
                         for j, img in enumerate(self.images))


def coarse(rule: SubstitutionRule) -> tuple[CoarseSubstitution, np.ndarray]:
    """Forget words and directions; return tau* and its m x m incidence matrix."""
    m = rule.m
    images = []
    M = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        img = tuple(e.edge.index for e in rule.images[AbstractEdge(j, 1)])
        images.append(img)
        for k in img:
            M[j, k] += 1
    return CoarseSubstitution(m, tuple(images)), M


def is_primitive(M: np.ndarray) -> tuple[bool, int | None]:
    """Return (True, k) with k minimal such that M**k > 0, searching k up to
    the Wielandt bound (m-1)**2 + 1; (False, None) otherwise."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or (M < 0).any():
        raise ValueError("expected a square nonnegative matrix")
    m = M.shape[0]
    B = (M > 0).astype(np.int64)
    P = B.copy()
    for k in range(1, (m - 1) ** 2 + 2):
        if P.all():
            return True, k
        P = ((P @ B) > 0).astype(np.int64)
    return False, None


@dataclass(frozen=True)
class PureCellWitness:
    state: AbstractEdge
    word: tuple[int, ...]
    sign: int

    @property
    def depth(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        w = "".join(str(i + 1) for i in self.word)
        kind = "positive" if self.sign > 0 else "negative"
        return f"{kind} S{w}-cell in tau^{self.depth}({self.state})"


def find_pure_cell(rule: SubstitutionRule, max_depth: int = DEFAULT_PURE_CELL_DEPTH,
                   states: Sequence[AbstractEdge] | None = None) -> PureCellWitness | None:
    """First pure cell in (depth, state, word, sign) order, or None."""
    m = rule.m
    states = tuple(states) if states is not None else tuple(u for u in rule.reachable_states()
                                                            if u in rule.images)
    level = {u: (LabeledEdge((), u),) for u in states}
    for n in range(1, max_depth + 1):
        for u in states:
            level[u] = iterate(rule, level[u], 1)
            cells: dict[tuple, set] = defaultdict(set)
            for e in level[u]:
                cells[(e.word, e.edge.direction)].add(e.edge.index)
            full = sorted(((w, -d) for (w, d), idx in cells.items() if len(idx) == m))
            if full:
                w, d = full[0]
                return PureCellWitness(u, w, -d)
    return None


def edge_multiset(path: Iterable[LabeledEdge]) -> Counter:
    return Counter(path)


# -- canonical text form ----------------------------------------------------

_STATE = r"v(\d+)(\^-1)?"
_LINE = re.compile(rf"^\s*{_STATE}\s*->\s*(.*?)\s*$")
_TERM = re.compile(rf"^S(\d+)\({_STATE}\)$")


def _state(index: str, inv: str | None) -> AbstractEdge:
    return AbstractEdge(int(index) - 1, -1 if inv else 1)


def format_rule(rule: SubstitutionRule) -> str:
    return "\n".join(f"{u} -> " + " ".join(map(str, p)) for u, p in rule.images.items())


def parse_rule(lines: Sequence[str] | str, m: int, *, add_inverses: bool = True) -> SubstitutionRule:
    """Parse lines like ``v1 -> S1(v1) S2(v3^-1) S2(v2^-1)``.

    Map indices in the text are 1-based and single-letter.  With
    ``add_inverses`` the image of each missing ``v_j^-1`` is the reversed
    image of ``v_j``.
    """
    if isinstance(lines, str):
        lines = [ln for ln in lines.splitlines() if ln.strip()]
    images: dict[AbstractEdge, EdgePath] = {}
    for line in lines:
        mo = _LINE.match(line)
        if not mo:
            raise ValueError(f"cannot parse rule line {line!r}")
        u = _state(mo.group(1), mo.group(2))
        terms = []
        for tok in mo.group(3).split():
            tm = _TERM.match(tok)
            if not tm:
                raise ValueError(f"cannot parse term {tok!r} in {line!r}")
            terms.append(LabeledEdge((int(tm.group(1)) - 1,), _state(tm.group(2), tm.group(3))))
        if u in images:
            raise ValueError(f"duplicate image for {u}")
        images[u] = tuple(terms)
    for u in list(images):
        if not 0 <= u.index < m:
            raise ValueError(f"state {u} outside v1..v{m}")
    if add_inverses:
        for u in [u for u in images if u.direction > 0]:
            images.setdefault(u.reverse(), reverse_path(images[u]))
    ordered = {u: images[u] for u in sorted(images, key=lambda u: (-u.direction, u.index))}
    return SubstitutionRule(m, ordered)
