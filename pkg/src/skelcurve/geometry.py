"""Planar similitudes and tolerance-based point identification.

Points are plain Python ``complex`` numbers.  A similitude is stored in the
normal form ``z -> scale * z + offset`` (or ``scale * conj(z) + offset`` when
``reflects`` is set); no matrices are ever built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateVertexSet, ToleranceError


def _check_finite(z: complex, what: str) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {z!r}")


@dataclass(frozen=True)
class Similitude:
    scale: complex
    offset: complex = 0j
    reflects: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale", complex(self.scale))
        object.__setattr__(self, "offset", complex(self.offset))
        object.__setattr__(self, "reflects", bool(self.reflects))
        _check_finite(self.scale, "scale")
        _check_finite(self.offset, "offset")
        if not 0.0 < abs(self.scale) < 1.0:
            raise ValueError(f"similitude must be strictly contracting, |scale| = {abs(self.scale)}")

    @property
    def ratio(self) -> float:
        return abs(self.scale)

    def __call__(self, z):
        """Apply to a complex scalar or a numpy array of complex points."""
        if self.reflects:
            z = np.conj(z) if isinstance(z, np.ndarray) else complex(z).conjugate()
        return self.scale * z + self.offset


@dataclass(frozen=True)
class Tolerance:
    epsilon: float

    def __post_init__(self) -> None:
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ToleranceError(f"epsilon must be positive, got {self.epsilon!r}")


def apply(s: Similitude, p: complex) -> complex:
    return s(p)


def compose(s: Similitude, t: Similitude) -> Similitude:
    """Return ``s o t`` (apply ``t`` first)."""
    inner_scale = t.scale.conjugate() if s.reflects else t.scale
    inner_offset = t.offset.conjugate() if s.reflects else t.offset
    return Similitude(s.scale * inner_scale, s.scale * inner_offset + s.offset, s.reflects ^ t.reflects)


def fixed_point(s: Similitude) -> complex:
    a, b = s.scale, s.offset
    if s.reflects:
        # z = a conj(z) + b  =>  z (1 - |a|^2) = a conj(b) + b
        return (a * b.conjugate() + b) / (1.0 - abs(a) ** 2)
    return b / (1.0 - a)


def apply_word(maps: Sequence[Similitude], word: Iterable[int], p: complex) -> complex:
    """Evaluate ``S_{w1} o ... o S_{wk}(p)``; the empty word is the identity."""
    for i in reversed(tuple(word)):
        p = maps[i](p)
    return p


def word_ratio(maps: Sequence[Similitude], word: Iterable[int]) -> float:
    r = 1.0
    for i in word:
        r *= maps[i].ratio
    return r


def points_equal(p: complex, q: complex, tol: Tolerance) -> bool:
    return abs(p - q) <= tol.epsilon


def diameter(points: Sequence[complex]) -> float:
    pts = list(points)
    return max((abs(p - q) for i, p in enumerate(pts) for q in pts[i + 1:]), default=0.0)


def default_tolerance(points: Sequence[complex]) -> Tolerance:
    d = diameter(points)
    return Tolerance(1e-9 * d if d > 0 else 1e-12)


class PointSnapper:
    """Identify points within ``epsilon`` by snapping to the first-seen representative.

    Snapping makes equality transitive.  A query point that lies within
    ``epsilon`` of two distinct representatives is rejected, as is a new
    representative closer than ``2 * epsilon`` to an existing one.
    """

    def __init__(self, tol: Tolerance):
        self.tol = tol
        self.points: list[complex] = []
        self._cell = 2.0 * tol.epsilon
        self._grid: dict[tuple[int, int], list[int]] = {}

    def _key(self, z: complex) -> tuple[int, int]:
        return (math.floor(z.real / self._cell), math.floor(z.imag / self._cell))

    def _near(self, z: complex, radius: float) -> list[int]:
        kx, ky = self._key(z)
        hits = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self._grid.get((kx + dx, ky + dy), ()):
                    if abs(self.points[idx] - z) <= radius:
                        hits.append(idx)
        return hits

    def find(self, z: complex) -> int | None:
        hits = self._near(z, self.tol.epsilon)
        if len(hits) > 1:
            raise DegenerateVertexSet(f"point {z!r} is within epsilon of several vertices")
        return hits[0] if hits else None

    def snap(self, z: complex) -> int:
        z = complex(z)
        idx = self.find(z)
        if idx is not None:
            return idx
        if self._near(z, 2.0 * self.tol.epsilon):
            raise DegenerateVertexSet(
                f"point {z!r} is closer than 2*epsilon to an existing vertex but not within epsilon"
            )
        self.points.append(z)
        self._grid.setdefault(self._key(z), []).append(len(self.points) - 1)
        return len(self.points) - 1

    def __len__(self) -> int:
        return len(self.points)
