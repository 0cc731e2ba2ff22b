"""Built-in examples with full numeric data."""

from __future__ import annotations

import cmath
import math

from .config import JobConfig
from .geometry import Similitude


def terdragon() -> JobConfig:
    lam = cmath.exp(1j * math.pi / 6) / math.sqrt(3)
    w = cmath.exp(2j * math.pi / 3)
    return JobConfig(
        name="terdragon",
        description="S_k(z) = lam*z + w^(k-1), lam = exp(i pi/6)/sqrt(3); skeleton = fixed points",
        maps=[Similitude(lam, 1), Similitude(lam, w), Similitude(lam, w * w)],
        skeleton=[-w * w / lam, -1 / lam, -w / lam],
        mode="auto-search", depth=6)


GASKET_VERTICES = (0j, 1 + 0j, cmath.exp(1j * math.pi / 3))

GASKET_RULE = [
    "v1 -> S1(v1) S2(v3^-1) S2(v2^-1)",
    "v2 -> S2(v1^-1) S1(v2) S3(v3^-1)",
    "v3 -> S3(v2^-1) S3(v1^-1) S1(v3)",
]


def gasket() -> JobConfig:
    return JobConfig(
        name="gasket",
        description="Sierpinski gasket, three homotheties of ratio 1/2; explicit rule at beta=(1,-1,-1)",
        maps=[Similitude(0.5, p / 2) for p in GASKET_VERTICES],
        skeleton=list(GASKET_VERTICES),
        mode="explicit-rule", rule=list(GASKET_RULE), beta=(1, -1, -1), depth=3)


CARPET_OFFSETS = [(0, 0), (1, 0), (2, 0), (0, 1), (2, 1), (0, 2), (1, 2), (2, 2)]


def carpet() -> JobConfig:
    return JobConfig(
        name="carpet",
        description="Sierpinski carpet, eight homotheties of ratio 1/3; skeleton = edge midpoints",
        maps=[Similitude(1 / 3, complex(x, y) / 3) for x, y in CARPET_OFFSETS],
        skeleton=[0.5 + 0j, 1 + 0.5j, 0.5 + 1j, 0.5j],
        mode="auto-search", depth=4)


def four_star() -> JobConfig:
    d = [0j, cmath.exp(1j * math.pi / 6), cmath.exp(5j * math.pi / 6), -1j]
    r = 2 / math.sqrt(3)
    return JobConfig(
        name="four-star",
        description="four star tile, S_j(x) = -x/2 + d_j; skeleton = 3-cycle of S2 S3 S4",
        maps=[Similitude(-0.5, dj) for dj in d],
        skeleton=[cmath.rect(r, 2 * math.pi * k / 3) for k in range(3)],
        mode="auto-search", depth=5)


CATALOG = {
    "terdragon": terdragon,
    "gasket": gasket,
    "carpet": carpet,
    "four-star": four_star,
}


def list_examples() -> dict[str, JobConfig]:
    return {name: make() for name, make in CATALOG.items()}


def get_example(name: str) -> JobConfig:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(CATALOG)}") from None
