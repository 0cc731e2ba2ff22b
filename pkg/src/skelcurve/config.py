"""Job configuration: strict JSON schema, complex numbers as ``[re, im]``."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .geometry import Similitude, Tolerance
from .ifs import IfsSystem

MODES = ("auto-search", "explicit-rule", "traversing-check")

ENV_BUDGETS = {
    "SKELCURVE_NODE_BUDGET": "node_budget",
    "SKELCURVE_MAX_PARTITIONS": "max_partitions",
    "SKELCURVE_MAX_ORIENTATIONS": "max_orientations",
    "SKELCURVE_PURE_CELL_DEPTH": "pure_cell_depth",
    "SKELCURVE_SEGMENT_CAP": "segment_cap",
}


@dataclass
class Budgets:
    node_budget: int = 10**7
    max_partitions: int = 64
    max_orientations: int | None = None
    pure_cell_depth: int = 4
    segment_cap: int = 10**7

    def with_env(self, environ=None) -> "Budgets":
        environ = os.environ if environ is None else environ
        out = Budgets(**vars(self))
        for var, attr in ENV_BUDGETS.items():
            if var in environ:
                try:
                    setattr(out, attr, int(environ[var]))
                except ValueError as exc:
                    raise ConfigError(f"{var} must be an integer") from exc
        return out


@dataclass
class Outputs:
    svg: str | None = None
    csv: str | None = None
    report: str | None = None
    color_states: bool = False


@dataclass
class JobConfig:
    name: str
    maps: list[Similitude]
    skeleton: list[complex]
    mode: str = "auto-search"
    rule: list[str] | None = None
    beta: tuple[int, ...] | None = None
    depth: int = 4
    tolerance: float | None = None
    budgets: Budgets = field(default_factory=Budgets)
    outputs: Outputs = field(default_factory=Outputs)
    seed: int = 0x5FC
    osc: bool = True
    description: str = ""

    def ifs(self) -> IfsSystem:
        return IfsSystem(tuple(self.maps), self.name, self.osc)

    def tol(self) -> Tolerance | None:
        return None if self.tolerance is None else Tolerance(self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "name": self.name,
            "description": self.description,
            "ifs": {
                "maps": [{"scale": _cx(s.scale), "offset": _cx(s.offset), "reflects": s.reflects}
                         for s in self.maps],
                "osc": self.osc,
            },
            "skeleton": [_cx(p) for p in self.skeleton],
            "mode": self.mode,
            "depth": self.depth,
            "seed": self.seed,
            "budgets": {k: v for k, v in vars(self.budgets).items() if v is not None},
        }
        if self.rule is not None:
            d["rule"] = list(self.rule)
        if self.beta is not None:
            d["beta"] = list(self.beta)
        if self.tolerance is not None:
            d["tolerance"] = self.tolerance
        outs = {k: v for k, v in vars(self.outputs).items() if v not in (None, False)}
        if outs:
            d["outputs"] = outs
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _cx(z: complex) -> list[float]:
    return [z.real, z.imag]


def _complex(v, where: str) -> complex:
    if (not isinstance(v, list) or len(v) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)):
        raise ConfigError(f"{where}: expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def _only(d: dict, allowed: set, where: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"{where}: unknown keys {extra}")


def _int(v, where: str, minimum: int | None = None) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}")
    return v


def parse_config(data: dict[str, Any]) -> JobConfig:
    _only(data, {"name", "description", "ifs", "skeleton", "mode", "rule", "beta", "depth",
                 "tolerance", "budgets", "outputs", "seed"}, "config")
    for key in ("name", "ifs", "skeleton"):
        if key not in data:
            raise ConfigError(f"config: missing required key {key!r}")
    ifs = data["ifs"]
    _only(ifs, {"maps", "osc"}, "ifs")
    if not isinstance(ifs.get("maps"), list) or len(ifs["maps"]) < 2:
        raise ConfigError("ifs.maps: expected a list of at least two maps")
    maps = []
    for i, entry in enumerate(ifs["maps"]):
        where = f"ifs.maps[{i}]"
        _only(entry, {"scale", "offset", "reflects"}, where)
        if "scale" not in entry:
            raise ConfigError(f"{where}: missing scale")
        reflects = entry.get("reflects", False)
        if not isinstance(reflects, bool):
            raise ConfigError(f"{where}.reflects: expected a boolean")
        try:
            maps.append(Similitude(_complex(entry["scale"], where + ".scale"),
                                   _complex(entry.get("offset", [0, 0]), where + ".offset"), reflects))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if not isinstance(data["skeleton"], list):
        raise ConfigError("skeleton: expected a list of points")
    skeleton = [_complex(p, f"skeleton[{i}]") for i, p in enumerate(data["skeleton"])]

    mode = data.get("mode", "auto-search")
    if mode not in MODES:
        raise ConfigError(f"mode: expected one of {MODES}, got {mode!r}")
    rule = data.get("rule")
    if rule is not None and (not isinstance(rule, list) or not all(isinstance(x, str) for x in rule)):
        raise ConfigError("rule: expected a list of strings")
    if mode == "explicit-rule" and not rule:
        raise ConfigError("mode explicit-rule needs a rule")
    beta = data.get("beta")
    if beta is not None:
        if not isinstance(beta, list) or len(beta) != len(maps) or any(b not in (1, -1) for b in beta):
            raise ConfigError(f"beta: expected {len(maps)} entries from {{1, -1}}")
        beta = tuple(beta)
    tolerance = data.get("tolerance")
    if tolerance is not None and (not isinstance(tolerance, (int, float)) or tolerance <= 0):
        raise ConfigError("tolerance: expected a positive number")

    budgets = Budgets()
    b = data.get("budgets", {})
    _only(b, set(vars(budgets)), "budgets")
    for k, v in b.items():
        setattr(budgets, k, _int(v, f"budgets.{k}", 0))
    outputs = Outputs()
    o = data.get("outputs", {})
    _only(o, set(vars(outputs)), "outputs")
    for k, v in o.items():
        if k == "color_states":
            if not isinstance(v, bool):
                raise ConfigError("outputs.color_states: expected a boolean")
        elif not isinstance(v, str):
            raise ConfigError(f"outputs.{k}: expected a path string")
        setattr(outputs, k, v)
    osc = ifs.get("osc", True)
    if not isinstance(osc, bool):
        raise ConfigError("ifs.osc: expected a boolean")
    name = data["name"]
    if not isinstance(name, str):
        raise ConfigError("name: expected a string")
    return JobConfig(
        name=name, maps=maps, skeleton=skeleton, mode=mode, rule=rule, beta=beta,
        depth=_int(data.get("depth", 4), "depth", 0),
        tolerance=None if tolerance is None else float(tolerance),
        budgets=budgets, outputs=outputs, seed=_int(data.get("seed", 0x5FC), "seed", 0), osc=osc,
        description=str(data.get("description", "")))


def load_config(path: str | os.PathLike) -> JobConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)
