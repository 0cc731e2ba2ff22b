import time
from dataclasses import dataclass

import pytest

from skelcurve import get_example, run_pipeline
from skelcurve.config import JobConfig
from skelcurve.gifs import InducedGifs
from skelcurve.ifs import IfsSystem, Skeleton
from skelcurve.substitution import SubstitutionRule

BUILTINS = ("terdragon", "gasket", "carpet", "four-star")

_SESSION_START = time.perf_counter()


def session_elapsed() -> float:
    return time.perf_counter() - _SESSION_START


@dataclass
class Built:
    config: JobConfig
    ifs: IfsSystem
    skeleton: Skeleton
    rule: SubstitutionRule
    gifs: InducedGifs  # with measure weights attached


_cache: dict[str, Built] = {}


def build(name: str) -> Built:
    if name not in _cache:
        cfg = get_example(name)
        res = run_pipeline(cfg, depth=0, diagnostics=False)
        assert res.report.verdict == "PASS", res.report.render()
        _cache[name] = Built(cfg, res.gifs.ifs, res.skeleton, res.rule, res.gifs)
    return _cache[name]


@pytest.fixture(params=BUILTINS)
def builtin(request) -> Built:
    return build(request.param)


@pytest.fixture
def terdragon() -> Built:
    return build("terdragon")


@pytest.fixture
def gasket() -> Built:
    return build("gasket")


def pytest_collection_modifyitems(items):
    # run the acceptance module last so its runtime check sees the whole suite
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(f"skelcurve suite wall time: {session_elapsed():.2f} s")
