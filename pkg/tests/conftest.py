from __future__ import annotations

import pytest

from latres.census import CensusStore, census
from latres.diagram import Diagram
from latres.gallery import grid, pentagon, s7, stacked_n7
from latres.latdiag import save_latdiag
from latres.settings import MAX_ELEMENTS_ENV_VAR


@pytest.fixture(autouse=True)
def _no_limit_override(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(MAX_ELEMENTS_ENV_VAR, raising=False)


@pytest.fixture
def grid33() -> Diagram:
    return grid(3, 3)


@pytest.fixture
def s7_diagram() -> Diagram:
    return s7()


@pytest.fixture
def n5() -> Diagram:
    return pentagon()


@pytest.fixture
def small_store() -> CensusStore:
    return census(4)


@pytest.fixture
def store9() -> CensusStore:
    return census(9)


@pytest.fixture(scope="session")
def corpus() -> list[Diagram]:
    """Census up to 11 elements plus the stacked N7s with towers up to height 3."""
    return census(11).diagrams() + [stacked_n7(m) for m in range(4)]


@pytest.fixture
def write_diagram(tmp_path):
    def write(diagram: Diagram, name: str = "input.latdiag"):
        path = tmp_path / name
        save_latdiag(diagram, path)
        return path

    return write
