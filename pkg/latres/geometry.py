from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

from latres.diagram import (
    Diagram,
    boundary_chains,
    join,
    trace_cell,
    validate_well_formed,
)
from latres.errors import PreconditionError

logger = logging.getLogger(__name__)

C2 = "C2"
C3 = "C3"
UP = "up"
DOWN = "down"
LEFT = "left"
RIGHT = "right"

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True, order=True)
class PrimeInterval:
    bottom: int
    top: int

    @property
    def elements(self) -> tuple[int, int]:
        return (self.bottom, self.top)


@dataclass(frozen=True, order=True)
class C3Chain:
    bottom: int
    middle: int
    top: int

    @property
    def elements(self) -> tuple[int, int, int]:
        return (self.bottom, self.middle, self.top)

    @property
    def lower_interval(self) -> PrimeInterval:
        return PrimeInterval(self.bottom, self.middle)

    @property
    def upper_interval(self) -> PrimeInterval:
        return PrimeInterval(self.middle, self.top)


Link = Union[PrimeInterval, C3Chain]


@dataclass(frozen=True)
class Cell:
    bottom: int
    top: int
    left_side: tuple[int, ...]
    right_side: tuple[int, ...]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.left_side) | frozenset(self.right_side)

    @property
    def is_four_cell(self) -> bool:
        return len(self.left_side) == 3 and len(self.right_side) == 3

    @property
    def left_middle(self) -> int:
        return self.left_side[1]

    @property
    def right_middle(self) -> int:
        return self.right_side[1]


@dataclass(frozen=True)
class Trajectory:
    kind: str
    links: tuple[Link, ...]
    steps: tuple[str, ...]

    @property
    def turn_index(self) -> int | None:
        if DOWN not in self.steps:
            return None
        return self.steps.index(DOWN)

    @property
    def shape(self) -> str:
        return "up" if self.turn_index is None else "hat"

    @property
    def is_well_shaped(self) -> bool:
        turn = self.turn_index
        return turn is None or all(step == DOWN for step in self.steps[turn:])

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(element for link in self.links for element in link.elements)

    def index(self, link: Link) -> int:
        return self.links.index(link)

    def slice(self, start: int, stop: int) -> "Trajectory":
        return Trajectory(self.kind, self.links[start:stop], self.steps[start : max(start, stop - 1)])


@dataclass(frozen=True)
class C2Neighbors:
    """Per prime interval, its neighbour across the 4-cell on each side.

    Steps are always read left to right: ``right[a] == (b, UP)`` means the
    trajectory climbs from ``a`` to ``b``.
    """

    right: dict[PrimeInterval, tuple[PrimeInterval, str]]
    left: dict[PrimeInterval, tuple[PrimeInterval, str]]


# ── Cells ───────────────────────────────────────────────────────────────


@lru_cache(maxsize=4096)
def _cells(diagram: Diagram) -> tuple[Cell, ...]:
    found: list[Cell] = []
    for x in range(diagram.n):
        for index in range(len(diagram.upper[x]) - 1):
            left_side, right_side = trace_cell(diagram, x, index)
            found.append(Cell(x, left_side[-1], left_side, right_side))
    return tuple(found)


def cells(diagram: Diagram) -> list[Cell]:
    return list(_cells(diagram))


def four_cells(diagram: Diagram) -> list[Cell]:
    return [cell for cell in _cells(diagram) if cell.is_four_cell]


@lru_cache(maxsize=4096)
def check_gk_criterion(diagram: Diagram) -> bool:
    """All cells are 4-cells and no two 4-cells share a bottom."""
    if not validate_well_formed(diagram).ok:
        return False
    all_cells = _cells(diagram)
    if not all(cell.is_four_cell for cell in all_cells):
        return False
    bottoms = [cell.bottom for cell in all_cells]
    return len(bottoms) == len(set(bottoms))


def covering_squares(diagram: Diagram) -> list[frozenset[int]]:
    squares: set[frozenset[int]] = set()
    for x in range(diagram.n):
        covers = diagram.upper[x]
        for i, a in enumerate(covers):
            for b in covers[i + 1 :]:
                top = join(diagram, a, b)
                if top in diagram.upper[a] and top in diagram.upper[b]:
                    squares.add(frozenset((x, a, b, top)))
    return sorted(squares, key=lambda square: tuple(sorted(square)))


# ── Trajectories ────────────────────────────────────────────────────────


@lru_cache(maxsize=4096)
def c2_neighbors(diagram: Diagram) -> C2Neighbors:
    right: dict[PrimeInterval, tuple[PrimeInterval, str]] = {}
    left: dict[PrimeInterval, tuple[PrimeInterval, str]] = {}
    for cell in _cells(diagram):
        if not cell.is_four_cell:
            continue
        x, lm, rm, t = cell.bottom, cell.left_middle, cell.right_middle, cell.top
        lower_left, upper_left = PrimeInterval(x, lm), PrimeInterval(lm, t)
        lower_right, upper_right = PrimeInterval(x, rm), PrimeInterval(rm, t)
        right[lower_left] = (upper_right, UP)
        right[upper_left] = (lower_right, DOWN)
        left[upper_right] = (lower_left, UP)
        left[lower_right] = (upper_left, DOWN)
    return C2Neighbors(right=right, left=left)


def _c3_step(
    diagram: Diagram, chain: C3Chain, side: str
) -> tuple[C3Chain, str] | None:
    table = c2_neighbors(diagram).left if side == LEFT else c2_neighbors(diagram).right
    lower = table.get(chain.lower_interval)
    upper = table.get(chain.upper_interval)
    if lower is None or upper is None:
        return None
    (low_link, low_step), (up_link, up_step) = lower, upper
    if low_link.top != up_link.bottom or low_step != up_step:
        return None
    return C3Chain(low_link.bottom, low_link.top, up_link.top), low_step


def _step(diagram: Diagram, link: Link, side: str) -> tuple[Link, str] | None:
    if isinstance(link, C3Chain):
        return _c3_step(diagram, link, side)
    neighbors = c2_neighbors(diagram)
    table = neighbors.left if side == LEFT else neighbors.right
    return table.get(link)


def trajectory(diagram: Diagram, start: Link) -> Trajectory:
    kind = C3 if isinstance(start, C3Chain) else C2
    seen = {start}

    left_links: list[Link] = []
    left_steps: list[str] = []
    current = start
    while (found := _step(diagram, current, LEFT)) is not None:
        neighbor, step = found
        if neighbor in seen:
            raise PreconditionError(f"trajectory: cycle through {neighbor}")
        seen.add(neighbor)
        left_links.append(neighbor)
        left_steps.append(step)
        current = neighbor

    right_links: list[Link] = []
    right_steps: list[str] = []
    current = start
    while (found := _step(diagram, current, RIGHT)) is not None:
        neighbor, step = found
        if neighbor in seen:
            raise PreconditionError(f"trajectory: cycle through {neighbor}")
        seen.add(neighbor)
        right_links.append(neighbor)
        right_steps.append(step)
        current = neighbor

    links = tuple(reversed(left_links)) + (start,) + tuple(right_links)
    steps = tuple(reversed(left_steps)) + tuple(right_steps)
    return Trajectory(kind, links, steps)


def wing_trajectory(diagram: Diagram, link: Link, side: str) -> Trajectory:
    whole = trajectory(diagram, link)
    position = whole.index(link)
    if side == LEFT:
        return whole.slice(0, position + 1)
    if side == RIGHT:
        return whole.slice(position, len(whole.links))
    raise PreconditionError(f"wing: side must be {LEFT!r} or {RIGHT!r}, got {side!r}")


def wing(diagram: Diagram, link: Link, side: str) -> list[Link]:
    return list(wing_trajectory(diagram, link, side).links)


def prime_intervals(diagram: Diagram) -> Iterator[PrimeInterval]:
    for x, y in diagram.covers():
        yield PrimeInterval(x, y)


def c3_chains(diagram: Diagram) -> Iterator[C3Chain]:
    for x in range(diagram.n):
        for middle in diagram.upper[x]:
            for y in diagram.upper[middle]:
                yield C3Chain(x, middle, y)


def all_trajectories(diagram: Diagram, kind: str) -> list[Trajectory]:
    links = prime_intervals(diagram) if kind == C2 else c3_chains(diagram)
    covered: set[Link] = set()
    found: list[Trajectory] = []
    for link in links:
        if link in covered:
            continue
        current = trajectory(diagram, link)
        covered.update(current.links)
        found.append(current)
    return found


def lies_on_boundary(diagram: Diagram, link: Link, side: str | None = None) -> bool:
    left, right = boundary_chains(diagram)
    elements = set(link.elements)
    if side == LEFT:
        return elements <= set(left)
    if side == RIGHT:
        return elements <= set(right)
    return elements <= set(left) or elements <= set(right)
