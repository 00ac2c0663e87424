"""Planar lattice diagrams up to similarity."""
from __future__ import annotations

import hashlib
import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from latres.errors import PreconditionError

logger = logging.getLogger(__name__)

CanonicalKey = bytes

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Diagram:
    """Element ids are 0..n-1; both cover lists run left to right."""

    upper: tuple[tuple[int, ...], ...]
    lower: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        upper = tuple(tuple(int(y) for y in row) for row in self.upper)
        lower = tuple(tuple(int(y) for y in row) for row in self.lower)
        if len(upper) != len(lower):
            raise ValueError(
                f"upper and lower cover lists disagree on size: {len(upper)} != {len(lower)}"
            )
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def n(self) -> int:
        return len(self.upper)

    def __len__(self) -> int:
        return len(self.upper)

    def covers(self) -> Iterator[tuple[int, int]]:
        for x, row in enumerate(self.upper):
            for y in row:
                yield x, y

    @cached_property
    def topological_order(self) -> tuple[int, ...] | None:
        indegree = [0] * self.n
        for _, y in self.covers():
            indegree[y] += 1
        queue = deque(x for x in range(self.n) if indegree[x] == 0)
        order: list[int] = []
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in self.upper[x]:
                indegree[y] -= 1
                if indegree[y] == 0:
                    queue.append(y)
        if len(order) != self.n:
            return None
        return tuple(order)

    @cached_property
    def order(self) -> np.ndarray:
        """Boolean table with ``order[x, y]`` true iff x <= y."""
        topo = self.topological_order
        if topo is None:
            raise PreconditionError("order: the cover relation has a cycle")
        table = np.zeros((self.n, self.n), dtype=bool)
        for x in reversed(topo):
            table[x, x] = True
            for y in self.upper[x]:
                table[x] |= table[y]
        return table

    @cached_property
    def meet_table(self) -> np.ndarray:
        return _bound_table(self.order)

    @cached_property
    def join_table(self) -> np.ndarray:
        return _bound_table(self.order.T)

    @cached_property
    def heights(self) -> tuple[int, ...]:
        topo = self.topological_order
        if topo is None:
            raise PreconditionError("heights: the cover relation has a cycle")
        heights = [0] * self.n
        for x in topo:
            for y in self.upper[x]:
                heights[y] = max(heights[y], heights[x] + 1)
        return tuple(heights)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def has(self, category: str) -> bool:
        return any(violation.startswith(category) for violation in self.violations)


@dataclass(frozen=True)
class Irreducibles:
    ji: frozenset[int]
    mi: frozenset[int]
    doubly_irreducible: frozenset[int]


def _bound_table(order: np.ndarray) -> np.ndarray:
    # greatest common lower bound per pair; -1 where none exists
    n = order.shape[0]
    table = np.full((n, n), -1, dtype=np.int64)
    down_sizes = order.sum(axis=0)
    for x in range(n):
        for y in range(x, n):
            common = np.flatnonzero(order[:, x] & order[:, y])
            if common.size == 0:
                continue
            best = int(common[np.argmax(down_sizes[common])])
            if order[common, best].all():
                table[x, y] = best
                table[y, x] = best
    return table


# ── Basic queries ───────────────────────────────────────────────────────


def bottom(diagram: Diagram) -> int:
    for x, row in enumerate(diagram.lower):
        if not row:
            return x
    raise PreconditionError("bottom: every element has a lower cover")


def top(diagram: Diagram) -> int:
    for x, row in enumerate(diagram.upper):
        if not row:
            return x
    raise PreconditionError("top: every element has an upper cover")


def leq(diagram: Diagram, x: int, y: int) -> bool:
    return bool(diagram.order[x, y])


def meet(diagram: Diagram, x: int, y: int) -> int:
    value = int(diagram.meet_table[x, y])
    if value < 0:
        raise PreconditionError(f"meet: {x} and {y} have no greatest lower bound")
    return value


def join(diagram: Diagram, x: int, y: int) -> int:
    value = int(diagram.join_table[x, y])
    if value < 0:
        raise PreconditionError(f"join: {x} and {y} have no least upper bound")
    return value


def lattice_ops(diagram: Diagram, x: int, y: int) -> tuple[int, int]:
    return meet(diagram, x, y), join(diagram, x, y)


def boundary_chains(diagram: Diagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return _upward_chain(diagram, bottom(diagram), 0), _upward_chain(diagram, bottom(diagram), -1)


def interior(diagram: Diagram) -> frozenset[int]:
    left, right = boundary_chains(diagram)
    return frozenset(range(diagram.n)) - frozenset(left) - frozenset(right)


def irreducibles(diagram: Diagram) -> Irreducibles:
    ji = frozenset(x for x in range(diagram.n) if len(diagram.lower[x]) == 1)
    mi = frozenset(x for x in range(diagram.n) if len(diagram.upper[x]) == 1)
    return Irreducibles(ji=ji, mi=mi, doubly_irreducible=ji & mi)


def _upward_chain(diagram: Diagram, start: int, side: int) -> tuple[int, ...]:
    chain = [start]
    current = start
    while diagram.upper[current]:
        current = diagram.upper[current][side]
        chain.append(current)
        if len(chain) > diagram.n:
            raise PreconditionError("boundary: the cover relation has a cycle")
    return tuple(chain)


def _downward_chain(diagram: Diagram, start: int, side: int) -> tuple[int, ...]:
    chain = [start]
    current = start
    while diagram.lower[current]:
        current = diagram.lower[current][side]
        chain.append(current)
        if len(chain) > diagram.n:
            raise PreconditionError("boundary: the cover relation has a cycle")
    return tuple(reversed(chain))


def trace_cell(diagram: Diagram, x: int, index: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Sides of the cell spanned by upper covers ``index`` and ``index + 1`` of ``x``.

    The left side climbs from the left cover hugging rightmost covers, the right
    side climbs from the right cover hugging leftmost covers; both stop at the
    first element they share.
    """
    left_chain = _upward_chain(diagram, diagram.upper[x][index], -1)
    positions = {element: pos for pos, element in enumerate(left_chain)}
    right_side = [x]
    current = diagram.upper[x][index + 1]
    while current not in positions:
        right_side.append(current)
        if not diagram.upper[current]:
            raise PreconditionError(f"cell at {x} does not close")
        current = diagram.upper[current][0]
    right_side.append(current)
    left_side = (x,) + left_chain[: positions[current] + 1]
    return left_side, tuple(right_side)


# ── Validation ──────────────────────────────────────────────────────────


def validate_well_formed(diagram: Diagram) -> ValidationReport:
    n = diagram.n
    if n < 2:
        return ValidationReport((f"size: {n} elements, at least 2 are required",))

    id_problems = _id_violations(diagram)
    if id_problems:
        return ValidationReport(tuple(id_problems))

    violations: list[str] = []
    consistent = True
    for x, row in enumerate(diagram.upper):
        for y in row:
            if x not in diagram.lower[y]:
                violations.append(f"consistent: {y} in upper[{x}] but {x} not in lower[{y}]")
                consistent = False
    for y, row in enumerate(diagram.lower):
        for x in row:
            if y not in diagram.upper[x]:
                violations.append(f"consistent: {x} in lower[{y}] but {y} not in upper[{x}]")
                consistent = False

    if diagram.topological_order is None:
        violations.append("acyclic: the cover relation contains a cycle")
        return ValidationReport(tuple(violations))

    has_lower = {y for _, y in diagram.covers()}
    maximal = [x for x in range(n) if not diagram.upper[x]]
    minimal = [x for x in range(n) if x not in has_lower]
    if len(maximal) != 1:
        violations.append(f"unique top: {len(maximal)} maximal elements {maximal}")
    if len(minimal) != 1:
        violations.append(f"unique bottom: {len(minimal)} minimal elements {minimal}")

    order = diagram.order
    for x, row in enumerate(diagram.upper):
        for y in row:
            shortcut = [z for z in row if z != y and order[z, y]]
            if shortcut:
                violations.append(
                    f"transitively reduced: {x} < {y} is implied through {shortcut[0]}"
                )

    missing = np.argwhere((diagram.meet_table < 0) | (diagram.join_table < 0))
    if missing.size:
        x, y = (int(v) for v in missing[0])
        violations.append(f"lattice: {x} and {y} lack a meet or a join")

    if consistent and not violations:
        violations.extend(_planarity_violations(diagram))
    return ValidationReport(tuple(violations))


def _id_violations(diagram: Diagram) -> list[str]:
    problems: list[str] = []
    for name, lists in (("upper", diagram.upper), ("lower", diagram.lower)):
        for x, row in enumerate(lists):
            if len(set(row)) != len(row):
                problems.append(f"ids: duplicate entry in {name}[{x}]")
            for y in row:
                if not 0 <= y < diagram.n:
                    problems.append(f"ids: {name}[{x}] references unknown element {y}")
                elif y == x:
                    problems.append(f"acyclic: {x} covers itself")
    return problems


def _planarity_violations(diagram: Diagram) -> list[str]:
    problems: list[str] = []
    low, high = bottom(diagram), top(diagram)
    for side, label in ((0, "left"), (-1, "right")):
        if _upward_chain(diagram, low, side) != _downward_chain(diagram, high, side):
            problems.append(f"planar: the {label} boundary chain is not well defined")

    used: set[tuple[int, int]] = set()
    for x, row in enumerate(diagram.upper):
        for index in range(len(row) - 1):
            try:
                left_side, right_side = trace_cell(diagram, x, index)
            except PreconditionError as exc:
                problems.append(f"planar: {exc}")
                continue
            cell_top = left_side[-1]
            below = diagram.lower[cell_top]
            left_pos = below.index(left_side[-2])
            if left_pos + 1 >= len(below) or below[left_pos + 1] != right_side[-2]:
                problems.append(f"planar: cell from {x} does not close at {cell_top}")
                continue
            if (cell_top, left_pos) in used:
                problems.append(f"planar: two cells close at {cell_top} between the same covers")
            used.add((cell_top, left_pos))
    return problems


# ── Similarity ──────────────────────────────────────────────────────────


def canonical_ids(diagram: Diagram) -> list[int]:
    """Map old id -> canonical id (breadth-first from bottom, upper covers left to right)."""
    mapping = [-1] * diagram.n
    starts = [x for x in range(diagram.n) if not diagram.lower[x]] or [0]
    next_id = 0
    for start in starts + list(range(diagram.n)):
        if mapping[start] >= 0:
            continue
        mapping[start] = next_id
        next_id += 1
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in diagram.upper[x]:
                if mapping[y] < 0:
                    mapping[y] = next_id
                    next_id += 1
                    queue.append(y)
    return mapping


def relabel(diagram: Diagram, mapping: Sequence[int]) -> Diagram:
    upper: list[tuple[int, ...]] = [()] * diagram.n
    lower: list[tuple[int, ...]] = [()] * diagram.n
    for old in range(diagram.n):
        upper[mapping[old]] = tuple(mapping[y] for y in diagram.upper[old])
        lower[mapping[old]] = tuple(mapping[y] for y in diagram.lower[old])
    return Diagram(tuple(upper), tuple(lower))


def canonical_form(diagram: Diagram) -> Diagram:
    return relabel(diagram, canonical_ids(diagram))


def canonical_key(diagram: Diagram) -> CanonicalKey:
    form = canonical_form(diagram)
    upper = ";".join(",".join(str(y) for y in row) for row in form.upper)
    lower = ";".join(",".join(str(y) for y in row) for row in form.lower)
    return f"{form.n}|{upper}|{lower}".encode("ascii")


def key_hash(key: CanonicalKey) -> str:
    return hashlib.sha256(key).hexdigest()[:20]


def is_similar(first: Diagram, second: Diagram) -> bool:
    return first.n == second.n and canonical_key(first) == canonical_key(second)


def mirror(diagram: Diagram) -> Diagram:
    return Diagram(
        tuple(tuple(reversed(row)) for row in diagram.upper),
        tuple(tuple(reversed(row)) for row in diagram.lower),
    )


def is_similar_up_to_reflection(first: Diagram, second: Diagram) -> bool:
    return is_similar(first, second) or is_similar(first, mirror(second))
