"""Diagram transformations.

Every operation returns a new diagram. Retained elements keep their relative
order; resection and element removal compact ids, insertion appends fresh
ids after the existing ones. The ``*_traced`` variants also return the
``SurgeryRecord`` and the old-id -> new-id map.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from latres.diagram import (
    Diagram,
    boundary_chains,
    irreducibles,
    join,
    leq,
    meet,
    bottom,
    top,
)
from latres.errors import PreconditionError
from latres.geometry import C2, C3, DOWN, UP, check_gk_criterion
from latres.schemes import anchors, covering_n7_centers, scheme

logger = logging.getLogger(__name__)

SURGERY_OPS = ("resect", "insert", "remove_di", "remove_corner")

__all__ = [
    "SURGERY_OPS",
    "SurgeryRecord",
    "SurgeryResult",
    "corners",
    "insert",
    "insert_traced",
    "is_rectangular",
    "left_weak_corners",
    "remove_boundary_di",
    "remove_boundary_di_traced",
    "remove_corner",
    "remove_corner_traced",
    "replay",
    "resect",
    "resect_traced",
    "right_weak_corners",
    "weak_corners",
]

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SurgeryRecord:
    """One trace line: ``<op> <anchor> removed=[ids] added=<k>``, ids of the pre-diagram."""

    op: str
    anchor: int
    removed: frozenset[int] = frozenset()
    added: int = 0


@dataclass(frozen=True)
class SurgeryResult:
    diagram: Diagram
    record: SurgeryRecord
    id_map: Mapping[int, int] = field(default_factory=dict)


# ── Working copies ──────────────────────────────────────────────────────


def _thaw(diagram: Diagram) -> tuple[list[list[int]], list[list[int]]]:
    return [list(row) for row in diagram.upper], [list(row) for row in diagram.lower]


def _swap(row: list[int], old: int, new: int) -> None:
    row[row.index(old)] = new


def _freeze(
    upper: list[list[int]], lower: list[list[int]], removed: Iterable[int] = ()
) -> tuple[Diagram, dict[int, int]]:
    gone = set(removed)
    kept = [x for x in range(len(upper)) if x not in gone]
    id_map = {old: new for new, old in enumerate(kept)}
    new_upper = tuple(tuple(id_map[y] for y in upper[x] if y not in gone) for x in kept)
    new_lower = tuple(tuple(id_map[y] for y in lower[x] if y not in gone) for x in kept)
    return Diagram(new_upper, new_lower), id_map


# ── Corners and rectangularity ──────────────────────────────────────────


def _weak_corners_on(diagram: Diagram, chain: tuple[int, ...]) -> frozenset[int]:
    if diagram.n < 2:
        raise PreconditionError(f"weak_corners: {diagram.n} elements, at least 2 are required")
    doubly = irreducibles(diagram).doubly_irreducible
    order = diagram.order
    found = set()
    for x in chain:
        if x not in doubly:
            continue
        comparable = order[x] | order[:, x]
        if not comparable.all():
            found.add(x)
    return frozenset(found)


def left_weak_corners(diagram: Diagram) -> frozenset[int]:
    return _weak_corners_on(diagram, boundary_chains(diagram)[0])


def right_weak_corners(diagram: Diagram) -> frozenset[int]:
    return _weak_corners_on(diagram, boundary_chains(diagram)[1])


def weak_corners(diagram: Diagram) -> frozenset[int]:
    return left_weak_corners(diagram) | right_weak_corners(diagram)


def corners(diagram: Diagram) -> frozenset[int]:
    return frozenset(
        x
        for x in weak_corners(diagram)
        if len(diagram.upper[diagram.lower[x][0]]) == 2
        and len(diagram.lower[diagram.upper[x][0]]) == 2
    )


def is_rectangular(diagram: Diagram) -> bool:
    left, right = left_weak_corners(diagram), right_weak_corners(diagram)
    if len(left) != 1 or len(right) != 1:
        return False
    (x,), (y,) = left, right
    return meet(diagram, x, y) == bottom(diagram) and join(diagram, x, y) == top(diagram)


# ── Element removal ─────────────────────────────────────────────────────


def _delete_doubly_irreducible(diagram: Diagram, x: int) -> tuple[Diagram, dict[int, int]]:
    # y < x < z; y < z becomes a cover only when no other route joins them
    y, z = diagram.lower[x][0], diagram.upper[x][0]
    upper, lower = _thaw(diagram)
    detour = any(w != x and leq(diagram, w, z) for w in diagram.upper[y])
    if detour:
        upper[y].remove(x)
        lower[z].remove(x)
    else:
        _swap(upper[y], x, z)
        _swap(lower[z], x, y)
    return _freeze(upper, lower, (x,))


def remove_boundary_di_traced(diagram: Diagram, x: int) -> SurgeryResult:
    if not check_gk_criterion(diagram) or covering_n7_centers(diagram):
        raise PreconditionError("remove_boundary_di: the diagram is not slim distributive")
    if not 0 <= x < diagram.n:
        raise PreconditionError(f"remove_boundary_di: unknown element {x}")
    if x not in irreducibles(diagram).doubly_irreducible:
        raise PreconditionError(f"remove_boundary_di: {x} is not doubly irreducible")
    left, right = boundary_chains(diagram)
    if x not in left and x not in right:
        raise PreconditionError(f"remove_boundary_di: {x} is not on a boundary chain")
    result, id_map = _delete_doubly_irreducible(diagram, x)
    return SurgeryResult(result, SurgeryRecord("remove_di", x, frozenset((x,)), 0), id_map)


def remove_boundary_di(diagram: Diagram, x: int) -> Diagram:
    return remove_boundary_di_traced(diagram, x).diagram


def remove_corner_traced(diagram: Diagram, x: int) -> SurgeryResult:
    if not check_gk_criterion(diagram):
        raise PreconditionError("remove_corner: the diagram is not slim semimodular")
    if x not in corners(diagram):
        raise PreconditionError(f"remove_corner: {x} is not a corner")
    result, id_map = _delete_doubly_irreducible(diagram, x)
    return SurgeryResult(result, SurgeryRecord("remove_corner", x, frozenset((x,)), 0), id_map)


def remove_corner(diagram: Diagram, x: int) -> Diagram:
    return remove_corner_traced(diagram, x).diagram


# ── Resection and insertion ─────────────────────────────────────────────


def resect_traced(diagram: Diagram, u: int) -> SurgeryResult:
    if not check_gk_criterion(diagram):
        raise PreconditionError("resect: the diagram is not slim semimodular")
    if u not in anchors(diagram, C3):
        raise PreconditionError(f"resect: {u} is not a C3 anchor")
    built = scheme(diagram, u, C3)
    chains = built.links
    upper, lower = _thaw(diagram)
    for chain in chains:
        _swap(upper[chain.bottom], chain.middle, chain.top)
        _swap(lower[chain.top], chain.middle, chain.bottom)

    base_left = built.left_wing.links[-1]
    u_star, b_l = base_left.top, base_left.bottom
    upper[u] = [u_star]
    lower[u_star].insert(lower[u_star].index(b_l) + 1, u)

    removed = frozenset(chain.middle for chain in chains)
    result, id_map = _freeze(upper, lower, removed)
    logger.debug("surgery: resect at %d removed %d elements", u, len(removed))
    return SurgeryResult(result, SurgeryRecord("resect", u, removed, 0), id_map)


def resect(diagram: Diagram, u: int) -> Diagram:
    return resect_traced(diagram, u).diagram


def insert_traced(diagram: Diagram, u: int) -> SurgeryResult:
    if not check_gk_criterion(diagram):
        raise PreconditionError("insert: the diagram is not slim semimodular")
    if u not in anchors(diagram, C2):
        raise PreconditionError(f"insert: {u} is not a C2 anchor")
    built = scheme(diagram, u, C2)
    upper, lower = _thaw(diagram)

    middle_of = {}
    for link in built.links:
        new = len(upper)
        middle_of[link] = new
        upper.append([link.top])
        lower.append([link.bottom])
        _swap(upper[link.bottom], link.top, new)
        _swap(lower[link.top], link.bottom, new)

    for wing in (built.left_wing, built.right_wing):
        for index, step in enumerate(wing.steps):
            left_mid = middle_of[wing.links[index]]
            right_mid = middle_of[wing.links[index + 1]]
            if step == UP:
                upper[left_mid].append(right_mid)
                lower[right_mid].insert(0, left_mid)
            elif step == DOWN:
                upper[right_mid].insert(0, left_mid)
                lower[left_mid].append(right_mid)

    m_l = middle_of[built.left_wing.links[-1]]
    m_r = middle_of[built.right_wing.links[0]]
    u_star = diagram.upper[u][0]
    upper[u] = [m_l, m_r]
    lower[u_star].remove(u)
    lower[m_l].append(u)
    lower[m_r].insert(0, u)

    result, id_map = _freeze(upper, lower)
    added = len(middle_of)
    logger.debug("surgery: insert at %d added %d elements", u, added)
    return SurgeryResult(result, SurgeryRecord("insert", u, frozenset(), added), id_map)


def insert(diagram: Diagram, u: int) -> Diagram:
    return insert_traced(diagram, u).diagram


# ── Replay ──────────────────────────────────────────────────────────────

_TRACED: dict[str, Callable[[Diagram, int], SurgeryResult]] = {
    "resect": resect_traced,
    "insert": insert_traced,
    "remove_di": remove_boundary_di_traced,
    "remove_corner": remove_corner_traced,
}


def replay(diagram: Diagram, record: SurgeryRecord) -> SurgeryResult:
    operation = _TRACED.get(record.op)
    if operation is None:
        raise PreconditionError(f"replay: unknown surgery op {record.op!r}")
    result = operation(diagram, record.anchor)
    if result.record != record:
        raise PreconditionError(
            f"replay: {record.op} at {record.anchor} removed {sorted(result.record.removed)} "
            f"and added {result.record.added}, the record says {sorted(record.removed)} "
            f"and {record.added}"
        )
    return result
