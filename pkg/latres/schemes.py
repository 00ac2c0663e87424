"""Tight N7s, stacked N7 regions, ranks and C2/C3 schemes.

An anchor is the middle element of a scheme's base: a cover-preserving N7 for
C2-schemes, a cover-preserving C3 x C3 for C3-schemes. Each scheme carries the
left wing of its base's upper-left link and the right wing of its upper-right
link; resection and insertion in ``latres.surgery`` act on exactly these links.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from latres.diagram import Diagram, boundary_chains, interior, meet
from latres.errors import PreconditionError
from latres.gallery import grid, stacked_n7, stacked_n7_tower
from latres.geometry import (
    C2,
    C3,
    DOWN,
    LEFT,
    RIGHT,
    UP,
    C3Chain,
    Cell,
    PrimeInterval,
    Trajectory,
    c2_neighbors,
    cells,
    check_gk_criterion,
    lies_on_boundary,
    wing_trajectory,
)

logger = logging.getLogger(__name__)

SCHEME_KINDS = (C2, C3)

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TightN7:
    u: int
    u_star: int
    a_l: int
    b_l: int
    a_r: int
    b_r: int
    bottom: int
    cover_preserving: bool

    @property
    def elements(self) -> frozenset[int]:
        return frozenset(
            (self.u, self.u_star, self.a_l, self.b_l, self.a_r, self.b_r, self.bottom)
        )


@dataclass(frozen=True)
class StackedN7Region:
    m: int
    elements: frozenset[int]
    interior_tower: tuple[int, ...]


@dataclass(frozen=True)
class Scheme:
    kind: str
    anchor: int
    base: frozenset[int]
    left_wing: Trajectory
    right_wing: Trajectory
    upper_boundary: frozenset[int]
    lower_boundary: frozenset[int]
    interior: frozenset[int]

    @property
    def elements(self) -> frozenset[int]:
        return self.base | self.left_wing.elements | self.right_wing.elements

    @property
    def links(self) -> tuple:
        """Every wing link, left wing first; the base links appear once each."""
        return self.left_wing.links + self.right_wing.links


@dataclass(frozen=True)
class _C3Base:
    o: int
    a_l: int
    a_r: int
    b_l: int
    u: int
    b_r: int
    m_l: int
    m_r: int
    u_star: int

    def in_grid_order(self) -> list[int]:
        # ids of grid(3, 3): (i, j) -> 3i + j, i up-left, j up-right
        return [
            self.o, self.a_r, self.b_r,
            self.a_l, self.u, self.m_r,
            self.b_l, self.m_l, self.u_star,
        ]


# ── Helpers ─────────────────────────────────────────────────────────────


def _require_gk(diagram: Diagram, operation: str) -> None:
    if not check_gk_criterion(diagram):
        raise PreconditionError(
            f"{operation}: the diagram is not slim semimodular (cell criterion fails)"
        )


def is_cover_preserving_sublattice(
    diagram: Diagram, pattern: Diagram, embedding: Sequence[int] | Mapping[int, int]
) -> bool:
    """True when ``embedding`` maps pattern covers to covers and commutes with meet and join."""
    images = [embedding[p] for p in range(pattern.n)]
    if len(set(images)) != pattern.n:
        return False
    for p, q in pattern.covers():
        if images[q] not in diagram.upper[images[p]]:
            return False
    meets, joins = diagram.meet_table, diagram.join_table
    pattern_meets, pattern_joins = pattern.meet_table, pattern.join_table
    for p in range(pattern.n):
        for q in range(p + 1, pattern.n):
            if meets[images[p], images[q]] != images[pattern_meets[p, q]]:
                return False
            if joins[images[p], images[q]] != images[pattern_joins[p, q]]:
                return False
    return True


# ── Tight N7 ────────────────────────────────────────────────────────────


def tight_n7(diagram: Diagram, u: int) -> TightN7:
    _require_gk(diagram, "tight_n7")
    if u not in interior(diagram):
        raise PreconditionError(f"tight_n7: {u} lies on the boundary")
    if len(diagram.upper[u]) != 1:
        raise PreconditionError(f"tight_n7: {u} is not meet-irreducible")
    return _tight_n7(diagram, u)


def _tight_n7(diagram: Diagram, u: int) -> TightN7:
    u_star = diagram.upper[u][0]
    edge = PrimeInterval(u, u_star)
    neighbors = c2_neighbors(diagram)
    left = neighbors.left.get(edge)
    right = neighbors.right.get(edge)
    if left is None or right is None or left[1] != UP or right[1] != DOWN:
        raise PreconditionError(f"tight_n7: no tight N7 is centred at {u}")
    (left_edge, _), (right_edge, _) = left, right
    a_l, b_l = left_edge.bottom, left_edge.top
    a_r, b_r = right_edge.bottom, right_edge.top
    low = meet(diagram, a_l, a_r)
    covering = a_l in diagram.upper[low] and a_r in diagram.upper[low]
    return TightN7(u, u_star, a_l, b_l, a_r, b_r, low, covering)


@lru_cache(maxsize=4096)
def _covering_n7_centers(diagram: Diagram) -> frozenset[int]:
    centers = set()
    for u in sorted(interior(diagram)):
        if len(diagram.upper[u]) != 1:
            continue
        try:
            n7 = _tight_n7(diagram, u)
        except PreconditionError:
            logger.debug("schemes: interior meet-irreducible %d has no tight N7", u)
            continue
        if n7.cover_preserving:
            centers.add(u)
    return frozenset(centers)


def covering_n7_centers(diagram: Diagram) -> frozenset[int]:
    _require_gk(diagram, "covering_n7_centers")
    return _covering_n7_centers(diagram)


# ── Towers and stacked regions ──────────────────────────────────────────


def tower_walk(diagram: Diagram, x: int) -> list[int]:
    """x(0) = x, x(i+1) = x(i)* while x(i)* is meet-irreducible, interior and covers three elements."""
    inside = interior(diagram)
    if x not in inside or len(diagram.upper[x]) != 1:
        raise PreconditionError(f"tower_walk: {x} is not an interior meet-irreducible element")
    tower = [x]
    current = x
    while len(diagram.upper[current]) == 1:
        nxt = diagram.upper[current][0]
        if nxt not in inside or len(diagram.upper[nxt]) != 1 or len(diagram.lower[nxt]) != 3:
            break
        tower.append(nxt)
        current = nxt
        if len(tower) > diagram.n:
            raise PreconditionError("tower_walk: the cover relation has a cycle")
    return tower


def _require_center(diagram: Diagram, x: int, operation: str) -> None:
    if x not in covering_n7_centers(diagram):
        raise PreconditionError(f"{operation}: {x} is not the centre of a cover-preserving N7")


def stacked_tower(diagram: Diagram, u: int) -> list[StackedN7Region]:
    _require_center(diagram, u, "stacked_tower")
    tower = tower_walk(diagram, u)
    elements = set(_tight_n7(diagram, u).elements)
    regions = [StackedN7Region(0, frozenset(elements), (u,))]
    for i in range(1, len(tower)):
        x = tower[i]
        above = diagram.upper[x][0]
        below = diagram.lower[above]
        position = below.index(x)
        if position == 0 or position + 1 >= len(below):
            break
        elements.update((above, below[position - 1], below[position + 1]))
        regions.append(StackedN7Region(i, frozenset(elements), tuple(tower[: i + 1])))
    return regions


def rank(diagram: Diagram, x: int) -> int:
    _require_center(diagram, x, "rank")
    return len(tower_walk(diagram, x)) - 1


def _cover_graph(diagram: Diagram, pinned: int) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from((x, {"pinned": x == pinned}) for x in range(diagram.n))
    graph.add_edges_from(diagram.covers())
    return graph


def _embeds_stacked(diagram: Diagram, x: int, k: int) -> bool:
    pattern = stacked_n7(k)
    pattern_middle = stacked_n7_tower(k)[0]
    matcher = DiGraphMatcher(
        _cover_graph(diagram, x),
        _cover_graph(pattern, pattern_middle),
        node_match=lambda host, motif: host["pinned"] == motif["pinned"],
    )
    for mapping in matcher.subgraph_monomorphisms_iter():
        embedding = {motif: host for host, motif in mapping.items()}
        if is_cover_preserving_sublattice(diagram, pattern, embedding):
            return True
    return False


def rank_by_regions(diagram: Diagram, x: int) -> int:
    """Largest k such that x is the middle atom of a k-stacked N7 sublattice, by search."""
    _require_center(diagram, x, "rank_by_regions")
    if not _embeds_stacked(diagram, x, 0):
        raise PreconditionError(f"rank_by_regions: no N7 region has {x} as its middle atom")
    k = 0
    while 7 + 3 * (k + 1) <= diagram.n and _embeds_stacked(diagram, x, k + 1):
        k += 1
    return k


def stacked_regions(diagram: Diagram) -> list[StackedN7Region]:
    """The maximal stacked region of every cover-preserving N7 centre."""
    return [stacked_tower(diagram, u)[-1] for u in sorted(covering_n7_centers(diagram))]


def locate_in_stack(diagram: Diagram, t: int) -> tuple[StackedN7Region, int] | None:
    _require_gk(diagram, "locate_in_stack")
    current = t
    steps = 0
    while len(diagram.lower[current]) == 3:
        current = diagram.lower[current][1]
        steps += 1
        if steps > diagram.n:
            return None
    if len(diagram.lower[current]) != 2 or current not in _covering_n7_centers(diagram):
        return None
    tower = tower_walk(diagram, current)
    if t not in tower:
        return None
    return stacked_tower(diagram, current)[-1], tower.index(t)


# ── Schemes ─────────────────────────────────────────────────────────────


def _c3_base(diagram: Diagram, u: int) -> _C3Base | None:
    ups = diagram.upper[u]
    if len(ups) != 2:
        return None
    m_l, m_r = ups
    downs = diagram.lower[u]
    pattern = grid(3, 3)
    for index in range(len(downs) - 1):
        a_l, a_r = downs[index], downs[index + 1]
        left_covers, right_covers = diagram.upper[a_l], diagram.upper[a_r]
        left_pos, right_pos = left_covers.index(u), right_covers.index(u)
        if left_pos == 0 or right_pos + 1 >= len(right_covers):
            continue
        b_l, b_r = left_covers[left_pos - 1], right_covers[right_pos + 1]
        if m_l not in diagram.upper[b_l] or m_r not in diagram.upper[b_r]:
            continue
        tops = set(diagram.upper[m_l]) & set(diagram.upper[m_r])
        lows = set(diagram.lower[a_l]) & set(diagram.lower[a_r])
        if len(tops) != 1 or len(lows) != 1:
            continue
        base = _C3Base(lows.pop(), a_l, a_r, b_l, u, b_r, m_l, m_r, tops.pop())
        if is_cover_preserving_sublattice(diagram, pattern, base.in_grid_order()):
            return base
    return None


def _c3_scheme(diagram: Diagram, u: int) -> Scheme | None:
    base = _c3_base(diagram, u)
    if base is None:
        return None
    upper_left = C3Chain(base.b_l, base.m_l, base.u_star)
    upper_right = C3Chain(base.b_r, base.m_r, base.u_star)
    left = wing_trajectory(diagram, upper_left, LEFT)
    right = wing_trajectory(diagram, upper_right, RIGHT)
    if not lies_on_boundary(diagram, left.links[0], LEFT):
        logger.debug("schemes: left C3 wing of %d stops inside the diagram", u)
        return None
    if not lies_on_boundary(diagram, right.links[-1], RIGHT):
        logger.debug("schemes: right C3 wing of %d stops inside the diagram", u)
        return None

    left_middles = {chain.middle for chain in left.links}
    right_middles = {chain.middle for chain in right.links}
    if left_middles & right.elements or right_middles & left.elements:
        logger.warning("schemes: rejecting C3 anchor %d, its wings overlap", u)
        return None

    chains = left.links + right.links
    return Scheme(
        kind=C3,
        anchor=u,
        base=frozenset(base.in_grid_order()),
        left_wing=left,
        right_wing=right,
        upper_boundary=frozenset(chain.top for chain in chains),
        lower_boundary=frozenset(chain.bottom for chain in chains)
        | {base.o, base.a_l, base.a_r},
        interior=frozenset({u}) | left_middles | right_middles,
    )


def _c2_scheme(diagram: Diagram, u: int) -> Scheme | None:
    n7 = _tight_n7(diagram, u)
    left = wing_trajectory(diagram, PrimeInterval(n7.b_l, n7.u_star), LEFT)
    right = wing_trajectory(diagram, PrimeInterval(n7.b_r, n7.u_star), RIGHT)
    if set(left.links) & set(right.links):
        logger.warning("schemes: rejecting C2 anchor %d, its wings share a prime interval", u)
        return None

    tower = frozenset(tower_walk(diagram, u))
    links = left.links + right.links
    return Scheme(
        kind=C2,
        anchor=u,
        base=n7.elements,
        left_wing=left,
        right_wing=right,
        upper_boundary=frozenset(link.top for link in links) - tower,
        lower_boundary=(
            frozenset(link.bottom for link in links) | {n7.bottom, n7.a_l, n7.a_r}
        )
        - tower,
        interior=tower,
    )


@lru_cache(maxsize=4096)
def _schemes(diagram: Diagram, kind: str) -> Mapping[int, Scheme]:
    found: dict[int, Scheme] = {}
    if kind == C2:
        candidates = sorted(_covering_n7_centers(diagram))
        build = _c2_scheme
    else:
        candidates = [x for x in sorted(interior(diagram)) if len(diagram.upper[x]) == 2]
        build = _c3_scheme
    for u in candidates:
        built = build(diagram, u)
        if built is not None:
            found[u] = built
    return found


def _check_kind(kind: str) -> str:
    if kind not in SCHEME_KINDS:
        raise PreconditionError(f"scheme kind must be one of {SCHEME_KINDS}, got {kind!r}")
    return kind


def anchors(diagram: Diagram, kind: str) -> frozenset[int]:
    _check_kind(kind)
    _require_gk(diagram, "anchors")
    return frozenset(_schemes(diagram, kind))


def scheme(diagram: Diagram, u: int, kind: str) -> Scheme:
    _check_kind(kind)
    _require_gk(diagram, "scheme")
    found = _schemes(diagram, kind).get(u)
    if found is None:
        raise PreconditionError(f"scheme: {u} is not a {kind} anchor")
    return found


def scheme_cells(diagram: Diagram, built: Scheme) -> list[Cell]:
    """Cells of the base plus the cells between consecutive links of each wing."""
    groups = [built.base]
    for wing in (built.left_wing, built.right_wing):
        for first, second in zip(wing.links, wing.links[1:]):
            groups.append(frozenset(first.elements) | frozenset(second.elements))
    return [cell for cell in cells(diagram) if any(cell.vertices <= group for group in groups)]


def enclosed_elements(diagram: Diagram, built: Scheme) -> frozenset[int]:
    """Elements off the diagram's boundary whose every incident cell belongs to the scheme."""
    left, right = boundary_chains(diagram)
    on_boundary = set(left) | set(right)
    inside = set(scheme_cells(diagram, built))
    enclosed = set()
    for x in range(diagram.n):
        if x in on_boundary:
            continue
        incident = [cell for cell in cells(diagram) if x in cell.vertices]
        if incident and all(cell in inside for cell in incident):
            enclosed.add(x)
    return frozenset(enclosed)
