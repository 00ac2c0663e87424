"""Brute-force order theory, independent of any embedding.

Nothing here looks at left/right cover order: predicates read the full order
relation, so they can be used to check the planar machinery in
``latres.geometry`` and ``latres.schemes``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Iterator, Sequence

import networkx as nx
import numpy as np

from latres.diagram import Diagram
from latres.errors import PreconditionError, ResourceLimitError
from latres.settings import active_config

logger = logging.getLogger(__name__)

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class Poset:
    """Finite partial order on ``range(n)``; ``leq[i, j]`` is true iff i <= j."""

    n: int
    leq: np.ndarray

    def __post_init__(self) -> None:
        table = np.array(self.leq, dtype=bool)
        if table.shape != (self.n, self.n):
            raise PreconditionError(f"poset: leq has shape {table.shape}, expected {(self.n, self.n)}")
        table.flags.writeable = False
        object.__setattr__(self, "leq", table)

    @classmethod
    def from_diagram(cls, diagram: Diagram) -> "Poset":
        return cls(diagram.n, diagram.order.copy())

    @classmethod
    def from_covers(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Poset":
        table = np.eye(n, dtype=bool)
        for low, high in pairs:
            table[low, high] = True
        for k in range(n):
            table |= table[:, k : k + 1] & table[k : k + 1, :]
        return cls(n, table)

    @cached_property
    def cover_matrix(self) -> np.ndarray:
        """``cover_matrix[i, j]`` iff j covers i."""
        strict = self.leq.copy()
        np.fill_diagonal(strict, False)
        between = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        return strict & ~between

    @cached_property
    def join_table(self) -> np.ndarray:
        return _bound_table(self.leq)

    @cached_property
    def meet_table(self) -> np.ndarray:
        return _bound_table(self.leq.T)


@dataclass(frozen=True)
class OracleVerdict:
    lattice: bool
    semimodular: bool
    slim: bool
    distributive: bool

    @property
    def slim_semimodular(self) -> bool:
        return self.lattice and self.semimodular and self.slim


def _bound_table(leq: np.ndarray) -> np.ndarray:
    # an element is the bound of (i, j) iff its up-set is exactly the common up-set
    n = leq.shape[0]
    by_upset = {leq[i].tobytes(): i for i in range(n)}
    table = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            found = by_upset.get((leq[i] & leq[j]).tobytes())
            if found is not None:
                table[i, j] = table[j, i] = found
    return table


# ── Predicates ──────────────────────────────────────────────────────────


def covers(poset: Poset) -> list[tuple[int, int]]:
    return [(int(i), int(j)) for i, j in np.argwhere(poset.cover_matrix)]


def is_lattice(poset: Poset) -> bool:
    if poset.n == 0:
        return False
    return bool((poset.join_table >= 0).all() and (poset.meet_table >= 0).all())


def is_semimodular(poset: Poset) -> bool:
    """a covers a /\\ b implies a \\/ b covers b."""
    if not is_lattice(poset):
        return False
    cover = poset.cover_matrix
    meets, joins = poset.meet_table, poset.join_table
    for a in range(poset.n):
        for b in range(poset.n):
            if cover[meets[a, b], a] and not cover[b, joins[a, b]]:
                return False
    return True


def join_irreducibles(poset: Poset) -> list[int]:
    return [x for x in range(poset.n) if int(poset.cover_matrix[:, x].sum()) == 1]


def is_slim(poset: Poset) -> bool:
    if not is_lattice(poset):
        return False
    leq = poset.leq
    for x, y, z in combinations(join_irreducibles(poset), 3):
        if not (leq[x, y] or leq[y, x] or leq[x, z] or leq[z, x] or leq[y, z] or leq[z, y]):
            return False
    return True


def is_distributive(poset: Poset) -> bool:
    if not is_lattice(poset):
        return False
    meets, joins = poset.meet_table, poset.join_table
    index = np.arange(poset.n)
    lhs = meets[index[:, None, None], joins[None, :, :]]
    rhs = joins[meets[:, :, None], meets[:, None, :]]
    return bool((lhs == rhs).all())


def check_poset(poset: Poset) -> OracleVerdict:
    return OracleVerdict(
        lattice=is_lattice(poset),
        semimodular=is_semimodular(poset),
        slim=is_slim(poset),
        distributive=is_distributive(poset),
    )


def check_diagram(diagram: Diagram) -> OracleVerdict:
    return check_poset(Poset.from_diagram(diagram))


# ── Embedding ───────────────────────────────────────────────────────────


def ji_chain_split(poset: Poset) -> tuple[list[int], list[int]]:
    """Split Ji(P) into a left and a right chain.

    Two-colours the incomparability graph of the join-irreducibles; in each
    component the smallest element is coloured left, which makes the colouring
    the lexicographically least one.
    """
    irreducible = join_irreducibles(poset)
    leq = poset.leq
    graph = nx.Graph()
    graph.add_nodes_from(irreducible)
    graph.add_edges_from(
        (x, y) for x, y in combinations(irreducible, 2) if not (leq[x, y] or leq[y, x])
    )
    if not nx.is_bipartite(graph):
        raise PreconditionError("ji_chain_split: Ji contains a three-element antichain")

    colour: dict[int, int] = {}
    for component in nx.connected_components(graph):
        sub = graph.subgraph(component)
        colouring = nx.bipartite.color(sub)
        first = min(component)
        flip = colouring[first]
        for node, value in colouring.items():
            colour[node] = value ^ flip

    height = poset.leq.sum(axis=0)
    left = sorted((x for x in irreducible if colour[x] == 0), key=lambda x: height[x])
    right = sorted((x for x in irreducible if colour[x] == 1), key=lambda x: height[x])
    return left, right


def embed_slim_lattice(poset: Poset) -> Diagram:
    """A planar diagram of a slim lattice, one Ji chain on each side."""
    if not is_lattice(poset):
        raise PreconditionError("embed_slim_lattice: the poset is not a lattice")
    if not is_slim(poset):
        raise PreconditionError("embed_slim_lattice: the lattice is not slim")
    left, right = ji_chain_split(poset)
    leq = poset.leq
    left_rank = leq[left].sum(axis=0) if left else np.zeros(poset.n, dtype=np.int64)
    right_rank = leq[right].sum(axis=0) if right else np.zeros(poset.n, dtype=np.int64)
    position = [int(right_rank[x]) - int(left_rank[x]) for x in range(poset.n)]

    cover = poset.cover_matrix
    upper = tuple(
        tuple(sorted(np.flatnonzero(cover[x]).tolist(), key=lambda y: (position[y], y)))
        for x in range(poset.n)
    )
    lower = tuple(
        tuple(sorted(np.flatnonzero(cover[:, x]).tolist(), key=lambda y: (position[y], y)))
        for x in range(poset.n)
    )
    return Diagram(upper, lower)


# ── Enumeration ─────────────────────────────────────────────────────────


def _guard(max_n: int, limit: int | None) -> None:
    bound = active_config().limits.oracle_max_elements if limit is None else limit
    if max_n > bound:
        raise ResourceLimitError("oracle_max_elements", max_n, bound)


def _next_levels(previous: Sequence[int], budget: int) -> Iterator[list[tuple[int, ...]]]:
    """Lower-cover lists of every admissible level directly above ``previous``.

    Covers of one element differ pairwise, at most two new elements are
    join-irreducible, and every element below gets one or two upper covers.
    """
    candidates = [
        subset for size in range(1, len(previous) + 1) for subset in combinations(previous, size)
    ]
    for width in range(1, min(budget, 2 * len(previous)) + 1):
        for picks in combinations_with_replacement(range(len(candidates)), width):
            chosen = [candidates[p] for p in picks]
            shared = [c for c in chosen if len(c) > 1]
            if len(set(shared)) != len(shared):
                continue
            if len(chosen) - len(shared) > 2:
                continue
            degree = dict.fromkeys(previous, 0)
            for subset in chosen:
                for x in subset:
                    degree[x] += 1
            if all(1 <= d <= 2 for d in degree.values()):
                yield chosen


def _covers_close(
    below: Sequence[int],
    upper_of: dict[int, list[int]],
    level: Sequence[tuple[int, ...]],
    new_ids: Sequence[int],
) -> bool:
    # two covers of one element need a common cover in the new level
    above: dict[int, set[int]] = {}
    for new, downs in zip(new_ids, level):
        for y in downs:
            above.setdefault(y, set()).add(new)
    for x in below:
        for y, z in combinations(upper_of.get(x, ()), 2):
            if not above.get(y, set()) & above.get(z, set()):
                return False
    return True


def _graded_cover_relations(max_n: int) -> Iterator[tuple[int, list[tuple[int, int]]]]:
    def grow(
        levels: list[list[int]], pairs: list[tuple[int, int]], upper_of: dict[int, list[int]]
    ) -> Iterator[tuple[int, list[tuple[int, int]]]]:
        n = levels[-1][-1] + 1
        if len(levels[-1]) == 1:
            yield n, pairs
        below = levels[-2] if len(levels) > 1 else []
        for level in _next_levels(levels[-1], max_n - n):
            new_ids = list(range(n, n + len(level)))
            if not _covers_close(below, upper_of, level, new_ids):
                continue
            grown_upper = {x: list(ys) for x, ys in upper_of.items()}
            grown_pairs = list(pairs)
            for new, downs in zip(new_ids, level):
                for x in downs:
                    grown_upper.setdefault(x, []).append(new)
                    grown_pairs.append((x, new))
            yield from grow(levels + [new_ids], grown_pairs, grown_upper)

    yield from grow([[0]], [], {})


def enumerate_slim_semimodular_lattices(max_n: int, *, limit: int | None = None) -> list[Poset]:
    """One poset per isomorphism class of slim semimodular lattices with at most ``max_n`` elements.

    Semimodular lattices are graded, so candidates are built level by level
    from lower-cover sets; isomorphic duplicates are dropped with a
    Weisfeiler-Lehman bucket followed by an exact isomorphism test.
    """
    _guard(max_n, limit)
    if max_n < 1:
        return []
    buckets: dict[str, list[nx.DiGraph]] = {}
    found: list[tuple[int, str, int, Poset]] = []
    for n, pairs in _graded_cover_relations(max_n):
        poset = Poset.from_covers(n, pairs)
        if not check_poset(poset).slim_semimodular:
            continue
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(pairs)
        digest = nx.weisfeiler_lehman_graph_hash(graph)
        bucket = buckets.setdefault(digest, [])
        if any(nx.is_isomorphic(graph, other) for other in bucket):
            continue
        bucket.append(graph)
        found.append((n, digest, len(found), poset))
    logger.info("oracle: %d slim semimodular lattices with at most %d elements", len(found), max_n)
    return [poset for *_, poset in sorted(found, key=lambda item: item[:3])]


def count_lattices(max_n: int, *, limit: int | None = None) -> dict[int, int]:
    counts: dict[int, int] = {}
    for poset in enumerate_slim_semimodular_lattices(max_n, limit=limit):
        counts[poset.n] = counts.get(poset.n, 0) + 1
    return counts
