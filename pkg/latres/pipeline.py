"""Normalization by insertions and the checks built on it."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from latres.census import census, tower_diagrams
from latres.diagram import (
    CanonicalKey,
    Diagram,
    boundary_chains,
    bottom,
    canonical_ids,
    canonical_key,
    is_similar,
    irreducibles,
    key_hash,
    top,
    validate_well_formed,
)
from latres.errors import LatresError, NonTerminationError, PreconditionError, ResourceLimitError
from latres.gallery import grid, stacked_n7
from latres.geometry import C2, C3, check_gk_criterion, covering_squares, four_cells
from latres.oracle import (
    Poset,
    check_diagram,
    embed_slim_lattice,
    enumerate_slim_semimodular_lattices,
    is_distributive,
)
from latres.schemes import anchors, covering_n7_centers, rank, rank_by_regions
from latres.settings import LatresConfig, active_config
from latres.surgery import (
    SurgeryRecord,
    insert,
    insert_traced,
    is_rectangular,
    left_weak_corners,
    resect,
    right_weak_corners,
    weak_corners,
)

logger = logging.getLogger(__name__)

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class NormalizationStep:
    key: CanonicalKey
    anchor: int
    rank: int
    record: SurgeryRecord


@dataclass(frozen=True)
class NormalizationTrace:
    """Insertions from ``initial`` to ``final``.

    Insertion keeps every existing id and appends new ones, so each step's
    anchor is also a valid id in ``initial`` and in every later diagram.
    """

    initial: Diagram
    steps: tuple[NormalizationStep, ...]
    final: Diagram

    @property
    def records(self) -> tuple[SurgeryRecord, ...]:
        return tuple(step.record for step in self.steps)


@dataclass(frozen=True)
class InsertionReport:
    anchor: int
    rank: int
    anchors_before: frozenset[int]
    anchors_after: frozenset[int]
    allowed: frozenset[int]
    successor_rank: int | None = None
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def inclusion_is_equality(self) -> bool:
        return self.anchors_after == self.allowed


@dataclass(frozen=True)
class InsertionStatistics:
    pairs: int
    equal: int
    strict: int
    violations: int


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, passed: bool, detail: str) -> None:
        self.checked += 1
        if not passed:
            self.failures.append(detail)


@dataclass(frozen=True)
class TheoremReport:
    max_size: int
    corpus_size: int
    checks: tuple[CheckResult, ...]
    statistics: InsertionStatistics

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)


@dataclass(frozen=True)
class NondiminishingWitness:
    """Insertions from ``start``; ``counts`` has one entry per diagram on the way.

    ``ranks[i]`` is the rank of the chosen anchor and ``lowest[i]`` the
    minimal rank among the anchors available at that step.
    """

    start: Diagram
    anchors: tuple[int, ...]
    ranks: tuple[int, ...]
    lowest: tuple[int, ...]
    counts: tuple[int, ...]
    records: tuple[SurgeryRecord, ...]

    @property
    def steps(self) -> int:
        return len(self.anchors)

    @property
    def follows_minimal_rank(self) -> bool:
        return self.ranks == self.lowest


# ── Normalization ───────────────────────────────────────────────────────


def _pick_anchor(diagram: Diagram, candidates: Iterable[int]) -> tuple[int, int]:
    ranked = {u: rank(diagram, u) for u in candidates}
    lowest = min(ranked.values())
    order = canonical_ids(diagram)
    chosen = min((u for u, r in ranked.items() if r == lowest), key=lambda u: order[u])
    return chosen, lowest


def normalize(diagram: Diagram, *, config: LatresConfig | None = None) -> NormalizationTrace:
    """Insert at an anchor of minimal rank until no C2 anchor is left."""
    if not check_gk_criterion(diagram):
        raise PreconditionError("normalize: the diagram is not slim semimodular")
    config = config or active_config()
    breaker = config.normalize.circuit_breaker_factor * diagram.n * diagram.n
    current = diagram
    steps: list[NormalizationStep] = []
    while True:
        candidates = anchors(current, C2)
        if not candidates:
            break
        if len(steps) >= breaker:
            raise NonTerminationError(
                len(steps), NormalizationTrace(diagram, tuple(steps), current)
            )
        u, lowest = _pick_anchor(current, candidates)
        result = insert_traced(current, u)
        steps.append(NormalizationStep(canonical_key(current), u, lowest, result.record))
        logger.debug("pipeline: insertion %d at %d (rank %d)", len(steps), u, lowest)
        current = result.diagram
    logger.info("pipeline: normalized %d elements to %d in %d insertions", diagram.n, current.n, len(steps))
    return NormalizationTrace(diagram, tuple(steps), current)


def replay_trace_backwards(trace: NormalizationTrace) -> Diagram:
    current = trace.final
    for step in reversed(trace.steps):
        current = resect(current, step.anchor)
    return current


def is_slim_semimodular_via_sequence(
    diagram: Diagram, *, config: LatresConfig | None = None
) -> bool:
    """Run the insertion sequence, re-checking every precondition on the way."""
    if not validate_well_formed(diagram).ok:
        return False
    config = config or active_config()
    breaker = config.normalize.circuit_breaker_factor * diagram.n * diagram.n
    current = diagram
    try:
        for _ in range(breaker + 1):
            if not check_gk_criterion(current):
                return False
            candidates = anchors(current, C2)
            if not candidates:
                return is_distributive(Poset.from_diagram(current))
            u, _ = _pick_anchor(current, candidates)
            current = insert(current, u)
    except LatresError as exc:
        logger.debug("pipeline: insertion sequence stopped: %s", exc)
        return False
    logger.warning("pipeline: insertion sequence did not stop after %d steps", breaker)
    return False


decide = is_slim_semimodular_via_sequence


# ── Insertion effect ────────────────────────────────────────────────────


def verify_insertion_effect(diagram: Diagram, u: int) -> InsertionReport:
    """Compare the C2 anchors before and after an insertion at ``u``."""
    before = anchors(diagram, C2)
    if u not in before:
        raise PreconditionError(f"verify_insertion_effect: {u} is not a C2 anchor")
    level = rank(diagram, u)
    u_star = diagram.upper[u][0]
    after_diagram = insert(diagram, u)
    after = anchors(after_diagram, C2)

    allowed = before - {u}
    if level > 0:
        allowed = allowed | {u_star}
    violations: list[str] = []
    stray = after - allowed
    if stray:
        violations.append(f"anchors: {sorted(stray)} became anchors after inserting at {u}")

    successor_rank = None
    if level > 0:
        if u_star in after:
            successor_rank = rank(after_diagram, u_star)
            if successor_rank != level - 1:
                violations.append(
                    f"rank: {u_star} has rank {successor_rank}, expected {level - 1}"
                )
        else:
            violations.append(f"rank: {u_star} is not an anchor after inserting at {u}")
    return InsertionReport(u, level, before, after, allowed, successor_rank, tuple(violations))


def insertion_statistics(reports: Iterable[InsertionReport]) -> InsertionStatistics:
    pairs = equal = violations = 0
    for report in reports:
        pairs += 1
        equal += report.inclusion_is_equality
        violations += not report.ok
    return InsertionStatistics(pairs, equal, pairs - equal, violations)


# ── Theorem sweep ───────────────────────────────────────────────────────


def _grid_of(diagram: Diagram) -> Diagram:
    left, right = boundary_chains(diagram)
    (x,), (y,) = left_weak_corners(diagram), right_weak_corners(diagram)
    return grid(left.index(x) + 1, right.index(y) + 1)


def corrupted_variants(diagrams: Sequence[Diagram], count: int, *, seed: int = 0) -> list[Diagram]:
    """Diagrams with one cover deleted or one cover added, both lists kept consistent."""
    rng = np.random.default_rng(seed)
    variants: list[Diagram] = []
    candidates = [d for d in diagrams if d.n >= 3]
    if not candidates:
        return variants
    for index in range(count):
        source = candidates[int(rng.integers(len(candidates)))]
        upper = [list(row) for row in source.upper]
        lower = [list(row) for row in source.lower]
        edges = list(source.covers())
        if index % 2 == 0:
            x, y = edges[int(rng.integers(len(edges)))]
            upper[x].remove(y)
            lower[y].remove(x)
        else:
            pairs = [
                (x, y)
                for x in range(source.n)
                for y in range(source.n)
                if x != y and y not in upper[x] and not source.order[y, x]
            ]
            if not pairs:
                continue
            x, y = pairs[int(rng.integers(len(pairs)))]
            upper[x].append(y)
            lower[y].insert(0, x)
        variants.append(Diagram(tuple(map(tuple, upper)), tuple(map(tuple, lower))))
    return variants


def _sweep_diagram(diagram: Diagram, checks: dict[str, CheckResult], reports: list[InsertionReport]) -> None:
    label = key_hash(canonical_key(diagram))
    verdict = check_diagram(diagram)
    gk = check_gk_criterion(diagram)
    checks["soundness"].record(gk, f"{label}: fails the cell criterion")
    checks["cell criterion"].record(
        gk == verdict.slim_semimodular, f"{label}: cell criterion {gk}, oracle {verdict.slim_semimodular}"
    )
    if not gk:
        return
    centers = covering_n7_centers(diagram)
    checks["distributivity"].record(
        (not centers) == verdict.distributive,
        f"{label}: N7 centres {sorted(centers)}, oracle distributive {verdict.distributive}",
    )
    cells = sorted(tuple(sorted(cell.vertices)) for cell in four_cells(diagram))
    squares = sorted(tuple(sorted(square)) for square in covering_squares(diagram))
    checks["four cells"].record(cells == squares, f"{label}: 4-cells differ from covering squares")

    left, right = boundary_chains(diagram)
    facts = all(len(row) <= 2 for row in diagram.upper) and irreducibles(diagram).ji <= (
        set(left) | set(right)
    )
    checks["boundary facts"].record(facts, f"{label}: an element has 3 covers or Ji leaves the boundary")

    for u in sorted(anchors(diagram, C3)):
        back = insert(resect(diagram, u), u)
        checks["round trips"].record(is_similar(back, diagram), f"{label}: resect then insert at {u}")
    for u in sorted(anchors(diagram, C2)):
        back = resect(insert(diagram, u), u)
        checks["round trips"].record(is_similar(back, diagram), f"{label}: insert then resect at {u}")
        report = verify_insertion_effect(diagram, u)
        reports.append(report)
        checks["insertion effect"].record(report.ok, f"{label}: {'; '.join(report.violations)}")
        checks["rank"].record(
            rank(diagram, u) == rank_by_regions(diagram, u), f"{label}: rank mismatch at {u}"
        )

    try:
        trace = normalize(diagram)
    except NonTerminationError as exc:
        checks["normalize"].record(False, f"{label}: {exc}")
        return
    final = trace.final
    checks["normalize"].record(
        check_diagram(final).distributive and not covering_n7_centers(final),
        f"{label}: normalized diagram is not distributive",
    )
    if is_rectangular(diagram):
        same_frame = (
            weak_corners(final) == weak_corners(diagram)
            and bottom(final) == bottom(diagram)
            and top(final) == top(diagram)
        )
        checks["rectangular"].record(
            same_frame and is_rectangular(final) and is_similar(final, _grid_of(final)),
            f"{label}: rectangular diagram does not normalize to a grid with the same corners",
        )


CHECK_NAMES = (
    "soundness",
    "cell criterion",
    "distributivity",
    "four cells",
    "boundary facts",
    "round trips",
    "insertion effect",
    "rank",
    "normalize",
    "rectangular",
    "decide",
    "completeness",
)


def check_theorem(
    max_size: int,
    *,
    lattice_max: int = 8,
    corruptions: int = 100,
    config: LatresConfig | None = None,
    progress: Callable[[str], None] | None = None,
) -> TheoremReport:
    """Run every structural check over the census and the small-lattice enumeration."""
    config = config or active_config()
    checks = {name: CheckResult(name) for name in CHECK_NAMES}
    reports: list[InsertionReport] = []

    corpus = census(max_size, config=config).diagrams()
    if progress:
        progress(f"census: {len(corpus)} diagrams")
    for diagram in corpus:
        _sweep_diagram(diagram, checks, reports)

    for diagram in list(corpus) + corrupted_variants(corpus, corruptions):
        expected = check_gk_criterion(diagram)
        checks["decide"].record(
            is_slim_semimodular_via_sequence(diagram, config=config) == expected,
            f"{key_hash(canonical_key(diagram))}: decide disagrees with the cell criterion",
        )

    bound = min(lattice_max, config.limits.oracle_max_elements)
    lattices = enumerate_slim_semimodular_lattices(bound, limit=config.limits.oracle_max_elements)
    if progress:
        progress(f"oracle: {len(lattices)} slim semimodular lattices")
    for poset in lattices:
        if poset.n < 2:
            continue
        embedded = embed_slim_lattice(poset)
        label = key_hash(canonical_key(embedded))
        if not check_gk_criterion(embedded):
            checks["completeness"].record(False, f"{label}: embedding fails the cell criterion")
            continue
        try:
            final = normalize(embedded, config=config).final
        except NonTerminationError as exc:
            checks["completeness"].record(False, f"{label}: {exc}")
            continue
        checks["completeness"].record(
            check_diagram(final).distributive, f"{label}: normal form is not distributive"
        )

    statistics = insertion_statistics(reports)
    logger.info(
        "pipeline: insertion inclusions equal %d, strict %d over %d pairs",
        statistics.equal,
        statistics.strict,
        statistics.pairs,
    )
    return TheoremReport(max_size, len(corpus), tuple(checks.values()), statistics)


# ── Non-diminishing sequences ───────────────────────────────────────────


def default_search_pool(max_size: int, *, config: LatresConfig | None = None) -> list[Diagram]:
    """Start diagrams with at most ``max_size`` elements, one per similarity class.

    Stacked N7s and diagonally resected grids come first; they carry anchors
    of positive rank. The census follows up to its own size guard.
    """
    config = config or active_config()
    found: dict[CanonicalKey, Diagram] = {}

    def offer(diagram: Diagram) -> None:
        found.setdefault(canonical_key(diagram), diagram)

    m = 0
    while 7 + 3 * m <= max_size:
        offer(stacked_n7(m))
        m += 1
    for diagram in tower_diagrams(max_size):
        offer(diagram)
    bound = min(max_size, config.limits.census_max_elements)
    for diagram in census(bound, config=config).diagrams():
        offer(diagram)
    return list(found.values())


def iter_nondiminishing_runs(diagram: Diagram, max_steps: int) -> Iterator[NondiminishingWitness]:
    """Every run of ``max_steps`` insertions from ``diagram`` that never lowers the N7 count."""

    def extend(
        current: Diagram,
        chosen: tuple[int, ...],
        ranks: tuple[int, ...],
        lowest: tuple[int, ...],
        counts: tuple[int, ...],
        records: tuple[SurgeryRecord, ...],
    ) -> Iterator[NondiminishingWitness]:
        if len(chosen) >= max_steps:
            yield NondiminishingWitness(diagram, chosen, ranks, lowest, counts, records)
            return
        ranked = {u: rank(current, u) for u in anchors(current, C2)}
        if not ranked:
            return
        floor = min(ranked.values())
        for u in sorted(ranked):
            result = insert_traced(current, u)
            count = len(covering_n7_centers(result.diagram))
            if count < counts[-1]:
                continue
            yield from extend(
                result.diagram,
                chosen + (u,),
                ranks + (ranked[u],),
                lowest + (floor,),
                counts + (count,),
                records + (result.record,),
            )

    yield from extend(diagram, (), (), (), (len(covering_n7_centers(diagram)),), ())


def find_nondiminishing_sequence(
    max_size: int,
    max_steps: int,
    candidates: Iterable[Diagram] | None = None,
    *,
    limit: int | None = None,
    config: LatresConfig | None = None,
) -> NondiminishingWitness | None:
    """A run of ``max_steps`` insertions at freely chosen anchors along which
    the number of cover-preserving N7s never drops; ``None`` within the bounds.

    ``max_size`` bounds the start diagram only. A run that leaves the
    minimal-rank order somewhere is returned as soon as one turns up;
    otherwise the first run found.
    """
    config = config or active_config()
    bound = config.limits.search_max_elements if limit is None else limit
    if max_size > bound:
        raise ResourceLimitError("search_max_elements", max_size, bound)
    pool = default_search_pool(max_size, config=config) if candidates is None else candidates

    fallback: NondiminishingWitness | None = None
    for start in pool:
        if start.n > max_size or not check_gk_criterion(start) or not anchors(start, C2):
            continue
        for witness in iter_nondiminishing_runs(start, max_steps):
            if not witness.follows_minimal_rank:
                logger.info(
                    "pipeline: non-diminishing run of %d insertions with free anchor choices",
                    witness.steps,
                )
                return witness
            if fallback is None:
                fallback = witness
    if fallback is not None:
        logger.info("pipeline: non-diminishing run of %d insertions found", fallback.steps)
    return fallback
