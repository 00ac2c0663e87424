"""Slim distributive seeds, their resection closure and the on-disk store.

A store directory holds one ``<hash>.latdiag`` and one ``<hash>.trace`` per
similarity class plus ``index.tsv``. Trace files start with ``seed <hash>``
and list the resections that lead from the seed to the stored diagram, with
ids taken from the canonical form of each intermediate diagram.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from latres.diagram import (
    CanonicalKey,
    Diagram,
    boundary_chains,
    canonical_form,
    canonical_key,
    irreducibles,
    key_hash,
)
from latres.errors import LatdiagParseError, PreconditionError, ResourceLimitError
from latres.gallery import grid, grid_id
from latres.geometry import C3
from latres.latdiag import LATDIAG_SUFFIX, dumps_trace, load_latdiag, loads_trace, save_latdiag
from latres.schemes import anchors
from latres.settings import SEED_METHODS, LatresConfig, active_config
from latres.surgery import (
    SurgeryRecord,
    is_rectangular,
    remove_boundary_di,
    replay,
    resect_traced,
)

logger = logging.getLogger(__name__)

INDEX_FILE_NAME = "index.tsv"
TRACE_SUFFIX = ".trace"
_INDEX_HEADER = "key_hash\tsize\trectangular\tprovenance"

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CensusRecord:
    key: CanonicalKey
    diagram: Diagram
    rectangular: bool
    seed_hash: str
    trace: tuple[SurgeryRecord, ...] = ()

    @property
    def size(self) -> int:
        return self.diagram.n

    @property
    def key_hash(self) -> str:
        return key_hash(self.key)

    @property
    def is_seed(self) -> bool:
        return not self.trace


@dataclass
class CensusStore:
    records: dict[CanonicalKey, CensusRecord] = field(default_factory=dict)

    def add(self, record: CensusRecord) -> None:
        # equal keys carry identical records
        self.records[record.key] = record

    def by_hash(self, digest: str) -> CensusRecord:
        for record in self.records.values():
            if record.key_hash == digest:
                return record
        raise KeyError(digest)

    def __contains__(self, key: object) -> bool:
        return key in self.records

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[CensusRecord]:
        return iter(sorted(self.records.values(), key=lambda record: (record.size, record.key)))

    def diagrams(self) -> list[Diagram]:
        return [record.diagram for record in self]

    def sizes(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for record in self.records.values():
            counts[record.size] = counts.get(record.size, 0) + 1
        return dict(sorted(counts.items()))


# ── Seeds ───────────────────────────────────────────────────────────────


def _region_diagram(levels: list[tuple[int, int]]) -> Diagram:
    # level h holds the grid points (i, h - i) with low <= i <= high
    ids: dict[tuple[int, int], int] = {}
    for height, (low, high) in enumerate(levels):
        for i in range(high, low - 1, -1):
            ids[(i, height - i)] = len(ids)
    upper: list[tuple[int, ...]] = [()] * len(ids)
    lower: list[tuple[int, ...]] = [()] * len(ids)
    for (i, j), x in ids.items():
        upper[x] = tuple(ids[p] for p in ((i + 1, j), (i, j + 1)) if p in ids)
        lower[x] = tuple(ids[p] for p in ((i, j - 1), (i - 1, j)) if p in ids)
    return Diagram(tuple(upper), tuple(lower))


def _region_seeds(max_size: int) -> Iterator[Diagram]:
    """Every region of a grid between two monotone paths that meet at the top."""

    def grow(levels: list[tuple[int, int]], size: int) -> Iterator[Diagram]:
        low, high = levels[-1]
        if low == high and size >= 2:
            yield _region_diagram(levels)
        for new_low in (low, low + 1):
            for new_high in (high, high + 1):
                if new_low > new_high:
                    continue
                width = new_high - new_low + 1
                if size + width <= max_size:
                    yield from grow(levels + [(new_low, new_high)], size + width)

    yield from grow([(0, 0)], 1)


def _removal_seeds(max_size: int) -> Iterator[Diagram]:
    """Grids of length below ``max_size`` closed under boundary doubly-irreducible removal."""
    seen: set[CanonicalKey] = set()
    queue: deque[Diagram] = deque()
    for m in range(2, max_size):
        for n in range(2, max_size + 2 - m):
            start = canonical_form(grid(m, n))
            key = canonical_key(start)
            if key not in seen:
                seen.add(key)
                queue.append(start)
    while queue:
        current = queue.popleft()
        if current.n <= max_size:
            yield current
        if current.n <= 2:
            continue
        left, right = boundary_chains(current)
        on_boundary = set(left) | set(right)
        for x in sorted(irreducibles(current).doubly_irreducible & on_boundary):
            smaller = canonical_form(remove_boundary_di(current, x))
            key = canonical_key(smaller)
            if key not in seen:
                seen.add(key)
                queue.append(smaller)


def slim_distributive_diagrams(max_size: int, method: str = "regions") -> list[Diagram]:
    """Canonical forms of every slim distributive diagram with 2..max_size elements."""
    if method not in SEED_METHODS:
        raise PreconditionError(f"slim_distributive_diagrams: unknown method {method!r}")
    source = _region_seeds if method == "regions" else _removal_seeds
    found: dict[CanonicalKey, Diagram] = {}
    for diagram in source(max_size):
        form = canonical_form(diagram)
        found.setdefault(canonical_key(form), form)
    return [found[key] for key in sorted(found, key=lambda key: (found[key].n, key))]


# ── Closure ─────────────────────────────────────────────────────────────


def _guard(max_size: int, config: LatresConfig) -> None:
    limit = config.limits.census_max_elements
    if max_size > limit:
        raise ResourceLimitError("census_max_elements", max_size, limit)


def iter_census(
    max_size: int,
    *,
    method: str | None = None,
    config: LatresConfig | None = None,
) -> Iterator[CensusRecord]:
    """Seeds by increasing size, each followed by the new members of its resection closure."""
    config = config or active_config()
    _guard(max_size, config)
    seen: set[CanonicalKey] = set()
    for seed in slim_distributive_diagrams(max_size, method or config.census.seed_method):
        seed_key = canonical_key(seed)
        if seed_key in seen:
            continue
        seen.add(seed_key)
        seed_hash = key_hash(seed_key)
        root = CensusRecord(seed_key, seed, is_rectangular(seed), seed_hash)
        yield root

        queue: deque[CensusRecord] = deque([root])
        while queue:
            current = queue.popleft()
            for u in sorted(anchors(current.diagram, C3)):
                result = resect_traced(current.diagram, u)
                form = canonical_form(result.diagram)
                key = canonical_key(form)
                if key in seen:
                    continue
                seen.add(key)
                record = CensusRecord(
                    key, form, is_rectangular(form), seed_hash, current.trace + (result.record,)
                )
                yield record
                queue.append(record)


def census(
    max_size: int,
    store: CensusStore | None = None,
    *,
    method: str | None = None,
    config: LatresConfig | None = None,
) -> CensusStore:
    store = store if store is not None else CensusStore()
    before = len(store)
    for record in iter_census(max_size, method=method, config=config):
        store.add(record)
    logger.info("census: %d similarity classes up to %d elements", len(store) - before, max_size)
    return store


def census_diagrams(max_size: int, *, config: LatresConfig | None = None) -> list[Diagram]:
    return census(max_size, config=config).diagrams()


# ── Towers ──────────────────────────────────────────────────────────────


def iter_diagonal_resections(m: int, n: int, rows: Iterable[int]) -> Iterator[Diagram]:
    """Resect ``grid(m, n)`` at (i, i + n - m) for each i in ``rows``, top row first.

    Yields the diagram after every resection. Consecutive rows stack: the
    resected point just above becomes the top of the next base, so a run of
    k rows leaves one C2 anchor of rank k - 1.
    """
    offset = n - m
    pending: dict[int, int] = {}
    for i in sorted(set(rows)):
        if not (1 <= i <= m - 2 and 1 <= i + offset <= n - 2):
            raise PreconditionError(f"diagonal resection: ({i}, {i + offset}) is not inside grid({m}, {n})")
        pending[i] = grid_id(n, i, i + offset)
    current = grid(m, n)
    for i in sorted(pending, reverse=True):
        result = resect_traced(current, pending.pop(i))
        pending = {row: result.id_map[x] for row, x in pending.items()}
        current = result.diagram
        yield current


def diagonal_resection(m: int, n: int, rows: Iterable[int]) -> Diagram:
    current = grid(m, n)
    for current in iter_diagonal_resections(m, n, rows):
        pass
    return current


def tower_diagrams(max_size: int) -> Iterator[Diagram]:
    """Grids resected down their top diagonal, every stage with at most ``max_size`` elements.

    Each resection at (i, i + n - m) removes 2(m - 1 - i) elements, so the
    fully stacked grid(m, n) keeps m*n - (m - 2)(m - 1).
    """
    m = 3
    while 3 * m - 2 <= max_size:
        n = m
        while m * n - (m - 2) * (m - 1) <= max_size:
            try:
                for diagram in iter_diagonal_resections(m, n, range(1, m - 1)):
                    if diagram.n <= max_size:
                        yield diagram
            except PreconditionError as exc:
                logger.warning("census: diagonal resection of grid(%d, %d) stopped: %s", m, n, exc)
            n += 1
        m += 1


# ── Persistence ─────────────────────────────────────────────────────────


def save_census(store: CensusStore, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = [_INDEX_HEADER]
    for record in store:
        digest = record.key_hash
        save_latdiag(record.diagram, out_dir / f"{digest}{LATDIAG_SUFFIX}")
        trace_name = f"{digest}{TRACE_SUFFIX}"
        (out_dir / trace_name).write_text(
            dumps_trace(record.trace, header=[f"seed {record.seed_hash}"]), encoding="utf-8"
        )
        rows.append(f"{digest}\t{record.size}\t{int(record.rectangular)}\t{trace_name}")
    (out_dir / INDEX_FILE_NAME).write_text("\n".join(rows) + "\n", encoding="utf-8")
    logger.info("census: wrote %d records to %s", len(store), out_dir)


def load_census(out_dir: Path) -> CensusStore:
    store = CensusStore()
    lines = (out_dir / INDEX_FILE_NAME).read_text(encoding="utf-8").splitlines()
    for number, line in enumerate(lines, start=1):
        if not line.strip() or line == _INDEX_HEADER:
            continue
        fields = line.split("\t")
        if len(fields) != 4 or not fields[1].isdigit() or fields[2] not in ("0", "1"):
            raise LatdiagParseError(number, f"malformed census index row {line!r}")
        digest, size, rectangular, trace_name = fields
        diagram = load_latdiag(out_dir / f"{digest}{LATDIAG_SUFFIX}")
        if diagram.n != int(size):
            raise LatdiagParseError(number, f"{digest} has {diagram.n} elements, index says {size}")
        header, records = loads_trace((out_dir / trace_name).read_text(encoding="utf-8"))
        seed_hash = _seed_hash(header, digest)
        store.add(
            CensusRecord(canonical_key(diagram), diagram, rectangular == "1", seed_hash, tuple(records))
        )
    return store


def _seed_hash(header: Iterable[str], digest: str) -> str:
    for line in header:
        parts = line.split()
        if len(parts) == 2 and parts[0] == "seed":
            return parts[1]
    raise LatdiagParseError(1, f"trace of {digest} has no 'seed <hash>' line")


def replay_provenance(store: CensusStore, digest: str) -> Diagram:
    """Re-run a record's resections from its seed; the result is in canonical form."""
    record = store.by_hash(digest)
    current = store.by_hash(record.seed_hash).diagram
    for step in record.trace:
        current = canonical_form(replay(current, step).diagram)
    return current
