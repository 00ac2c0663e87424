from __future__ import annotations

import pytest

from latres.census import (
    INDEX_FILE_NAME,
    CensusStore,
    census,
    census_diagrams,
    diagonal_resection,
    iter_census,
    iter_diagonal_resections,
    load_census,
    replay_provenance,
    save_census,
    slim_distributive_diagrams,
    tower_diagrams,
)
from latres.diagram import canonical_key, is_similar, key_hash
from latres.errors import LatdiagParseError, PreconditionError, ResourceLimitError
from latres.gallery import grid, s7, stacked_n7
from latres.geometry import C2, check_gk_criterion
from latres.oracle import Poset, is_distributive
from latres.schemes import anchors, rank
from latres.settings import MAX_ELEMENTS_ENV_VAR


# ── Seeds ───────────────────────────────────────────────────────────────


def test_small_census_holds_only_seeds_characterization(small_store: CensusStore) -> None:
    assert small_store.sizes() == {2: 1, 3: 1, 4: 2}
    assert all(record.is_seed for record in small_store)
    assert all(record.seed_hash == record.key_hash for record in small_store)


def test_seed_methods_agree_characterization() -> None:
    regions = slim_distributive_diagrams(5, "regions")
    removal = slim_distributive_diagrams(5, "removal")
    assert len(regions) == 7
    assert [canonical_key(d) for d in regions] == [canonical_key(d) for d in removal]


def test_seeds_are_distributive_characterization() -> None:
    for diagram in slim_distributive_diagrams(7):
        assert check_gk_criterion(diagram)
        assert is_distributive(Poset.from_diagram(diagram))


def test_unknown_seed_method_characterization() -> None:
    with pytest.raises(PreconditionError):
        slim_distributive_diagrams(4, "guess")


# ── Closure ─────────────────────────────────────────────────────────────


def test_s7_comes_from_the_grid_characterization(store9: CensusStore) -> None:
    key = canonical_key(s7())
    assert key in store9
    record = store9.records[key]
    assert len(record.trace) == 1
    assert record.trace[0].op == "resect"
    seed = store9.by_hash(record.seed_hash)
    assert is_similar(seed.diagram, grid(3, 3))
    assert is_similar(replay_provenance(store9, record.key_hash), s7())


def test_every_member_passes_the_cell_criterion_characterization(store9: CensusStore) -> None:
    assert all(check_gk_criterion(record.diagram) for record in store9)
    keys = [record.key for record in store9]
    assert len(keys) == len(set(keys))


def test_every_provenance_replays_characterization(store9: CensusStore) -> None:
    for record in store9:
        assert replay_provenance(store9, record.key_hash) == record.diagram


def test_iteration_yields_seeds_before_their_descendants_characterization() -> None:
    seen: set[str] = set()
    for record in iter_census(9):
        assert record.seed_hash in seen or record.is_seed
        seen.add(record.key_hash)


def test_census_is_idempotent_on_a_shared_store_characterization(small_store: CensusStore) -> None:
    again = census(4, small_store)
    assert again is small_store
    assert len(again) == 4
    assert len(census_diagrams(4)) == 4


def test_census_guards_characterization(monkeypatch: pytest.MonkeyPatch) -> None:
    with pytest.raises(ResourceLimitError, match="census_max_elements"):
        census(15)
    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "3")
    with pytest.raises(ResourceLimitError):
        census(4)


# ── Towers ──────────────────────────────────────────────────────────────


def test_single_diagonal_resection_is_s7_characterization() -> None:
    assert is_similar(diagonal_resection(3, 3, [1]), s7())
    assert diagonal_resection(3, 3, []) == grid(3, 3)


def test_stacked_diagonal_resections_build_a_tower_characterization() -> None:
    stages = list(iter_diagonal_resections(4, 4, [2, 1]))
    assert [stage.n for stage in stages] == [14, 10]
    final = stages[-1]
    assert is_similar(final, stacked_n7(1))
    (u,) = anchors(final, C2)
    assert rank(final, u) == 1


def test_diagonal_resection_outside_the_grid_characterization() -> None:
    with pytest.raises(PreconditionError, match="not inside grid"):
        diagonal_resection(3, 3, [2])


def test_tower_diagrams_stay_within_the_bound_characterization() -> None:
    towers = list(tower_diagrams(10))
    assert sorted(diagram.n for diagram in towers) == [7, 10, 10]
    assert any(is_similar(diagram, stacked_n7(1)) for diagram in towers)
    assert all(check_gk_criterion(diagram) for diagram in towers)


# ── Persistence ─────────────────────────────────────────────────────────


def test_store_round_trip_characterization(store9: CensusStore, tmp_path) -> None:
    save_census(store9, tmp_path)
    index = (tmp_path / INDEX_FILE_NAME).read_text(encoding="utf-8").splitlines()
    assert index[0] == "key_hash\tsize\trectangular\tprovenance"
    assert len(index) == len(store9) + 1

    loaded = load_census(tmp_path)
    assert len(loaded) == len(store9)
    for record in store9:
        twin = loaded.records[record.key]
        assert twin.diagram == record.diagram
        assert twin.trace == record.trace
        assert twin.rectangular == record.rectangular
        assert twin.seed_hash == record.seed_hash


def test_grid_is_recorded_as_rectangular_characterization(small_store: CensusStore) -> None:
    square = small_store.by_hash(key_hash(canonical_key(grid(2, 2))))
    assert square.rectangular


def test_malformed_index_row_characterization(small_store: CensusStore, tmp_path) -> None:
    save_census(small_store, tmp_path)
    index = tmp_path / INDEX_FILE_NAME
    index.write_text(index.read_text(encoding="utf-8") + "abc\tfour\t1\tabc.trace\n", encoding="utf-8")
    with pytest.raises(LatdiagParseError) as excinfo:
        load_census(tmp_path)
    assert excinfo.value.line_number == len(small_store) + 2
