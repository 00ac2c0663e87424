from __future__ import annotations

import pytest

from latres.diagram import Diagram, bottom, is_similar, top
from latres.errors import PreconditionError
from latres.gallery import chain, grid, s7, stacked_n7, stacked_n7_tower
from latres.geometry import C2, C3, check_gk_criterion
from latres.oracle import check_diagram
from latres.schemes import anchors, rank, scheme
from latres.surgery import (
    SurgeryRecord,
    corners,
    insert,
    insert_traced,
    is_rectangular,
    left_weak_corners,
    remove_boundary_di,
    remove_corner,
    remove_corner_traced,
    replay,
    resect,
    resect_traced,
    right_weak_corners,
    weak_corners,
)


# ── Resection and insertion ─────────────────────────────────────────────


def test_resecting_the_grid_gives_s7_characterization(grid33: Diagram) -> None:
    result = resect_traced(grid33, 4)
    assert result.diagram.n == 7
    assert is_similar(result.diagram, s7())
    assert result.record == SurgeryRecord("resect", 4, frozenset({5, 7}), 0)
    assert result.id_map[4] == 4
    assert 5 not in result.id_map


def test_inserting_into_s7_gives_the_grid_characterization(s7_diagram: Diagram) -> None:
    result = insert_traced(s7_diagram, 5)
    assert result.diagram.n == 9
    assert is_similar(result.diagram, grid(3, 3))
    assert result.record == SurgeryRecord("insert", 5, frozenset(), 2)
    assert 5 in anchors(result.diagram, C3)


def test_round_trips_characterization(grid33: Diagram, s7_diagram: Diagram) -> None:
    assert is_similar(insert(resect(grid33, 4), 4), grid33)
    assert is_similar(resect(insert(s7_diagram, 5), 5), s7_diagram)


def test_insertion_keeps_existing_ids_characterization() -> None:
    diagram = stacked_n7(1)
    x0, x1 = stacked_n7_tower(1)
    grown = insert(diagram, x0)
    assert grown.n == 14
    assert check_gk_criterion(grown)
    assert grown.upper[x0] != diagram.upper[x0]
    assert anchors(grown, C2) == frozenset({x1})
    assert rank(grown, x1) == 0


def test_insertion_grows_by_the_wing_links_characterization() -> None:
    diagram = stacked_n7(2)
    result = insert_traced(diagram, stacked_n7_tower(2)[0])
    assert result.record.added == 6
    assert result.diagram.n == diagram.n + 6


def test_surgery_preconditions_characterization(grid33: Diagram, s7_diagram: Diagram, n5: Diagram) -> None:
    with pytest.raises(PreconditionError):
        insert(grid33, 4)
    with pytest.raises(PreconditionError):
        resect(s7_diagram, 5)
    with pytest.raises(PreconditionError):
        resect(n5, 2)


# ── Corners ─────────────────────────────────────────────────────────────


def test_grid_corners_characterization(grid33: Diagram) -> None:
    assert left_weak_corners(grid33) == frozenset({6})
    assert right_weak_corners(grid33) == frozenset({2})
    assert weak_corners(grid33) == corners(grid33) == frozenset({2, 6})
    assert is_rectangular(grid33)


def test_s7_is_rectangular_characterization(s7_diagram: Diagram) -> None:
    assert weak_corners(s7_diagram) == frozenset({2, 4})
    assert is_rectangular(s7_diagram)


def test_chain_has_no_weak_corner_characterization() -> None:
    assert weak_corners(chain(3)) == frozenset()
    assert not is_rectangular(chain(3))
    with pytest.raises(PreconditionError):
        weak_corners(chain(1))


def test_remove_corner_from_grid_characterization(grid33: Diagram) -> None:
    result = remove_corner_traced(grid33, 6)
    assert result.diagram.n == 8
    assert check_gk_criterion(result.diagram)
    assert not is_rectangular(result.diagram)
    assert result.record == SurgeryRecord("remove_corner", 6, frozenset({6}), 0)
    with pytest.raises(PreconditionError):
        remove_corner(grid33, 4)


def test_remove_boundary_atom_of_square_gives_chain_characterization() -> None:
    square = grid(2, 2)
    smaller = remove_boundary_di(square, 2)
    assert is_similar(smaller, chain(3))
    assert bottom(smaller) == 0
    assert top(smaller) == 2


def test_remove_boundary_di_preconditions_characterization(s7_diagram: Diagram, grid33: Diagram) -> None:
    with pytest.raises(PreconditionError):
        remove_boundary_di(s7_diagram, 2)
    with pytest.raises(PreconditionError):
        remove_boundary_di(grid33, 4)
    with pytest.raises(PreconditionError):
        remove_boundary_di(grid33, 3)


# ── Replay ──────────────────────────────────────────────────────────────


def test_replay_matches_the_record_characterization(grid33: Diagram) -> None:
    record = resect_traced(grid33, 4).record
    assert replay(grid33, record).diagram == resect(grid33, 4)


def test_replay_rejects_a_mismatching_record_characterization(grid33: Diagram) -> None:
    with pytest.raises(PreconditionError):
        replay(grid33, SurgeryRecord("resect", 4, frozenset({1}), 0))
    with pytest.raises(PreconditionError):
        replay(grid33, SurgeryRecord("shuffle", 4))


# ── Corpus-wide properties ──────────────────────────────────────────────


def test_surgery_size_accounting_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        for u in sorted(anchors(diagram, C2)):
            links = len(scheme(diagram, u, C2).links)
            result = insert_traced(diagram, u)
            assert result.record.added == links
            assert result.diagram.n == diagram.n + links
        for u in sorted(anchors(diagram, C3)):
            links = len(scheme(diagram, u, C3).links)
            result = resect_traced(diagram, u)
            assert len(result.record.removed) == links
            assert result.diagram.n == diagram.n - links


def test_surgery_keeps_weak_corners_and_rectangularity_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        corners_before = weak_corners(diagram)
        for u in sorted(anchors(diagram, C2)):
            grown = insert(diagram, u)
            assert weak_corners(grown) == corners_before
            assert (bottom(grown), top(grown)) == (bottom(diagram), top(diagram))
            assert is_rectangular(grown) == is_rectangular(diagram)
            assert check_diagram(grown).slim_semimodular
        for u in sorted(anchors(diagram, C3)):
            result = resect_traced(diagram, u)
            assert weak_corners(result.diagram) == {result.id_map[x] for x in corners_before}
            assert is_rectangular(result.diagram) == is_rectangular(diagram)
            assert check_diagram(result.diagram).slim_semimodular
