from __future__ import annotations

import pytest

from latres.diagram import Diagram
from latres.errors import PreconditionError
from latres.gallery import chain, diamond, grid, pentagon, s7, stacked_n7
from latres.geometry import (
    C2,
    C3,
    DOWN,
    LEFT,
    RIGHT,
    UP,
    C3Chain,
    PrimeInterval,
    all_trajectories,
    c3_chains,
    c2_neighbors,
    cells,
    check_gk_criterion,
    covering_squares,
    four_cells,
    lies_on_boundary,
    prime_intervals,
    trajectory,
    wing,
)


# ── Cells ───────────────────────────────────────────────────────────────


@pytest.mark.parametrize(("m", "n"), [(2, 2), (3, 3), (4, 3), (2, 5)])
def test_grid_cell_count_characterization(m: int, n: int) -> None:
    found = cells(grid(m, n))
    assert len(found) == (m - 1) * (n - 1)
    assert all(cell.is_four_cell for cell in found)


def test_s7_has_three_four_cells_characterization(s7_diagram: Diagram) -> None:
    assert len(four_cells(s7_diagram)) == 3
    assert {cell.vertices for cell in cells(s7_diagram)} == {
        frozenset({0, 1, 3, 5}),
        frozenset({1, 2, 5, 6}),
        frozenset({3, 4, 5, 6}),
    }


def test_pentagon_has_one_five_cell_characterization(n5: Diagram) -> None:
    (cell,) = cells(n5)
    assert not cell.is_four_cell
    assert cell.vertices == frozenset(range(5))


@pytest.mark.parametrize(("diagram", "expected"), [(grid(2, 2), 1), (grid(3, 3), 4), (s7(), 3)])
def test_covering_square_counts_characterization(diagram: Diagram, expected: int) -> None:
    assert len(covering_squares(diagram)) == expected


@pytest.mark.parametrize("diagram", [grid(3, 3), s7(), stacked_n7(2), grid(2, 4)])
def test_four_cells_are_the_covering_squares_characterization(diagram: Diagram) -> None:
    assert sorted(sorted(cell.vertices) for cell in four_cells(diagram)) == sorted(
        sorted(square) for square in covering_squares(diagram)
    )


@pytest.mark.parametrize(
    ("diagram", "expected"),
    [(grid(3, 3), True), (s7(), True), (chain(3), True), (pentagon(), False), (diamond(), False)],
)
def test_cell_criterion_characterization(diagram: Diagram, expected: bool) -> None:
    assert check_gk_criterion(diagram) is expected


def test_cell_criterion_is_false_on_malformed_input_characterization() -> None:
    assert check_gk_criterion(Diagram(((1,), ()), ((), ()))) is False


# ── Trajectories ────────────────────────────────────────────────────────


def test_neighbors_across_the_s7_cells_characterization(s7_diagram: Diagram) -> None:
    neighbors = c2_neighbors(s7_diagram)
    edge = PrimeInterval(5, 6)
    assert neighbors.left[edge] == (PrimeInterval(1, 2), UP)
    assert neighbors.right[edge] == (PrimeInterval(3, 4), DOWN)


def test_s7_trajectory_through_the_center_is_a_hat_characterization(s7_diagram: Diagram) -> None:
    path = trajectory(s7_diagram, PrimeInterval(5, 6))
    assert path.links == (PrimeInterval(1, 2), PrimeInterval(5, 6), PrimeInterval(3, 4))
    assert path.steps == (UP, DOWN)
    assert path.shape == "hat"
    assert path.turn_index == 1
    assert path.is_well_shaped


def test_grid_trajectories_partition_the_edges_characterization() -> None:
    diagram = grid(3, 4)
    paths = all_trajectories(diagram, C2)
    assert len(paths) == 3 + 4 - 2
    assert sum(len(path.links) for path in paths) == len(list(diagram.covers()))
    assert all(path.is_well_shaped for path in paths)


def test_grid_trajectory_shapes_characterization(grid33: Diagram) -> None:
    up = trajectory(grid33, PrimeInterval(0, 3))
    assert up.shape == "up"
    assert up.links == (PrimeInterval(0, 3), PrimeInterval(1, 4), PrimeInterval(2, 5))
    down = trajectory(grid33, PrimeInterval(0, 1))
    assert down.links == (PrimeInterval(6, 7), PrimeInterval(3, 4), PrimeInterval(0, 1))
    assert down.steps == (DOWN, DOWN)


def test_c3_trajectory_in_a_grid_characterization() -> None:
    diagram = grid(4, 3)
    # left boundary chain (0,0) < (1,0) < (2,0) of C_4 x C_3
    path = trajectory(diagram, C3Chain(0, 3, 6))
    assert path.kind == C3
    assert len(path.links) == 3
    assert all(step == UP for step in path.steps)


def test_wings_split_at_the_link_characterization(s7_diagram: Diagram) -> None:
    center = PrimeInterval(5, 6)
    assert wing(s7_diagram, center, LEFT) == [PrimeInterval(1, 2), center]
    assert wing(s7_diagram, center, RIGHT) == [center, PrimeInterval(3, 4)]
    with pytest.raises(PreconditionError):
        wing(s7_diagram, center, "sideways")


def test_boundary_links_characterization(grid33: Diagram) -> None:
    assert lies_on_boundary(grid33, PrimeInterval(0, 3), LEFT)
    assert not lies_on_boundary(grid33, PrimeInterval(0, 3), RIGHT)
    assert lies_on_boundary(grid33, PrimeInterval(5, 8))
    assert not lies_on_boundary(grid33, PrimeInterval(1, 4))


# ── Corpus-wide properties ──────────────────────────────────────────────


def test_trajectories_partition_links_over_the_corpus_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        for kind, links in ((C2, set(prime_intervals(diagram))), (C3, set(c3_chains(diagram)))):
            found = [link for path in all_trajectories(diagram, kind) for link in path.links]
            assert len(found) == len(set(found))
            assert set(found) == links


def test_c2_trajectories_end_on_the_boundary_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        for path in all_trajectories(diagram, C2):
            assert lies_on_boundary(diagram, path.links[0])
            assert lies_on_boundary(diagram, path.links[-1])
            assert path.shape in ("up", "hat")
            assert path.is_well_shaped


def test_no_two_four_cells_share_a_bottom_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        assert check_gk_criterion(diagram)
        bottoms = [cell.bottom for cell in four_cells(diagram)]
        assert len(bottoms) == len(set(bottoms))
