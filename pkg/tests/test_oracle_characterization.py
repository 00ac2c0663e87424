from __future__ import annotations

import numpy as np
import pytest

from latres.diagram import Diagram, is_similar_up_to_reflection, validate_well_formed
from latres.errors import PreconditionError, ResourceLimitError
from latres.gallery import chain, diamond, grid, pentagon, s7
from latres.geometry import check_gk_criterion
from latres.oracle import (
    OracleVerdict,
    Poset,
    check_diagram,
    count_lattices,
    covers,
    embed_slim_lattice,
    enumerate_slim_semimodular_lattices,
    is_distributive,
    is_lattice,
    ji_chain_split,
    join_irreducibles,
)
from latres.pipeline import corrupted_variants


# ── Predicates ──────────────────────────────────────────────────────────


@pytest.mark.parametrize(
    ("diagram", "expected"),
    [
        (grid(3, 3), OracleVerdict(lattice=True, semimodular=True, slim=True, distributive=True)),
        (s7(), OracleVerdict(lattice=True, semimodular=True, slim=True, distributive=False)),
        (pentagon(), OracleVerdict(lattice=True, semimodular=False, slim=True, distributive=False)),
        (diamond(), OracleVerdict(lattice=True, semimodular=True, slim=False, distributive=False)),
        (chain(3), OracleVerdict(lattice=True, semimodular=True, slim=True, distributive=True)),
    ],
)
def test_oracle_verdicts_characterization(diagram: Diagram, expected: OracleVerdict) -> None:
    assert check_diagram(diagram) == expected


def test_empty_poset_is_not_a_lattice_characterization() -> None:
    assert not is_lattice(Poset(0, np.zeros((0, 0), dtype=bool)))


def test_two_minimal_elements_are_not_a_lattice_characterization() -> None:
    poset = Poset.from_covers(3, [(0, 2), (1, 2)])
    assert not is_lattice(poset)
    assert not check_diagram(Diagram(((1, 2), (), ()), ((), (0,), (0,)))).lattice


def test_poset_rejects_wrong_shape_characterization() -> None:
    with pytest.raises(PreconditionError):
        Poset(3, np.eye(2, dtype=bool))


def test_poset_table_is_read_only_characterization() -> None:
    poset = Poset.from_covers(2, [(0, 1)])
    with pytest.raises(ValueError):
        poset.leq[1, 0] = True


def test_covers_are_recovered_from_the_order_characterization(grid33: Diagram) -> None:
    poset = Poset.from_diagram(grid33)
    assert sorted(covers(poset)) == sorted(grid33.covers())
    assert join_irreducibles(poset) == [1, 2, 3, 6]


def test_distributivity_of_products_characterization() -> None:
    assert is_distributive(Poset.from_diagram(grid(2, 4)))
    assert not is_distributive(Poset.from_diagram(diamond()))


# ── Embedding ───────────────────────────────────────────────────────────


def test_ji_chain_split_colours_the_smallest_element_left_characterization(grid33: Diagram) -> None:
    left, right = ji_chain_split(Poset.from_diagram(grid33))
    assert left == [1, 2]
    assert right == [3, 6]


def test_ji_chain_split_rejects_three_antichain_characterization() -> None:
    with pytest.raises(PreconditionError):
        ji_chain_split(Poset.from_diagram(diamond()))


@pytest.mark.parametrize("diagram", [grid(3, 3), s7(), grid(2, 4), chain(3)])
def test_embedding_recovers_the_diagram_characterization(diagram: Diagram) -> None:
    embedded = embed_slim_lattice(Poset.from_diagram(diagram))
    assert check_gk_criterion(embedded)
    assert is_similar_up_to_reflection(embedded, diagram)


def test_embedding_rejects_non_slim_characterization() -> None:
    with pytest.raises(PreconditionError):
        embed_slim_lattice(Poset.from_diagram(diamond()))


# ── Enumeration ─────────────────────────────────────────────────────────


def test_count_up_to_four_elements_characterization() -> None:
    assert count_lattices(4) == {1: 1, 2: 1, 3: 1, 4: 2}
    assert len(enumerate_slim_semimodular_lattices(4)) == 5


def test_count_with_five_elements_characterization() -> None:
    assert count_lattices(5)[5] == 3


def test_enumeration_is_sorted_by_size_characterization() -> None:
    sizes = [poset.n for poset in enumerate_slim_semimodular_lattices(6)]
    assert sizes == sorted(sizes)


def test_every_enumerated_lattice_embeds_characterization() -> None:
    for poset in enumerate_slim_semimodular_lattices(6):
        if poset.n < 2:
            continue
        assert check_gk_criterion(embed_slim_lattice(poset))


def test_enumeration_guard_characterization() -> None:
    with pytest.raises(ResourceLimitError):
        enumerate_slim_semimodular_lattices(11)
    with pytest.raises(ResourceLimitError, match="oracle_max_elements"):
        enumerate_slim_semimodular_lattices(6, limit=5)


# ── Corpus-wide properties ──────────────────────────────────────────────


def test_validation_implies_a_lattice_characterization(corpus: list[Diagram]) -> None:
    for diagram in corpus:
        assert validate_well_formed(diagram).ok
        assert is_lattice(Poset.from_diagram(diagram))
    rejected = 0
    for diagram in corrupted_variants(corpus, 60, seed=3):
        lattice = is_lattice(Poset.from_diagram(diagram))
        assert lattice or not validate_well_formed(diagram).ok
        rejected += not lattice
    assert rejected > 0
