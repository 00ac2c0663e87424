from __future__ import annotations

import pytest

from latres.diagram import Diagram, canonical_form
from latres.errors import PreconditionError
from latres.gallery import stacked_n7, stacked_n7_tower
from latres.render import (
    Overlay,
    RenderSpec,
    layout,
    parse_overlay,
    render,
    render_spec,
    to_dot,
    to_svg,
)
from latres.settings import RenderConfig


# ── Overlay parsing ─────────────────────────────────────────────────────


def test_overlay_parsing_characterization() -> None:
    assert parse_overlay("cells") == Overlay("cells")
    assert parse_overlay("scheme:4") == Overlay("scheme", 4)
    assert str(Overlay("stacked", 7)) == "stacked:7"
    assert render_spec("svg", ["anchors", Overlay("cells")]) == RenderSpec(
        "svg", (Overlay("anchors"), Overlay("cells"))
    )


@pytest.mark.parametrize("text", ["bogus", "scheme", "scheme:x", "cells:3", "stacked:-1"])
def test_bad_overlays_characterization(text: str) -> None:
    with pytest.raises(PreconditionError):
        parse_overlay(text)


def test_unknown_format_characterization() -> None:
    with pytest.raises(PreconditionError):
        render_spec("png")


# ── Layout ──────────────────────────────────────────────────────────────


def test_grid_layout_characterization(grid33: Diagram) -> None:
    placed = layout(grid33)
    assert placed[0] == (0, 0)
    assert placed[6] == (-2, 2)
    assert placed[2] == (2, 2)
    assert placed[4] == (0, 2)
    assert placed[8] == (0, 4)


def test_slim_layout_has_no_collisions_characterization(s7_diagram: Diagram) -> None:
    placed = layout(s7_diagram)
    assert len(set(placed)) == s7_diagram.n


# ── DOT ─────────────────────────────────────────────────────────────────


def test_dot_header_and_edges_characterization(grid33: Diagram) -> None:
    text = to_dot(grid33)
    lines = text.splitlines()
    assert lines[:3] == ["digraph latres {", "  rankdir=BT;", "  ordering=out;"]
    assert lines[-1] == "}"
    assert sum(" -> " in line for line in lines) == 12


def test_dot_is_stable_under_similarity_characterization(grid33: Diagram) -> None:
    assert to_dot(canonical_form(grid33)) == to_dot(grid33)


def test_scheme_overlay_marks_base_interior_and_anchor_characterization(grid33: Diagram) -> None:
    text = to_dot(grid33, [Overlay("scheme", 4)])
    assert text.count("shape=doublecircle") == 1
    assert text.count("fillcolor=black") == 2
    assert text.count("penwidth=2.5") == 4


def test_c2_scheme_overlay_characterization(s7_diagram: Diagram) -> None:
    text = to_dot(s7_diagram, [Overlay("scheme", 5)])
    assert text.count("shape=doublecircle") == 1
    assert "fillcolor=black" not in text
    assert text.count('fillcolor="#c8c8c8"') == 7
    assert text.count("penwidth=2.5") == 2


def test_stacked_overlay_fills_the_upper_tower_characterization() -> None:
    diagram = stacked_n7(1)
    text = to_dot(diagram, [Overlay("stacked", stacked_n7_tower(1)[0])])
    assert text.count("fillcolor=black") == 1
    assert text.count("shape=doublecircle") == 1


def test_cells_and_trajectories_characterization(grid33: Diagram) -> None:
    text = to_dot(grid33, [Overlay("cells"), Overlay("trajectories")])
    assert text.count("// cell") == 4
    assert text.count("color=") == 12


def test_overlay_element_checks_characterization(grid33: Diagram) -> None:
    with pytest.raises(PreconditionError):
        to_dot(grid33, [Overlay("scheme", 99)])
    with pytest.raises(PreconditionError):
        to_dot(grid33, [Overlay("scheme", 0)])


# ── SVG ─────────────────────────────────────────────────────────────────


def test_svg_counts_characterization(grid33: Diagram) -> None:
    text = to_svg(grid33, config=RenderConfig())
    assert text.startswith("<?xml")
    assert "<svg " in text
    assert text.rstrip().endswith("</svg>")
    assert text.count('id="element-') == 9
    assert text.count('id="cover-') == 12
    assert text.count('id="label-') == 9
    assert 'id="cover-0-1"' in text
    assert 'id="anchor-' not in text


def test_svg_anchor_overlay_adds_rings_characterization(grid33: Diagram) -> None:
    text = render(grid33, render_spec("svg", ["anchors", "cells"]), config=RenderConfig())
    assert text.count('id="anchor-') == 1
    assert 'id="anchor-4"' in text
    assert text.count('id="cell-') == 4


def test_svg_is_reproducible_characterization(s7_diagram: Diagram) -> None:
    spec = render_spec("svg", ["scheme:5"])
    assert render(s7_diagram, spec, config=RenderConfig()) == render(s7_diagram, spec, config=RenderConfig())


def test_render_defaults_to_dot_characterization(grid33: Diagram) -> None:
    assert render(grid33, RenderSpec()).startswith("digraph latres {")
