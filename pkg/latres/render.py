"""DOT and SVG pictures of diagrams with overlays.

Overlays follow one legend: a scheme's or stacked region's base is shaded,
its interior is filled black and the anchor is circled. ``cells`` tints every
cell, ``trajectories`` colours each C2 trajectory's edges, ``anchors`` circles
every C2 and C3 anchor.
"""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import matplotlib
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.patches import Polygon

from latres.diagram import Diagram, boundary_chains, canonical_ids, irreducibles, relabel
from latres.errors import PreconditionError
from latres.geometry import C2, C3, all_trajectories, cells
from latres.schemes import anchors, scheme, stacked_tower
from latres.settings import RenderConfig, active_config

logger = logging.getLogger(__name__)

RENDER_FORMATS = ("dot", "svg")
OVERLAY_KINDS = ("cells", "trajectories", "anchors", "scheme", "stacked")
_ANCHORED = ("scheme", "stacked")

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#17becf",
)
_SHADE = "#c8c8c8"
_CELL_TINT = "#eef3fa"

# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Overlay:
    kind: str
    element: int | None = None

    def __str__(self) -> str:
        return self.kind if self.element is None else f"{self.kind}:{self.element}"


@dataclass(frozen=True)
class RenderSpec:
    format: str = "dot"
    overlays: tuple[Overlay, ...] = ()


@dataclass
class _Decorations:
    shaded: set[int] = field(default_factory=set)
    filled: set[int] = field(default_factory=set)
    circled: set[int] = field(default_factory=set)
    edge_colors: dict[tuple[int, int], str] = field(default_factory=dict)
    bold_edges: set[tuple[int, int]] = field(default_factory=set)
    polygons: list[tuple[int, ...]] = field(default_factory=list)

    def relabelled(self, mapping: Sequence[int]) -> "_Decorations":
        def edge(pair: tuple[int, int]) -> tuple[int, int]:
            return mapping[pair[0]], mapping[pair[1]]

        return _Decorations(
            {mapping[x] for x in self.shaded},
            {mapping[x] for x in self.filled},
            {mapping[x] for x in self.circled},
            {edge(pair): colour for pair, colour in self.edge_colors.items()},
            {edge(pair) for pair in self.bold_edges},
            [tuple(mapping[x] for x in polygon) for polygon in self.polygons],
        )


def parse_overlay(text: str) -> Overlay:
    kind, _, raw = text.partition(":")
    if kind not in OVERLAY_KINDS:
        raise PreconditionError(f"render: unknown overlay {text!r}")
    if kind in _ANCHORED:
        if not raw.strip().isdigit():
            raise PreconditionError(f"render: overlay {kind!r} needs an element, as in {kind}:<id>")
        return Overlay(kind, int(raw))
    if raw:
        raise PreconditionError(f"render: overlay {kind!r} takes no element")
    return Overlay(kind)


def render_spec(format: str = "dot", overlays: Iterable[str | Overlay] = ()) -> RenderSpec:
    if format not in RENDER_FORMATS:
        raise PreconditionError(f"render: unknown format {format!r}")
    parsed = tuple(o if isinstance(o, Overlay) else parse_overlay(o) for o in overlays)
    return RenderSpec(format, parsed)


# ── Overlays ────────────────────────────────────────────────────────────


def _decorate(diagram: Diagram, overlays: Sequence[Overlay]) -> _Decorations:
    decorations = _Decorations()
    for overlay in overlays:
        if overlay.element is not None and not 0 <= overlay.element < diagram.n:
            raise PreconditionError(f"render: overlay {overlay} names an unknown element")
        if overlay.kind == "cells":
            for cell in cells(diagram):
                decorations.polygons.append(cell.left_side + tuple(reversed(cell.right_side[1:-1])))
        elif overlay.kind == "trajectories":
            for index, path in enumerate(all_trajectories(diagram, C2)):
                colour = _PALETTE[index % len(_PALETTE)]
                for link in path.links:
                    decorations.edge_colors[(link.bottom, link.top)] = colour
        elif overlay.kind == "anchors":
            decorations.circled |= anchors(diagram, C2) | anchors(diagram, C3)
        elif overlay.kind == "scheme":
            _decorate_scheme(diagram, overlay.element, decorations)
        else:
            region = stacked_tower(diagram, overlay.element)[-1]
            decorations.shaded |= region.elements
            decorations.filled |= set(region.interior_tower) - {overlay.element}
            decorations.circled.add(overlay.element)
    return decorations


def _decorate_scheme(diagram: Diagram, u: int, decorations: _Decorations) -> None:
    if u in anchors(diagram, C3):
        kind = C3
    elif u in anchors(diagram, C2):
        kind = C2
    else:
        raise PreconditionError(f"render: {u} is not a C2 or C3 anchor")
    built = scheme(diagram, u, kind)
    decorations.shaded |= built.base
    decorations.filled |= built.interior - {u}
    decorations.circled.add(u)
    for link in built.links:
        for pair in zip(link.elements, link.elements[1:]):
            decorations.bold_edges.add(pair)


# ── Layout ──────────────────────────────────────────────────────────────


def layout(diagram: Diagram) -> list[tuple[float, int]]:
    """(column, layer) per element.

    The layer is the height; the column counts join-irreducibles of the right
    boundary below an element minus those of the left boundary.
    """
    heights = diagram.heights
    left, right = boundary_chains(diagram)
    ji = irreducibles(diagram).ji
    left_ji = [x for x in left if x in ji]
    right_ji = [x for x in right if x in ji]
    order = diagram.order
    slots: dict[tuple[int, int], int] = {}
    placed: list[tuple[float, int]] = []
    for x in range(diagram.n):
        column = sum(int(order[j, x]) for j in right_ji) - sum(int(order[j, x]) for j in left_ji)
        slot = (column, heights[x])
        shift = slots.get(slot, 0)
        slots[slot] = shift + 1
        # collisions only happen in diagrams that are not slim
        placed.append((column + 0.5 * shift, heights[x]))
    return placed


# ── DOT ─────────────────────────────────────────────────────────────────


def to_dot(diagram: Diagram, overlays: Sequence[Overlay] = ()) -> str:
    """DOT text in canonical ids, so similar diagrams give identical output."""
    mapping = canonical_ids(diagram)
    decorations = _decorate(diagram, overlays).relabelled(mapping)
    form = relabel(diagram, mapping)

    lines = [
        "digraph latres {",
        "  rankdir=BT;",
        "  ordering=out;",
        '  node [shape=circle, width=0.3, fixedsize=true, fontsize=9];',
    ]
    for x in range(form.n):
        attributes = [f'label="{x}"']
        if x in decorations.filled:
            attributes += ["style=filled", "fillcolor=black", "fontcolor=white"]
        elif x in decorations.shaded:
            attributes += ["style=filled", f'fillcolor="{_SHADE}"']
        if x in decorations.circled:
            attributes.append("shape=doublecircle")
        lines.append(f"  {x} [{', '.join(attributes)}];")
    for x in range(form.n):
        for y in form.upper[x]:
            attributes = []
            if (x, y) in decorations.edge_colors:
                attributes.append(f'color="{decorations.edge_colors[(x, y)]}"')
            if (x, y) in decorations.bold_edges:
                attributes.append("penwidth=2.5")
            suffix = f" [{', '.join(attributes)}]" if attributes else ""
            lines.append(f"  {x} -> {y}{suffix};")
    for polygon in decorations.polygons:
        lines.append(f"  // cell {' '.join(str(x) for x in polygon)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ── SVG ─────────────────────────────────────────────────────────────────

# matplotlib writes SVG sizes in points
_POINTS_PER_INCH = 72


def to_svg(
    diagram: Diagram,
    overlays: Sequence[Overlay] = (),
    *,
    config: RenderConfig | None = None,
) -> str:
    """SVG drawn with matplotlib on an Agg canvas.

    Every artist carries a gid (``cell-<k>``, ``cover-<x>-<y>``,
    ``element-<x>``, ``anchor-<x>``, ``label-<x>``), which the SVG backend
    writes out as the id of the artist's group.
    """
    config = config or active_config().render
    decorations = _decorate(diagram, overlays)
    placed = layout(diagram)
    radius, gap_x, gap_y = config.node_radius, config.column_gap, config.layer_gap
    margin = 3 * radius
    low = min(column for column, _ in placed)
    high = max(column for column, _ in placed)
    top_layer = max(layer for _, layer in placed)
    width = (high - low) * gap_x + 2 * margin
    height = top_layer * gap_y + 2 * margin

    def point(x: int) -> tuple[float, float]:
        column, layer = placed[x]
        return margin + (column - low) * gap_x, margin + layer * gap_y

    figure = Figure(figsize=(width / _POINTS_PER_INCH, height / _POINTS_PER_INCH))
    FigureCanvasAgg(figure)
    ax = figure.add_axes((0, 0, 1, 1))
    ax.set_xlim(0, width)
    ax.set_ylim(0, height)
    ax.set_axis_off()

    for index, polygon in enumerate(decorations.polygons):
        ax.add_patch(
            Polygon(
                [point(x) for x in polygon],
                closed=True,
                facecolor=_CELL_TINT,
                edgecolor="none",
                gid=f"cell-{index}",
                zorder=0,
            )
        )
    for x, y in diagram.covers():
        (x1, y1), (x2, y2) = point(x), point(y)
        ax.plot(
            [x1, x2],
            [y1, y2],
            color=decorations.edge_colors.get((x, y), "black"),
            linewidth=2.5 if (x, y) in decorations.bold_edges else 1,
            gid=f"cover-{x}-{y}",
            zorder=1,
        )
    for x in range(diagram.n):
        cx, cy = point(x)
        if x in decorations.filled:
            fill = "black"
        elif x in decorations.shaded:
            fill = _SHADE
        else:
            fill = "white"
        ax.plot(
            [cx],
            [cy],
            marker="o",
            markersize=2 * radius,
            markerfacecolor=fill,
            markeredgecolor="black",
            linestyle="none",
            gid=f"element-{x}",
            zorder=2,
        )
        if x in decorations.circled:
            ax.plot(
                [cx],
                [cy],
                marker="o",
                markersize=2 * (radius + 4),
                markerfacecolor="none",
                markeredgecolor="black",
                linestyle="none",
                gid=f"anchor-{x}",
                zorder=2,
            )
        ax.text(cx + radius + 2, cy + radius, str(x), fontsize=9, gid=f"label-{x}", zorder=3)

    buffer = io.StringIO()
    with matplotlib.rc_context({"svg.fonttype": "none", "svg.hashsalt": "latres"}):
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def render(diagram: Diagram, spec: RenderSpec, *, config: RenderConfig | None = None) -> str:
    logger.debug("render: %s with overlays %s", spec.format, ", ".join(map(str, spec.overlays)))
    if spec.format == "svg":
        return to_svg(diagram, spec.overlays, config=config)
    return to_dot(diagram, spec.overlays)
