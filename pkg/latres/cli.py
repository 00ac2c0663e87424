"""Command-line surface.

Every subcommand reads and writes latdiag text (``-`` is stdin/stdout) and is
a thin adapter over one library call. Exit codes: 0 success or a positive
verdict, 1 a negative verdict, 2 usage, precondition, parse or I/O errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from latres import __version__
from latres.census import census, save_census
from latres.diagram import Diagram, canonical_form, canonical_key, key_hash, validate_well_formed
from latres.errors import LatdiagParseError, NonTerminationError, PreconditionError, ResourceLimitError
from latres.gallery import grid
from latres.geometry import C2, C3, check_gk_criterion
from latres.latdiag import dumps_latdiag, dumps_trace, loads_latdiag
from latres.oracle import check_diagram
from latres.pipeline import (
    check_theorem,
    decide,
    find_nondiminishing_sequence,
    normalize,
)
from latres.render import RENDER_FORMATS, render, render_spec
from latres.schemes import anchors, rank, scheme
from latres.settings import SEED_METHODS
from latres.surgery import insert, resect

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

console = Console(highlight=False)
error_console = Console(stderr=True, highlight=False)

_KINDS = {"2": C2, "3": C3}

# ── Helpers ─────────────────────────────────────────────────────────────


def _read_diagram(source: str) -> Diagram:
    text = sys.stdin.read() if source == "-" else Path(source).read_text(encoding="utf-8")
    return loads_latdiag(text)


def _write_text(target: str, text: str) -> None:
    if target == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _verdict(ok: bool, message: str) -> int:
    style = "green" if ok else "red"
    console.print(Panel(message, border_style=style, expand=False))
    return EXIT_OK if ok else EXIT_NEGATIVE


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=error_console, show_path=False)],
        force=True,
    )


# ── Commands ────────────────────────────────────────────────────────────


def cmd_validate(args: argparse.Namespace) -> int:
    diagram = _read_diagram(args.file)
    report = validate_well_formed(diagram)
    if not report.ok:
        for violation in report.violations:
            console.print(f"violation: {violation}")
        return EXIT_NEGATIVE
    if not check_gk_criterion(diagram):
        return _verdict(False, "well-formed, but not slim semimodular (cell criterion fails)")
    return _verdict(True, f"slim semimodular diagram with {diagram.n} elements")


def cmd_oracle_check(args: argparse.Namespace) -> int:
    verdict = check_diagram(_read_diagram(args.file))
    table = Table(title="oracle")
    table.add_column("property")
    table.add_column("holds")
    for name in ("lattice", "semimodular", "slim", "distributive"):
        table.add_row(name, "yes" if getattr(verdict, name) else "no")
    console.print(table)
    return EXIT_OK if verdict.slim_semimodular else EXIT_NEGATIVE


def cmd_grid(args: argparse.Namespace) -> int:
    _write_text("-", dumps_latdiag(canonical_form(grid(args.m, args.n))))
    return EXIT_OK


def cmd_anchors(args: argparse.Namespace) -> int:
    diagram = _read_diagram(args.file)
    kind = _KINDS[args.kind]
    found = sorted(anchors(diagram, kind))
    if args.ranks and kind == C2:
        _write_text("-", "".join(f"{u}\t{rank(diagram, u)}\n" for u in found))
    else:
        _write_text("-", "".join(f"{u}\n" for u in found))
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    _write_text("-", f"{rank(_read_diagram(args.file), args.element)}\n")
    return EXIT_OK


def cmd_scheme(args: argparse.Namespace) -> int:
    diagram = _read_diagram(args.file)
    built = scheme(diagram, args.anchor, _KINDS[args.kind])

    def ids(elements: frozenset[int]) -> str:
        return " ".join(str(x) for x in sorted(elements))

    def links(wing) -> str:
        return " ".join("-".join(str(x) for x in link.elements) for link in wing.links)

    lines = [
        f"kind {built.kind}",
        f"anchor {built.anchor}",
        f"base {ids(built.base)}",
        f"interior {ids(built.interior)}",
        f"upper_boundary {ids(built.upper_boundary)}",
        f"lower_boundary {ids(built.lower_boundary)}",
        f"left_wing {links(built.left_wing)}",
        f"right_wing {links(built.right_wing)}",
    ]
    _write_text("-", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_resect(args: argparse.Namespace) -> int:
    result = resect(_read_diagram(args.file), args.anchor)
    _write_text(args.output, dumps_latdiag(canonical_form(result)))
    return EXIT_OK


def cmd_insert(args: argparse.Namespace) -> int:
    result = insert(_read_diagram(args.file), args.anchor)
    _write_text(args.output, dumps_latdiag(canonical_form(result)))
    return EXIT_OK


def cmd_normalize(args: argparse.Namespace) -> int:
    diagram = _read_diagram(args.file)
    try:
        trace = normalize(diagram)
    except NonTerminationError as exc:
        error_console.print(f"[red]normalize: {escape(str(exc))}[/red]")
        return EXIT_NEGATIVE
    if args.trace:
        header = [f"input {key_hash(canonical_key(diagram))}"]
        _write_text(args.trace, dumps_trace(trace.records, header=header))
    # the final diagram keeps the input's ids so the trace stays applicable
    _write_text(args.output, dumps_latdiag(trace.final))
    logger.info("cli: normalize took %d insertions", len(trace.steps))
    return EXIT_OK


def cmd_decide(args: argparse.Namespace) -> int:
    accepted = decide(_read_diagram(args.file))
    if accepted:
        return _verdict(True, "the insertion sequence ends in a distributive diagram")
    return _verdict(False, "the insertion sequence does not end in a distributive diagram")


def cmd_census(args: argparse.Namespace) -> int:
    store = census(args.max_size, method=args.method)
    save_census(store, Path(args.out))
    table = Table(title=f"census up to {args.max_size} elements")
    table.add_column("size", justify="right")
    table.add_column("classes", justify="right")
    for size, count in store.sizes().items():
        table.add_row(str(size), str(count))
    table.add_row("total", str(len(store)))
    console.print(table)
    return EXIT_OK


def cmd_check_theorem(args: argparse.Namespace) -> int:
    report = check_theorem(
        args.max_size,
        lattice_max=args.lattice_max,
        corruptions=args.corruptions,
        progress=lambda message: logger.info("cli: %s", message),
    )
    table = Table(title=f"checks over {report.corpus_size} diagrams")
    table.add_column("check")
    table.add_column("cases", justify="right")
    table.add_column("failures", justify="right")
    for check in report.checks:
        table.add_row(check.name, str(check.checked), str(len(check.failures)))
    console.print(table)
    stats = report.statistics
    console.print(
        f"insertion inclusions: {stats.equal} equal, {stats.strict} strict, {stats.pairs} pairs"
    )
    for check in report.checks:
        for failure in check.failures[:5]:
            error_console.print(f"{check.name}: {escape(failure)}")
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_search_nondim(args: argparse.Namespace) -> int:
    witness = find_nondiminishing_sequence(args.max_size, args.steps)
    if witness is None:
        return _verdict(False, f"no non-diminishing run of {args.steps} insertions found")
    counts = " ".join(str(count) for count in witness.counts)
    ranks = " ".join(str(level) for level in witness.ranks)
    choice = "minimal" if witness.follows_minimal_rank else "free"
    header = [
        f"start {key_hash(canonical_key(witness.start))}",
        f"counts {counts}",
        f"ranks {ranks}",
        f"choice {choice}",
    ]
    _write_text("-", dumps_trace(witness.records, header=header))
    if args.out:
        _write_text(args.out, dumps_latdiag(witness.start))
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    diagram = _read_diagram(args.file)
    spec = render_spec(args.format, args.overlay or ())
    _write_text(args.output, render(diagram, spec))
    return EXIT_OK


# ── Parser ──────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latres",
        description="Resections and insertions on slim semimodular lattice diagrams.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help: str, *, file: bool = True):
        sub = commands.add_parser(name, help=help)
        if file:
            sub.add_argument("file", nargs="?", default="-", help="latdiag file, - for stdin")
        sub.set_defaults(handler=handler)
        return sub

    command("validate", cmd_validate, "well-formedness and the cell criterion")
    command("oracle-check", cmd_oracle_check, "brute-force lattice predicates")

    sub = command("grid", cmd_grid, "the grid C_m x C_n", file=False)
    sub.add_argument("m", type=int)
    sub.add_argument("n", type=int)

    sub = command("anchors", cmd_anchors, "anchor ids, one per line")
    sub.add_argument("--kind", choices=sorted(_KINDS), default="2")
    sub.add_argument("--ranks", action="store_true", help="print ranks next to C2 anchors")

    sub = command("rank", cmd_rank, "rank of a C2 anchor")
    sub.add_argument("--element", type=int, required=True)

    sub = command("scheme", cmd_scheme, "base, interior and wings of a scheme")
    sub.add_argument("--anchor", type=int, required=True)
    sub.add_argument("--kind", choices=sorted(_KINDS), default="3")

    for name, handler, help in (
        ("resect", cmd_resect, "resection at a C3 anchor"),
        ("insert", cmd_insert, "insertion at a C2 anchor"),
    ):
        sub = command(name, handler, help)
        sub.add_argument("--anchor", type=int, required=True)
        sub.add_argument("-o", "--output", default="-")

    sub = command("normalize", cmd_normalize, "minimal-rank insertions down to a distributive diagram")
    sub.add_argument("--trace", help="write the insertion records here")
    sub.add_argument("-o", "--output", default="-")

    command("decide", cmd_decide, "slim semimodularity via the insertion sequence")

    sub = command("census", cmd_census, "resection closure of slim distributive diagrams", file=False)
    sub.add_argument("--max-size", type=int, required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--method", choices=SEED_METHODS, default=None)

    sub = command("check-theorem", cmd_check_theorem, "run every structural check", file=False)
    sub.add_argument("--max-size", type=int, required=True)
    sub.add_argument("--lattice-max", type=int, default=8)
    sub.add_argument("--corruptions", type=int, default=100)

    sub = command("search-nondim", cmd_search_nondim, "insertion runs that keep the N7 count", file=False)
    sub.add_argument("--max-size", type=int, required=True)
    sub.add_argument("--steps", type=int, required=True)
    sub.add_argument("--out", help="write the start diagram here")

    sub = command("render", cmd_render, "DOT or SVG picture")
    sub.add_argument("-o", "--output", default="-")
    sub.add_argument("--format", choices=RENDER_FORMATS, default="dot")
    sub.add_argument(
        "--overlay",
        action="append",
        help="cells, trajectories, anchors, scheme:<id> or stacked:<id>; repeatable",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR
    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except LatdiagParseError as exc:
        error_console.print(f"[red]parse error:[/red] {escape(str(exc))}")
    except (PreconditionError, ResourceLimitError) as exc:
        error_console.print(f"[red]error:[/red] {escape(str(exc))}")
    except OSError as exc:
        error_console.print(f"[red]io error:[/red] {escape(str(exc))}")
    return EXIT_ERROR
