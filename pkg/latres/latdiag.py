from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Sequence

from latres.diagram import Diagram
from latres.errors import LatdiagParseError
from latres.surgery import SURGERY_OPS, SurgeryRecord

LATDIAG_VERSION = 1
LATDIAG_SUFFIX = ".latdiag"

_COVER_LINE_RE = re.compile(r"^([ul])\s+(\d+)\s*:\s*(.*)$")
_RECORD_LINE_RE = re.compile(
    r"^(?P<op>[a-z_]+)\s+(?P<anchor>\d+)\s+removed=\[(?P<removed>[\d,\s]*)\]\s+added=(?P<added>\d+)$"
)


def dumps_latdiag(diagram: Diagram) -> str:
    lines = [f"latdiag {LATDIAG_VERSION}", f"n {diagram.n}"]
    for prefix, lists in (("u", diagram.upper), ("l", diagram.lower)):
        for x, row in enumerate(lists):
            ids = " ".join(str(y) for y in row)
            lines.append(f"{prefix} {x}: {ids}".rstrip())
    return "\n".join(lines) + "\n"


def loads_latdiag(text: str) -> Diagram:
    numbered = [
        (number, line.strip())
        for number, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]
    if not numbered:
        raise LatdiagParseError(1, "empty input")

    number, header = numbered[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "latdiag":
        raise LatdiagParseError(number, f"expected 'latdiag {LATDIAG_VERSION}', got {header!r}")
    if parts[1] != str(LATDIAG_VERSION):
        raise LatdiagParseError(number, f"unsupported latdiag version {parts[1]!r}")

    if len(numbered) < 2:
        raise LatdiagParseError(number + 1, "missing 'n <count>' line")
    number, size_line = numbered[1]
    parts = size_line.split()
    if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
        raise LatdiagParseError(number, f"expected 'n <count>', got {size_line!r}")
    n = int(parts[1])

    lists: dict[str, list[tuple[int, ...] | None]] = {"u": [None] * n, "l": [None] * n}
    for number, line in numbered[2:]:
        match = _COVER_LINE_RE.match(line)
        if match is None:
            raise LatdiagParseError(number, f"expected 'u <i>: ids' or 'l <i>: ids', got {line!r}")
        kind, raw_index, raw_ids = match.groups()
        index = int(raw_index)
        if index >= n:
            raise LatdiagParseError(number, f"element {index} out of range for n={n}")
        if lists[kind][index] is not None:
            raise LatdiagParseError(number, f"duplicate '{kind}' line for element {index}")
        ids = _parse_ids(raw_ids, number)
        for y in ids:
            if y >= n:
                raise LatdiagParseError(number, f"cover {y} out of range for n={n}")
        if len(set(ids)) != len(ids):
            raise LatdiagParseError(number, f"duplicate id in cover list of element {index}")
        lists[kind][index] = ids

    end = numbered[-1][0] + 1
    for kind in ("u", "l"):
        missing = [x for x, row in enumerate(lists[kind]) if row is None]
        if missing:
            raise LatdiagParseError(end, f"missing '{kind}' line for element {missing[0]}")

    return Diagram(tuple(lists["u"]), tuple(lists["l"]))  # type: ignore[arg-type]


def _parse_ids(raw_ids: str, number: int) -> tuple[int, ...]:
    tokens = raw_ids.split()
    if not all(token.isdigit() for token in tokens):
        raise LatdiagParseError(number, f"non-numeric id in {raw_ids!r}")
    return tuple(int(token) for token in tokens)


def save_latdiag(diagram: Diagram, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_latdiag(diagram), encoding="utf-8")


def load_latdiag(path: Path) -> Diagram:
    return loads_latdiag(path.read_text(encoding="utf-8"))


# ── Trace lines ─────────────────────────────────────────────────────────


def format_record(record: SurgeryRecord) -> str:
    removed = ",".join(str(x) for x in sorted(record.removed))
    return f"{record.op} {record.anchor} removed=[{removed}] added={record.added}"


def parse_record(line: str, *, line_number: int = 1) -> SurgeryRecord:
    match = _RECORD_LINE_RE.match(line.strip())
    if match is None:
        raise LatdiagParseError(line_number, f"malformed trace line {line.strip()!r}")
    op = match.group("op")
    if op not in SURGERY_OPS:
        raise LatdiagParseError(line_number, f"unknown surgery op {op!r}")
    removed = frozenset(
        int(token) for token in match.group("removed").replace(",", " ").split()
    )
    return SurgeryRecord(
        op=op,
        anchor=int(match.group("anchor")),
        removed=removed,
        added=int(match.group("added")),
    )


def dumps_trace(records: Iterable[SurgeryRecord], *, header: Sequence[str] = ()) -> str:
    lines = list(header) + [format_record(record) for record in records]
    return "\n".join(lines) + "\n" if lines else ""


def loads_trace(text: str) -> tuple[list[str], list[SurgeryRecord]]:
    """Split trace text into header lines (non-record lines before the first record) and records."""
    header: list[str] = []
    records: list[SurgeryRecord] = []
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if not records and _RECORD_LINE_RE.match(stripped) is None:
            header.append(stripped)
            continue
        records.append(parse_record(stripped, line_number=number))
    return header, records
