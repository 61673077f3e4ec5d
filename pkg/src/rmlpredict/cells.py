"""In-memory spreadsheet model and its canonical JSON interchange format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union


class CanonicalFormatError(ValueError):
    """Raised when a canonical sheet document cannot be parsed."""


class NoTableError(ValueError):
    pass


@dataclass(frozen=True)
class Blank:
    kind = "blank"


@dataclass(frozen=True)
class Boolean:
    flag: bool
    kind = "boolean"


@dataclass(frozen=True)
class Numeric:
    value: float
    data_format: str | None = None
    kind = "numeric"

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Text:
    content: str
    kind = "text"


@dataclass(frozen=True)
class RichText:
    """Partially formatted text as an HTML fragment (b, i, u, strike, font color)."""

    html: str
    kind = "richtext"


CellValue = Union[Blank, Boolean, Numeric, Text, RichText]

BLANK = Blank()


@dataclass(frozen=True)
class Cell:
    column: int
    row: int
    value: CellValue

    @property
    def coordinate(self) -> str:
        return f"{column_letter(self.column)}{self.row + 1}"


def column_letter(index: int) -> str:
    """0 -> A, 25 -> Z, 26 -> AA."""
    if index < 0:
        raise ValueError(f"negative column index {index}")
    letters = ""
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        letters = chr(65 + rem) + letters
    return letters


def column_index(letters: str) -> int:
    if not letters or not letters.isalpha() or not letters.isascii():
        raise ValueError(f"invalid column label {letters!r}")
    index = 0
    for ch in letters.upper():
        index = index * 26 + (ord(ch) - 64)
    return index - 1


@dataclass(frozen=True)
class Sheet:
    """A sparse grid. Coordinates not present in ``cells`` are blank."""

    name: str
    width: int
    height: int
    cells: tuple[Cell, ...] = ()

    def __post_init__(self):
        if self.width < 0 or self.height < 0:
            raise ValueError("sheet dimensions must be non-negative")
        kept = {}
        for cell in self.cells:
            if not (0 <= cell.column < self.width and 0 <= cell.row < self.height):
                raise ValueError(
                    f"cell {cell.column},{cell.row} outside {self.width}x{self.height} sheet {self.name!r}"
                )
            key = (cell.column, cell.row)
            if key in kept:
                raise ValueError(f"duplicate cell at column {cell.column}, row {cell.row}")
            kept[key] = cell
        ordered = tuple(
            kept[k] for k in sorted(kept, key=lambda k: (k[1], k[0])) if not isinstance(kept[k].value, Blank)
        )
        object.__setattr__(self, "cells", ordered)

    @cached_property
    def _index(self) -> dict[tuple[int, int], CellValue]:
        return {(c.column, c.row): c.value for c in self.cells}

    def value(self, column: int, row: int) -> CellValue:
        return self._index.get((column, row), BLANK)

    def cell(self, column: int, row: int) -> Cell:
        return Cell(column, row, self.value(column, row))

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)


@dataclass(frozen=True)
class Table:
    sheet: Sheet
    header_row: int
    entity_rows: tuple[int, ...]
    columns: tuple[int, ...]

    def header(self, column: int) -> str:
        from .predicates import cell_str

        return cell_str(self.sheet.value(column, self.header_row)).strip()

    def column_cells(self, column: int) -> list[Cell]:
        """Non-blank cells of one column, in entity-row order."""
        out = []
        for row in self.entity_rows:
            value = self.sheet.value(column, row)
            if not isinstance(value, Blank):
                out.append(Cell(column, row, value))
        return out


def extract_table(sheet: Sheet) -> Table:
    """Header is the first non-blank row; every later non-blank row is an entity."""
    rows = sorted({c.row for c in sheet.cells})
    if not rows:
        raise NoTableError(f"no table: sheet {sheet.name!r} is blank")
    columns = tuple(sorted({c.column for c in sheet.cells}))
    return Table(sheet=sheet, header_row=rows[0], entity_rows=tuple(rows[1:]), columns=columns)


# -- canonical format -------------------------------------------------------

_KIND_FIELDS = {
    "blank": set(),
    "boolean": {"value"},
    "numeric": {"value", "format"},
    "text": {"text"},
    "richtext": {"html"},
}
_REQUIRED = {"blank": set(), "boolean": {"value"}, "numeric": {"value"}, "text": {"text"}, "richtext": {"html"}}


def _fail(where: str, message: str):
    raise CanonicalFormatError(f"{where}: {message}")


def _parse_cell(entry, position: int) -> Cell:
    where = f"cells[{position}]"
    if not isinstance(entry, dict):
        _fail(where, "expected an object")
    for key in ("col", "row", "kind"):
        if key not in entry:
            _fail(where, f"missing field {key!r}")
    kind = entry["kind"]
    if kind not in _KIND_FIELDS:
        _fail(f"{where}.kind", f"unknown cell kind {kind!r}")
    extra = set(entry) - {"col", "row", "kind"} - _KIND_FIELDS[kind]
    if extra:
        _fail(where, f"unexpected field(s) {sorted(extra)} for kind {kind!r}")
    missing = _REQUIRED[kind] - set(entry)
    if missing:
        _fail(where, f"missing field(s) {sorted(missing)} for kind {kind!r}")
    col, row = entry["col"], entry["row"]
    for name, v in (("col", col), ("row", row)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            _fail(f"{where}.{name}", "expected a non-negative integer")

    value: CellValue
    if kind == "blank":
        value = BLANK
    elif kind == "boolean":
        if not isinstance(entry["value"], bool):
            _fail(f"{where}.value", "expected true or false")
        value = Boolean(entry["value"])
    elif kind == "numeric":
        number = entry["value"]
        if isinstance(number, bool) or not isinstance(number, (int, float)) or not math.isfinite(number):
            _fail(f"{where}.value", "expected a finite number")
        fmt = entry.get("format")
        if fmt is not None and not isinstance(fmt, str):
            _fail(f"{where}.format", "expected a string")
        value = Numeric(float(number), fmt)
    elif kind == "text":
        if not isinstance(entry["text"], str):
            _fail(f"{where}.text", "expected a string")
        value = Text(entry["text"])
    else:
        if not isinstance(entry["html"], str):
            _fail(f"{where}.html", "expected a string")
        value = RichText(entry["html"])
    return Cell(col, row, value)


def parse_canonical(document: str) -> Sheet:
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CanonicalFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        _fail("document", "expected a JSON object")
    unknown = set(data) - {"name", "width", "height", "cells"}
    if unknown:
        _fail("document", f"unexpected field(s) {sorted(unknown)}")
    for key in ("name", "width", "height", "cells"):
        if key not in data:
            _fail("document", f"missing field {key!r}")
    if not isinstance(data["name"], str):
        _fail("name", "expected a string")
    for key in ("width", "height"):
        if not isinstance(data[key], int) or isinstance(data[key], bool) or data[key] < 0:
            _fail(key, "expected a non-negative integer")
    if not isinstance(data["cells"], list):
        _fail("cells", "expected a list")
    cells = [_parse_cell(entry, i) for i, entry in enumerate(data["cells"])]
    try:
        return Sheet(data["name"], data["width"], data["height"], tuple(cells))
    except ValueError as exc:
        raise CanonicalFormatError(str(exc)) from exc


def _cell_json(cell: Cell) -> dict:
    v = cell.value
    out: dict = {"col": cell.column, "row": cell.row, "kind": v.kind}
    if isinstance(v, Boolean):
        out["value"] = v.flag
    elif isinstance(v, Numeric):
        out["value"] = v.value
        if v.data_format is not None:
            out["format"] = v.data_format
    elif isinstance(v, Text):
        out["text"] = v.content
    elif isinstance(v, RichText):
        out["html"] = v.html
    return out


def serialize_canonical(sheet: Sheet) -> str:
    """Deterministic rendering: one cell per line, row-major order, blanks omitted."""
    head = (
        "{\n"
        f'  "name": {json.dumps(sheet.name, ensure_ascii=False)},\n'
        f'  "width": {sheet.width},\n'
        f'  "height": {sheet.height},\n'
    )
    if not sheet.cells:
        return head + '  "cells": []\n}\n'
    lines = [json.dumps(_cell_json(c), ensure_ascii=False) for c in sheet.cells]
    return head + '  "cells": [\n    ' + ",\n    ".join(lines) + "\n  ]\n}\n"


def sheet_from_rows(name: str, rows: Iterable[Iterable[CellValue | str | float | bool | None]]) -> Sheet:
    """Convenience builder: plain Python values become the matching cell kinds."""
    cells = []
    width = height = 0
    for r, row in enumerate(rows):
        height = r + 1
        for c, raw in enumerate(row):
            width = max(width, c + 1)
            if raw is None:
                continue
            if isinstance(raw, (Blank, Boolean, Numeric, Text, RichText)):
                value = raw
            elif isinstance(raw, bool):
                value = Boolean(raw)
            elif isinstance(raw, (int, float)):
                value = Numeric(float(raw))
            else:
                value = Text(str(raw))
            cells.append(Cell(c, r, value))
    return Sheet(name, width, height, tuple(cells))
