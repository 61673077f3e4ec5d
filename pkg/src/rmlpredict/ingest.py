"""XLSX ingestion into the cell model.

The reader works directly on the package XML so that date-formatted numbers
keep their raw serial value next to the verbatim number-format string.
"""

from __future__ import annotations

import io
import posixpath
import re
import zipfile
from dataclasses import dataclass
from xml.etree import ElementTree as ET

from . import richtext
from .cells import Boolean, Cell, CellValue, Numeric, RichText, Sheet, Text, column_index

NS = {
    "m": "http://schemas.openxmlformats.org/spreadsheetml/2006/main",
    "r": "http://schemas.openxmlformats.org/officeDocument/2006/relationships",
    "pr": "http://schemas.openxmlformats.org/package/2006/relationships",
}
_OLE_MAGIC = b"\xd0\xcf\x11\xe0\xa1\xb1\x1a\xe1"

BUILTIN_FORMATS = {
    1: "0", 2: "0.00", 3: "#,##0", 4: "#,##0.00", 9: "0%", 10: "0.00%", 11: "0.00E+00",
    12: "# ?/?", 13: "# ??/??", 14: "mm-dd-yy", 15: "d-mmm-yy", 16: "d-mmm", 17: "mmm-yy",
    18: "h:mm AM/PM", 19: "h:mm:ss AM/PM", 20: "h:mm", 21: "h:mm:ss", 22: "m/d/yy h:mm",
    37: "#,##0 ;(#,##0)", 38: "#,##0 ;[Red](#,##0)", 39: "#,##0.00;(#,##0.00)",
    40: "#,##0.00;[Red](#,##0.00)", 45: "mm:ss", 46: "[h]:mm:ss", 47: "mmss.0",
    48: "##0.0E+0", 49: "@",
}

# legacy indexed palette entries that occur as font colors in practice
_INDEXED_COLORS = {
    0: "#000000", 1: "#ffffff", 2: "#ff0000", 3: "#00ff00", 4: "#0000ff", 5: "#ffff00",
    6: "#ff00ff", 7: "#00ffff", 8: "#000000", 9: "#ffffff", 10: "#ff0000", 11: "#00ff00",
    12: "#0000ff", 13: "#ffff00", 14: "#ff00ff", 15: "#00ffff", 16: "#800000", 17: "#008000",
    18: "#000080", 19: "#808000", 20: "#800080", 21: "#008080", 22: "#c0c0c0", 23: "#808080",
    64: None,
}


class IngestError(ValueError):
    pass


class UnsupportedFormatError(IngestError):
    pass


@dataclass(frozen=True)
class Workbook:
    sheets: tuple[Sheet, ...]

    def __post_init__(self):
        names = [s.name for s in self.sheets]
        if len(names) != len(set(names)):
            raise ValueError("sheet names must be unique")

    def sheet(self, name: str) -> Sheet:
        for s in self.sheets:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass(frozen=True)
class FormatRun:
    start: int
    end: int
    bold: bool = False
    italic: bool = False
    underline: bool = False
    strike: bool = False
    color: str | None = None

    @property
    def style(self) -> richtext.Style:
        emphasis = {t for t, on in zip(richtext.EMPHASIS_TAGS, (self.bold, self.italic, self.underline, self.strike)) if on}
        return richtext.Style(frozenset(emphasis), richtext.normalize_color(self.color))


def runs_to_html(text: str, runs: list[FormatRun]) -> str:
    """Render formatted runs as a fragment; tags nest font > b > i > u > strike."""
    if not runs:
        return richtext.escape(text)
    pos = 0
    parts = []
    for run in runs:
        if run.start < pos:
            raise ValueError(f"overlapping or unordered run at offset {run.start}")
        if run.start > pos:
            raise ValueError(f"runs leave a gap at offset {pos}")
        if run.end < run.start:
            raise ValueError(f"run ends before it starts at offset {run.start}")
        chunk = richtext.escape(text[run.start:run.end])
        style = run.style
        for tag in reversed(richtext.EMPHASIS_TAGS):
            if tag in style.emphasis:
                chunk = f"<{tag}>{chunk}</{tag}>"
        if style.color:
            chunk = f'<font color="{style.color}">{chunk}</font>'
        parts.append(chunk)
        pos = run.end
    if pos != len(text):
        raise ValueError(f"runs cover {pos} of {len(text)} characters")
    return "".join(parts)


# -- XLSX package reading ---------------------------------------------------

@dataclass(frozen=True)
class _Font:
    bold: bool = False
    italic: bool = False
    underline: bool = False
    strike: bool = False
    color: str | None = None


def _flag(el, name):
    child = el.find(f"m:{name}", NS)
    if child is None:
        return False
    val = child.get("val")
    if name == "u":
        return val != "none"
    return val not in ("0", "false")


def _color(el) -> str | None:
    c = el.find("m:color", NS)
    if c is None:
        return None
    if c.get("rgb"):
        rgb = c.get("rgb")[-6:]
        return "#" + rgb.lower() if re.fullmatch(r"[0-9A-Fa-f]{6}", rgb) else None
    if c.get("indexed") is not None:
        return _INDEXED_COLORS.get(int(c.get("indexed")))
    # theme colors are left unresolved and read as default text color
    return None


def _font(el) -> _Font:
    if el is None:
        return _Font()
    return _Font(_flag(el, "b"), _flag(el, "i"), _flag(el, "u"), _flag(el, "strike"), _color(el))


class _Styles:
    def __init__(self, root):
        self.formats: list[str | None] = []
        self.fonts: list[_Font] = []
        self._xf_fonts: list[int] = []
        custom = {}
        if root is None:
            return
        for nf in root.iterfind("m:numFmts/m:numFmt", NS):
            custom[int(nf.get("numFmtId"))] = nf.get("formatCode")
        self.fonts = [_font(f) for f in root.iterfind("m:fonts/m:font", NS)]
        for xf in root.iterfind("m:cellXfs/m:xf", NS):
            fid = int(xf.get("numFmtId", "0"))
            self.formats.append(custom.get(fid, BUILTIN_FORMATS.get(fid)))
            self._xf_fonts.append(int(xf.get("fontId", "0")))

    def number_format(self, style: int) -> str | None:
        return self.formats[style] if style < len(self.formats) else None

    def font(self, style: int) -> _Font:
        if style < len(self._xf_fonts):
            fid = self._xf_fonts[style]
            if fid < len(self.fonts):
                return self.fonts[fid]
        return _Font()


def _string_item(si) -> list[tuple[str, _Font | None]]:
    """Shared/inline string as (text, run font or None for cell font) pieces."""
    runs = si.findall("m:r", NS)
    if not runs:
        t = si.find("m:t", NS)
        return [((t.text or "") if t is not None else "", None)]
    pieces = []
    for r in runs:
        t = r.find("m:t", NS)
        props = r.find("m:rPr", NS)
        pieces.append(((t.text or "") if t is not None else "", _font(props) if props is not None else None))
    return pieces


def _text_value(pieces: list[tuple[str, _Font | None]], cell_font: _Font) -> CellValue:
    text = "".join(p for p, _ in pieces)
    runs = []
    pos = 0
    for piece, font in pieces:
        f = font or cell_font
        runs.append(FormatRun(pos, pos + len(piece), f.bold, f.italic, f.underline, f.strike, f.color))
        pos += len(piece)
    styles = {r.style for r in runs if r.end > r.start}
    if not any(s.formatted for s in styles):
        return Text(text)
    merged: list[FormatRun] = []
    for r in runs:
        if r.end == r.start:
            continue
        if merged and merged[-1].style == r.style:
            last = merged[-1]
            merged[-1] = FormatRun(last.start, r.end, last.bold, last.italic, last.underline, last.strike, last.color)
        else:
            merged.append(r)
    return RichText(runs_to_html(text, merged))


def _target(base_dir: str, target: str) -> str:
    if target.startswith("/"):
        return target.lstrip("/")
    return posixpath.normpath(posixpath.join(base_dir, target))


def _parse_xml(archive: zipfile.ZipFile, name: str):
    try:
        return ET.fromstring(archive.read(name))
    except KeyError:
        return None
    except ET.ParseError as exc:
        raise IngestError(f"corrupt XML in {name}: {exc}") from exc


def _read_sheet(root, name: str, shared: list, styles: _Styles) -> Sheet:
    cells = []
    width = height = 0
    for row_el in root.iterfind("m:sheetData/m:row", NS):
        for c in row_el.iterfind("m:c", NS):
            ref = c.get("r")
            match = re.fullmatch(r"([A-Z]+)(\d+)", ref or "")
            if not match:
                raise IngestError(f"sheet {name!r}: unsupported cell reference {ref!r}")
            col, row = column_index(match.group(1)), int(match.group(2)) - 1
            style = int(c.get("s", "0"))
            kind = c.get("t", "n")
            v = c.find("m:v", NS)
            raw = v.text if v is not None else None
            cell_font = styles.font(style)
            value: CellValue | None
            if kind == "s":
                if raw is None:
                    continue
                value = _text_value(shared[int(raw)], cell_font)
            elif kind == "inlineStr":
                is_el = c.find("m:is", NS)
                value = _text_value(_string_item(is_el), cell_font) if is_el is not None else None
            elif kind == "b":
                value = Boolean(raw == "1") if raw is not None else None
            elif kind in ("str", "e"):
                value = _text_value([(raw or "", None)], cell_font) if raw else None
            elif kind == "d":
                value = Text(raw) if raw else None
            else:
                if raw is None:
                    continue
                fmt = styles.number_format(style)
                value = Numeric(float(raw), None if fmt in (None, "General") else fmt)
            if value is None or (isinstance(value, Text) and value.content == ""):
                continue
            cells.append(Cell(col, row, value))
            width = max(width, col + 1)
            height = max(height, row + 1)
    return Sheet(name, width, height, tuple(cells))


def read_xlsx(data: bytes) -> Workbook:
    if data[:8] == _OLE_MAGIC:
        raise UnsupportedFormatError("encrypted or legacy binary workbook (OLE container) is not supported")
    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise IngestError(f"not an XLSX (ZIP) file: {exc}") from exc
    with archive:
        wb = _parse_xml(archive, "xl/workbook.xml")
        if wb is None:
            raise IngestError("missing xl/workbook.xml")
        rels = _parse_xml(archive, "xl/_rels/workbook.xml.rels")
        targets = {}
        if rels is not None:
            for rel in rels.iterfind("pr:Relationship", NS):
                targets[rel.get("Id")] = _target("xl", rel.get("Target"))
        styles = _Styles(_parse_xml(archive, "xl/styles.xml"))
        shared = []
        sst = _parse_xml(archive, "xl/sharedStrings.xml")
        if sst is not None:
            shared = [_string_item(si) for si in sst.iterfind("m:si", NS)]
        sheets = []
        for i, s in enumerate(wb.iterfind("m:sheets/m:sheet", NS)):
            rid = s.get(f"{{{NS['r']}}}id")
            path = targets.get(rid, f"xl/worksheets/sheet{i + 1}.xml")
            root = _parse_xml(archive, path)
            if root is None:
                raise IngestError(f"missing worksheet part {path}")
            sheets.append(_read_sheet(root, s.get("name"), shared, styles))
    return Workbook(tuple(sheets))


def read_path(path) -> Workbook:
    """Read an ``.xlsx`` workbook or a canonical ``.json`` sheet from disk."""
    from pathlib import Path

    from .cells import parse_canonical

    path = Path(path)
    if path.suffix.lower() == ".json":
        return Workbook((parse_canonical(path.read_text(encoding="utf-8")),))
    return read_xlsx(path.read_bytes())
