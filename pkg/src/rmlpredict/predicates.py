"""Auxiliary functions and predicates the template heuristics are built on."""

from __future__ import annotations

import datetime as dt
import enum
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Sequence

from . import richtext
from .cells import Blank, Boolean, Cell, CellValue, Numeric, RichText, Text

DP_CAP = 10


# -- numbers -----------------------------------------------------------------

def _shortest_decimal(value: float) -> Decimal:
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {value!r}")
    return Decimal(repr(float(value)))


def dp(value: float) -> int:
    """Decimal places of the shortest round-trip rendering, capped at 10."""
    exponent = _shortest_decimal(value).normalize().as_tuple().exponent
    return min(max(0, -exponent), DP_CAP)


def format_number(value: float) -> str:
    """Shortest round-trip rendering without exponent; integral values drop ``.0``."""
    d = _shortest_decimal(value).normalize()
    if d == 0:
        return "0"
    text = format(d, "f")
    return text


# -- data formats ------------------------------------------------------------

class DataFormatType(enum.Enum):
    DATE = "Date"
    DATETIME = "DateTime"
    BOOLEAN_DISPLAY = "BooleanDisplay"
    OTHER = "Other"


def _split_sections(fmt: str) -> list[str]:
    sections, buf, quoted, i = [], [], False, 0
    while i < len(fmt):
        ch = fmt[i]
        if ch == '"':
            quoted = not quoted
        elif ch == "\\" and not quoted and i + 1 < len(fmt):
            buf.append(fmt[i:i + 2])
            i += 2
            continue
        elif ch == ";" and not quoted:
            sections.append("".join(buf))
            buf = []
            i += 1
            continue
        buf.append(ch)
        i += 1
    sections.append("".join(buf))
    return sections


def _unquoted(section: str) -> tuple[str, bool]:
    """Format codes with literals, escapes, padding and fill removed.

    Returns the residue and whether the section contained any literal text.
    """
    out, literal, i = [], False, 0
    while i < len(section):
        ch = section[i]
        if ch == '"':
            end = section.find('"', i + 1)
            end = len(section) if end < 0 else end
            literal = literal or end > i + 1
            i = end + 1
            continue
        if ch in "\\_*" and i + 1 < len(section):
            literal = literal or ch == "\\"
            i += 2
            continue
        if ch == "[":
            end = section.find("]", i)
            end = len(section) if end < 0 else end
            token = section[i + 1:end].lower()
            # elapsed-time brackets keep their meaning, colors and locales do not
            if token and set(token) <= set("hms"):
                out.append(token)
            i = end + 1
            continue
        out.append(ch)
        i += 1
    return "".join(out), literal


def classify_format(fmt: str | None, boolean_display: bool = True) -> DataFormatType:
    if not fmt or fmt.strip().lower() == "general":
        return DataFormatType.OTHER
    sections = _split_sections(fmt)
    if boolean_display and 2 <= len(sections) <= 4:
        stripped = [_unquoted(s) for s in sections]
        if all(not residue.strip() for residue, _ in stripped) and any(lit for _, lit in stripped):
            return DataFormatType.BOOLEAN_DISPLAY
    residue, _ = _unquoted(sections[0])
    lowered = residue.lower()
    has_ampm = "am/pm" in lowered or "a/p" in lowered
    lowered = lowered.replace("am/pm", "").replace("a/p", "")
    has_date = any(t in lowered for t in "dmy")
    has_time = has_ampm or "h" in lowered or "s" in lowered
    if has_date and has_time:
        return DataFormatType.DATETIME
    if has_date:
        return DataFormatType.DATE
    if has_time:
        return DataFormatType.DATETIME
    return DataFormatType.OTHER


def df(cell: Cell | Numeric, boolean_display: bool = True) -> DataFormatType:
    value = cell.value if isinstance(cell, Cell) else cell
    if not isinstance(value, Numeric):
        raise TypeError("df is defined for numeric cells only")
    return classify_format(value.data_format, boolean_display)


# -- strings -----------------------------------------------------------------

def cell_str(value: Cell | CellValue | str) -> str:
    if isinstance(value, Cell):
        value = value.value
    if isinstance(value, str):
        return value
    if isinstance(value, Text):
        return value.content
    if isinstance(value, Boolean):
        return "true" if value.flag else "false"
    if isinstance(value, Numeric):
        return format_number(value.value)
    if isinstance(value, RichText):
        return richtext.strip_tags(value.html)
    return ""


_TOKEN = re.compile(r"(?:[^\W_]|(?<=\d)\.(?=\d))+")


def sep_tokens(text: str) -> list[str]:
    """Separated substrings in order of appearance (duplicates kept)."""
    return _TOKEN.findall(text)


def sep(text: str) -> set[str]:
    return set(sep_tokens(text))


_INT = re.compile(r"[+-]?\d+")


def is_int(text: str) -> bool:
    return bool(_INT.fullmatch(text.strip()))


def _dec_pattern(point: str) -> re.Pattern:
    if point not in (".", ","):
        raise ValueError(f"decimal point must be '.' or ',', got {point!r}")
    group = "," if point == "." else "."
    return re.compile(rf"[+-]?(?:\d{{1,3}}(?:{re.escape(group)}\d{{3}})+|\d*){re.escape(point)}\d+")


_DEC = {p: _dec_pattern(p) for p in ".,"}


def is_dec(text: str, point: str = ".") -> bool:
    if point not in _DEC:
        raise ValueError(f"decimal point must be '.' or ',', got {point!r}")
    return bool(_DEC[point].fullmatch(text.strip()))


# -- dates -------------------------------------------------------------------

MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6, "july": 7,
    "august": 8, "september": 9, "october": 10, "november": 11, "december": 12,
    "januar": 1, "februar": 2, "märz": 3, "maerz": 3, "mai": 5, "juni": 6, "juli": 7,
    "oktober": 10, "dezember": 12,
    "jan": 1, "feb": 2, "mar": 3, "mär": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "okt": 10, "nov": 11, "dec": 12, "dez": 12,
}
_MONTH_NAMES = "|".join(sorted(MONTHS, key=len, reverse=True))

_DATE_PATTERNS = [
    ("iso", r"(?P<y>\d{4})-(?P<m>\d{2})-(?P<d>\d{2})"),
    ("slash", r"(?P<a>\d{1,2})/(?P<b>\d{1,2})/(?P<y>\d{4})"),
    ("dot", r"(?P<d>\d{1,2})\.(?P<m>\d{1,2})\.(?P<y>\d{4}|\d{2})"),
    ("en_name", rf"(?P<mn>{_MONTH_NAMES})\.? (?P<d>\d{{1,2}}),? (?P<y>\d{{4}})"),
    ("de_name", rf"(?P<d>\d{{1,2}})\. ?(?P<mn>{_MONTH_NAMES})\.? (?P<y>\d{{4}})"),
]
_TIME = r"(?P<H>\d{1,2}):(?P<M>\d{2})(?::(?P<S>\d{2}))?(?:\s*(?P<ampm>[AaPp][Mm]))?"
_DATE_SEP = r"(?:T|,?\s+)"


def _compile(body: str, whole: bool) -> re.Pattern:
    if whole:
        return re.compile(body, re.IGNORECASE)
    return re.compile(rf"(?<![\w.]){body}(?![\w])", re.IGNORECASE)


_DATE_RES = {
    whole: [(name, _compile(p, whole)) for name, p in _DATE_PATTERNS] for whole in (True, False)
}
_DATETIME_RES = {
    whole: [(name, _compile(p + _DATE_SEP + _TIME, whole)) for name, p in _DATE_PATTERNS] for whole in (True, False)
}


def _year(text: str) -> int:
    year = int(text)
    if len(text) == 2:
        year += 2000 if year < 69 else 1900
    return year


def _date_from(name: str, m: re.Match, day_first_slash: bool) -> dt.date | None:
    g = m.groupdict()
    try:
        if name == "slash":
            a, b = int(g["a"]), int(g["b"])
            month, day = (b, a) if day_first_slash else (a, b)
            return dt.date(int(g["y"]), month, day)
        month = MONTHS[g["mn"].lower()] if g.get("mn") else int(g["m"])
        return dt.date(_year(g["y"]), month, int(g["d"]))
    except ValueError:
        return None


def _time_from(m: re.Match) -> dt.time | None:
    hour, minute, second = int(m["H"]), int(m["M"]), int(m["S"] or 0)
    ampm = m["ampm"]
    if ampm:
        if not 1 <= hour <= 12:
            return None
        hour = hour % 12 + (12 if ampm.lower() == "pm" else 0)
    try:
        return dt.time(hour, minute, second)
    except ValueError:
        return None


def find_date(text: str, whole: bool = False, day_first_slash: bool = False) -> dt.date | None:
    """First date in ``text``; with ``whole`` the entire string must be one date.

    Datetimes also yield their date when searching inside text.
    """
    text = text.strip()
    hits = []
    for name, rx in _DATE_RES[whole]:
        for m in (rx.finditer(text) if not whole else filter(None, [rx.fullmatch(text)])):
            value = _date_from(name, m, day_first_slash)
            if value is not None:
                hits.append((m.start(), value))
                break
    return min(hits, key=lambda h: h[0])[1] if hits else None


def find_datetime(text: str, whole: bool = False, day_first_slash: bool = False) -> dt.datetime | None:
    text = text.strip()
    hits = []
    for name, rx in _DATETIME_RES[whole]:
        for m in (rx.finditer(text) if not whole else filter(None, [rx.fullmatch(text)])):
            day = _date_from(name, m, day_first_slash)
            clock = _time_from(m)
            if day is not None and clock is not None:
                hits.append((m.start(), dt.datetime.combine(day, clock)))
                break
    return min(hits, key=lambda h: h[0])[1] if hits else None


def is_date(text: str, day_first_slash: bool = False) -> bool:
    return find_date(text, whole=True, day_first_slash=day_first_slash) is not None


def is_datetime(text: str, day_first_slash: bool = False) -> bool:
    return find_datetime(text, whole=True, day_first_slash=day_first_slash) is not None


# -- duplication degree --------------------------------------------------------

def _dup(strings: Sequence[str], always_distinct: int) -> Fraction:
    size = len(strings) + always_distinct
    if size <= 1:
        return Fraction(0)
    freq = Counter(strings)
    unique = sum(1 for s in strings if freq[s] == 1) + always_distinct
    distinct = len(freq) + always_distinct
    return Fraction(2 * size - unique - distinct + 1, 2 * size)


def dup_exact(cells: Iterable[Cell | CellValue]) -> Fraction:
    strings, others = [], 0
    for c in cells:
        v = c.value if isinstance(c, Cell) else c
        if isinstance(v, Blank):
            continue
        if isinstance(v, (Numeric, Boolean)):
            others += 1
        else:
            strings.append(cell_str(v))
    return _dup(strings, others)


def dup(cells: Iterable[Cell | CellValue]) -> float:
    """Degree of duplication; numeric and boolean cells always count as distinct."""
    return float(dup_exact(cells))


def dup_multiset_exact(values: Iterable[str], always_distinct: int = 0) -> Fraction:
    return _dup(list(values), always_distinct)


def dup_multiset(values: Iterable[str], always_distinct: int = 0) -> float:
    return float(dup_multiset_exact(values, always_distinct))


# -- column partition ------------------------------------------------------------

@dataclass(frozen=True)
class ColumnPartition:
    """Non-blank cells of a column split into booleans, numerics, strings and formatted cells."""

    cells: tuple[Cell, ...]
    booleans: tuple[Cell, ...] = field(init=False)
    numerics: tuple[Cell, ...] = field(init=False)
    strings: tuple[Cell, ...] = field(init=False)
    formatted: tuple[Cell, ...] = field(init=False)
    substrings: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        cells = tuple(c for c in self.cells if not isinstance(c.value, Blank))
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "booleans", tuple(c for c in cells if isinstance(c.value, Boolean)))
        object.__setattr__(self, "numerics", tuple(c for c in cells if isinstance(c.value, Numeric)))
        object.__setattr__(self, "strings", tuple(c for c in cells if isinstance(c.value, Text)))
        object.__setattr__(self, "formatted", tuple(c for c in cells if isinstance(c.value, RichText)))
        subs = []
        for c in self.strings:
            # each cell contributes its distinct tokens once
            subs.extend(dict.fromkeys(sep_tokens(c.value.content)))
        object.__setattr__(self, "substrings", tuple(subs))

    def __len__(self):
        return len(self.cells)
