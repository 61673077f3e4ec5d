"""Transformation functions invoked from object maps.

Every function is total on content: unparseable input yields ``None`` (or an
empty list) instead of raising. Only malformed rich-text HTML raises.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
import re
from dataclasses import dataclass, replace
from decimal import Decimal

from . import predicates as pr
from . import richtext
from .ahocorasick import Gazetteer
from .cells import Blank, Boolean, CellValue, Numeric, RichText, Text
from .rdf import IRI, XSD, XSD_STRING, Literal, Term

XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATE = XSD + "date"
XSD_DATETIME = XSD + "dateTime"

TRUE_TOKENS = ("true", "yes", "y", "x", "1", "ja", "j", "wahr", "t", "on", "+", "✓", "✔")
FALSE_TOKENS = ("false", "no", "n", "0", "nein", "falsch", "f", "off", "-", "✗")


class FunctionId(str, enum.Enum):
    PARSE_NUMBER = "parseNumber"
    PARSE_BOOLEAN = "parseBoolean"
    PARSE_DATE = "parseDate"
    PARSE_DATETIME = "parseDateTime"
    ENTITY_LINKING = "entityLinking"
    GET_ENTITIES_BY_TAG = "getEntitiesByTag"
    GET_ENTITIES_BY_COLOR = "getEntitiesByColor"
    GET_ENTITIES_BY_UNFORMATTED = "getEntitiesByUnformatted"


EXTRACTORS = {
    FunctionId.GET_ENTITIES_BY_TAG,
    FunctionId.GET_ENTITIES_BY_COLOR,
    FunctionId.GET_ENTITIES_BY_UNFORMATTED,
}


class Accessor(str, enum.Enum):
    VALUE = "value"
    VALUE_STRING = "valueString"
    VALUE_INT = "valueInt"
    VALUE_NUMERIC = "valueNumeric"
    VALUE_BOOLEAN = "valueBoolean"
    VALUE_RICH_TEXT = "valueRichText"
    JSON = "json"


class TermType(str, enum.Enum):
    IRI = "IRI"
    LITERAL = "Literal"


@dataclass(frozen=True)
class FunctionCall:
    function: FunctionId
    decimal_point: str = "."
    integer_only: bool = False
    multiple: bool = False
    true_tokens: tuple[str, ...] = ()
    false_tokens: tuple[str, ...] = ()
    day_first: bool = False
    gazetteer: Gazetteer | None = None
    tag: str | None = None
    color: str | None = None
    format_key: str | None = None
    inner: FunctionCall | None = None
    inner_accessor: Accessor | None = None
    inner_term_type: TermType | None = None
    inner_datatype: str | None = None

    def __post_init__(self):
        f = self.function
        if f is FunctionId.PARSE_NUMBER and self.decimal_point not in (".", ","):
            raise ValueError("decimalPoint must be '.' or ','")
        if f is FunctionId.PARSE_BOOLEAN:
            t = {s.casefold().strip() for s in self.true_tokens}
            if t & {s.casefold().strip() for s in self.false_tokens}:
                raise ValueError("true and false lexicons overlap")
        if f is FunctionId.ENTITY_LINKING and self.gazetteer is None:
            raise ValueError("entityLinking needs a gazetteer")
        if f is FunctionId.GET_ENTITIES_BY_TAG and self.tag not in richtext.EMPHASIS_TAGS:
            raise ValueError(f"unsupported tag {self.tag!r}")
        if f is FunctionId.GET_ENTITIES_BY_COLOR and not (self.color and re.fullmatch(r"#[0-9a-fA-F]{6}", self.color)):
            raise ValueError(f"invalid color {self.color!r}")
        if self.inner is not None and f not in EXTRACTORS:
            raise ValueError("only extraction functions take an inner call")


# -- number / boolean / date parsing -----------------------------------------

def _as_value(value) -> CellValue | None:
    if value is None or isinstance(value, Blank):
        return None
    if isinstance(value, str):
        return Text(value)
    return value


def canonical_decimal(d: Decimal) -> str:
    d = d.normalize()
    if d == 0:
        return "0.0"
    text = format(d, "f")
    return text if "." in text else text + ".0"


def _number_tokens(text: str, point: str) -> list[str]:
    group = "," if point == "." else "."
    rx = re.compile(
        rf"(?<![\d{re.escape(point)}{re.escape(group)}])[+-]?\d+(?:{re.escape(group)}\d{{3}})*(?:{re.escape(point)}\d+)?(?!\d)"
    )
    return rx.findall(text)


def _number_literal(token: str, point: str, integer_only: bool) -> Literal | None:
    group = "," if point == "." else "."
    body = token.replace(group, "")
    if point in body:
        if integer_only:
            return None
        return Literal(canonical_decimal(Decimal(body.replace(point, "."))), XSD_DECIMAL)
    return Literal(str(int(body)), XSD_INTEGER)


def parse_number_all(value, decimal_point: str = ".", integer_only: bool = False, multiple: bool = False) -> list[Literal]:
    value = _as_value(value)
    if isinstance(value, Numeric):
        if integer_only:
            if pr.dp(value.value) != 0:
                return []
            return [Literal(str(int(value.value)), XSD_INTEGER)]
        return [Literal(canonical_decimal(Decimal(repr(value.value))), XSD_DECIMAL)]
    if isinstance(value, RichText):
        value = Text(richtext.strip_tags(value.html))
    if not isinstance(value, Text):
        return []
    text = value.content.strip()
    if not multiple:
        if pr.is_int(text):
            return [Literal(str(int(text)), XSD_INTEGER)]
        if pr.is_dec(text, decimal_point):
            lit = _number_literal(text.lstrip("+"), decimal_point, integer_only)
            return [lit] if lit else []
    out = []
    for token in _number_tokens(text, decimal_point):
        lit = _number_literal(token, decimal_point, integer_only)
        if lit is not None:
            out.append(lit)
            if not multiple:
                break
        elif not multiple:
            break
    return out


def parse_number(value, decimal_point: str = ".", integer_only: bool = False) -> Literal | None:
    found = parse_number_all(value, decimal_point, integer_only)
    return found[0] if found else None


def parse_boolean(value, true_tokens=TRUE_TOKENS, false_tokens=FALSE_TOKENS) -> Literal | None:
    value = _as_value(value)
    if isinstance(value, Boolean):
        return Literal("true" if value.flag else "false", XSD_BOOLEAN)
    if isinstance(value, Numeric):
        if value.value == 1:
            return Literal("true", XSD_BOOLEAN)
        if value.value == 0:
            return Literal("false", XSD_BOOLEAN)
        return None
    if isinstance(value, RichText):
        value = Text(richtext.strip_tags(value.html))
    if not isinstance(value, Text):
        return None
    token = value.content.strip().casefold()
    if token in {t.strip().casefold() for t in true_tokens}:
        return Literal("true", XSD_BOOLEAN)
    if token in {t.strip().casefold() for t in false_tokens}:
        return Literal("false", XSD_BOOLEAN)
    return None


_EPOCH = dt.datetime(1899, 12, 31)


def serial_to_datetime(serial: float) -> dt.datetime | None:
    """Spreadsheet serial date (1900 system): day 1 is 1900-01-01.

    Serials from 61 on skip the fictitious 1900-02-29; the fraction is a share
    of a 24h day, rounded to whole seconds.
    """
    if not math.isfinite(serial) or serial < 0:
        return None
    days = math.floor(serial)
    seconds = math.floor((serial - days) * 86400 + 0.5)
    if days >= 61:
        days -= 1
    try:
        return _EPOCH + dt.timedelta(days=days, seconds=seconds)
    except OverflowError:
        return None


def _text_of(value) -> str | None:
    if isinstance(value, Text):
        return value.content
    if isinstance(value, RichText):
        return richtext.strip_tags(value.html)
    return None


def parse_date(value, day_first: bool = False) -> Literal | None:
    value = _as_value(value)
    if isinstance(value, Numeric):
        moment = serial_to_datetime(value.value)
        return Literal(moment.date().isoformat(), XSD_DATE) if moment else None
    text = _text_of(value)
    if text is None:
        return None
    found = pr.find_date(text, day_first_slash=day_first)
    return Literal(found.isoformat(), XSD_DATE) if found else None


def parse_datetime(value, day_first: bool = False) -> Literal | None:
    value = _as_value(value)
    if isinstance(value, Numeric):
        moment = serial_to_datetime(value.value)
        return Literal(moment.strftime("%Y-%m-%dT%H:%M:%S"), XSD_DATETIME) if moment else None
    text = _text_of(value)
    if text is None:
        return None
    found = pr.find_datetime(text, day_first_slash=day_first)
    return Literal(found.strftime("%Y-%m-%dT%H:%M:%S"), XSD_DATETIME) if found else None


def entity_linking(text, gazetteer: Gazetteer) -> list[IRI]:
    value = _as_value(text)
    content = _text_of(value) if value is not None else None
    if not content:
        return []
    return [IRI(iri) for iri in gazetteer.link(content)]


# -- rich-text extraction ------------------------------------------------------

def extract_spans(value, function: FunctionId, tag: str | None = None, color: str | None = None,
                  format_key: str | None = None) -> list[CellValue]:
    """Pieces of a cell selected by an extraction function, before any inner call.

    With ``format_key`` only segments with exactly that formatting combination
    are returned, so the groups of one column never overlap. Non-rich cells
    count as wholly unformatted.
    """
    value = _as_value(value)
    if value is None:
        return []
    unformatted_mode = function is FunctionId.GET_ENTITIES_BY_UNFORMATTED
    if not isinstance(value, RichText):
        wants_plain = format_key == richtext.UNFORMATTED if format_key else unformatted_mode
        if not wants_plain:
            return []
        if isinstance(value, Text):
            text = value.content.strip()
            return [Text(text)] if text else []
        return [value]
    if format_key is not None:
        pieces = [t for t, style in richtext.segments(value.html) if style.key == format_key]
    elif function is FunctionId.GET_ENTITIES_BY_TAG:
        pieces = richtext.elements(value.html, tag=tag)
    elif function is FunctionId.GET_ENTITIES_BY_COLOR:
        pieces = richtext.elements(value.html, color=color)
    else:
        pieces = [t for t, style in richtext.segments(value.html) if not style.formatted]
    return [Text(p.strip()) for p in pieces if p.strip()]


def _extract(value, call: FunctionCall) -> list[Term]:
    out: list[Term] = []
    for span in extract_spans(value, call.function, call.tag, call.color, call.format_key):
        if call.inner is None and call.inner_accessor is None:
            out.append(Literal(pr.cell_str(span), XSD_STRING))
            continue
        out.extend(
            object_terms(
                span,
                call.inner_accessor or Accessor.JSON,
                call.inner,
                call.inner_term_type or TermType.LITERAL,
                call.inner_datatype,
            )
        )
    return out


def get_entities_by_tag(html: str, tag: str, inner: FunctionCall | None = None) -> list[Term]:
    return _extract(RichText(html), FunctionCall(FunctionId.GET_ENTITIES_BY_TAG, tag=tag, inner=inner))


def get_entities_by_color(html: str, color: str, inner: FunctionCall | None = None) -> list[Term]:
    return _extract(RichText(html), FunctionCall(FunctionId.GET_ENTITIES_BY_COLOR, color=color, inner=inner))


def get_entities_by_unformatted(html: str, inner: FunctionCall | None = None) -> list[Term]:
    return _extract(RichText(html), FunctionCall(FunctionId.GET_ENTITIES_BY_UNFORMATTED, inner=inner))


def apply(call: FunctionCall, value) -> list[Term]:
    """Run a call; ``None`` results become an empty list."""
    f = call.function
    if f is FunctionId.PARSE_NUMBER:
        return list(parse_number_all(value, call.decimal_point, call.integer_only, call.multiple))
    if f is FunctionId.PARSE_BOOLEAN:
        if call.true_tokens or call.false_tokens:
            result = parse_boolean(value, call.true_tokens, call.false_tokens)
        else:
            result = parse_boolean(value)
    elif f is FunctionId.PARSE_DATE:
        result = parse_date(value, call.day_first)
    elif f is FunctionId.PARSE_DATETIME:
        result = parse_datetime(value, call.day_first)
    elif f is FunctionId.ENTITY_LINKING:
        return list(entity_linking(value, call.gazetteer))
    else:
        return _extract(value, call)
    return [result] if result is not None else []


# -- accessors -----------------------------------------------------------------

def project(accessor: Accessor, value: CellValue) -> CellValue | None:
    """Resolve a reference accessor on one cell; kind mismatches give ``None``."""
    if value is None or isinstance(value, Blank):
        return None
    if accessor is Accessor.VALUE:
        text = pr.cell_str(value)
        return Text(text) if text else None
    if accessor is Accessor.VALUE_STRING:
        if isinstance(value, Text):
            return value if value.content else None
        if isinstance(value, RichText):
            return Text(richtext.strip_tags(value.html))
        return None
    if accessor is Accessor.VALUE_INT:
        return value if isinstance(value, Numeric) and pr.dp(value.value) == 0 else None
    if accessor is Accessor.VALUE_NUMERIC:
        return value if isinstance(value, Numeric) else None
    if accessor is Accessor.VALUE_BOOLEAN:
        return value if isinstance(value, Boolean) else None
    return value


def _lexical(value: CellValue, datatype: str | None) -> str:
    if isinstance(value, Numeric):
        if datatype == XSD_INTEGER and float(value.value).is_integer():
            return str(int(value.value))
        if datatype == XSD_DECIMAL:
            return canonical_decimal(Decimal(repr(value.value)))
    return pr.cell_str(value)


def object_terms(value: CellValue, accessor: Accessor, call: FunctionCall | None,
                 term_type: TermType, datatype: str | None) -> list[Term]:
    """Objects an object map yields for one cell value (empty when it does not apply)."""
    projected = project(accessor, value)
    if projected is None:
        return []
    if call is None:
        lexical = _lexical(projected, datatype)
        if term_type is TermType.IRI:
            return [IRI(lexical)] if lexical else []
        return [Literal(lexical, datatype or XSD_STRING)]
    out: list[Term] = []
    for result in apply(call, projected):
        if term_type is TermType.IRI:
            if isinstance(result, IRI):
                out.append(result)
        elif isinstance(result, Literal):
            out.append(replace(result, datatype=datatype) if datatype else result)
    return out
