"""Object-map templates, their heuristics, and per-column prediction trees."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence
from urllib.parse import quote

from . import predicates as pr
from . import richtext
from .ahocorasick import Gazetteer
from .cells import Boolean, Cell, Numeric, RichText, Table, Text
from .functions import (
    FALSE_TOKENS,
    TRUE_TOKENS,
    XSD_BOOLEAN,
    XSD_DATE,
    XSD_DATETIME,
    XSD_DECIMAL,
    XSD_INTEGER,
    Accessor,
    FunctionCall,
    FunctionId,
    TermType,
    object_terms,
)
from .rdf import XSD_STRING

DataFormatType = pr.DataFormatType


class TemplateId(str, enum.Enum):
    FORMATTED_TEXT = "FormattedText"
    INTEGER_AS_STRING = "IntegerAsString"
    DECIMAL_AS_STRING_POINT = "DecimalAsStringPoint"
    DECIMAL_AS_STRING_COMMA = "DecimalAsStringComma"
    DATE_AS_STRING = "DateAsString"
    DATETIME_AS_STRING = "DateTimeAsString"
    INTEGER_LIST_AS_STRING = "IntegerListAsString"
    BOOLEAN_AS_STRING = "BooleanAsString"
    STRING = "String"
    SINGLE_ENTITY = "SingleEntity"
    MULTIPLE_ENTITIES = "MultipleEntities"
    NATIVE_BOOLEAN = "NativeBoolean"
    NATIVE_INTEGER = "NativeInteger"
    NATIVE_DECIMAL = "NativeDecimal"
    NUMERIC_WITH_DATA_FORMAT = "NumericWithDataFormat"


@dataclass(frozen=True)
class TemplateSpec:
    id: TemplateId
    rank: int | None
    accessor: Accessor
    term_type: TermType | None
    datatype: str | None
    function: FunctionId | None
    order: int


def _spec_table() -> dict[TemplateId, TemplateSpec]:
    T, L, I = TemplateId, TermType.LITERAL, TermType.IRI
    rows = [
        (T.FORMATTED_TEXT, None, Accessor.VALUE_RICH_TEXT, None, None, None),
        (T.INTEGER_AS_STRING, 2, Accessor.JSON, L, XSD_INTEGER, FunctionId.PARSE_NUMBER),
        (T.DECIMAL_AS_STRING_POINT, 1, Accessor.JSON, L, XSD_DECIMAL, FunctionId.PARSE_NUMBER),
        (T.DECIMAL_AS_STRING_COMMA, 1, Accessor.JSON, L, XSD_DECIMAL, FunctionId.PARSE_NUMBER),
        (T.DATE_AS_STRING, 2, Accessor.JSON, L, XSD_DATE, FunctionId.PARSE_DATE),
        (T.DATETIME_AS_STRING, 3, Accessor.JSON, L, XSD_DATETIME, FunctionId.PARSE_DATETIME),
        (T.INTEGER_LIST_AS_STRING, 0, Accessor.JSON, L, XSD_INTEGER, FunctionId.PARSE_NUMBER),
        (T.BOOLEAN_AS_STRING, 4, Accessor.JSON, L, XSD_BOOLEAN, FunctionId.PARSE_BOOLEAN),
        (T.STRING, 0, Accessor.VALUE, L, XSD_STRING, None),
        (T.SINGLE_ENTITY, 3, Accessor.VALUE_STRING, I, None, FunctionId.ENTITY_LINKING),
        (T.MULTIPLE_ENTITIES, 4, Accessor.VALUE_STRING, I, None, FunctionId.ENTITY_LINKING),
        (T.NATIVE_BOOLEAN, 0, Accessor.VALUE_BOOLEAN, L, XSD_BOOLEAN, None),
        (T.NATIVE_INTEGER, 3, Accessor.VALUE_INT, L, XSD_INTEGER, None),
        (T.NATIVE_DECIMAL, 4, Accessor.VALUE_NUMERIC, L, XSD_DECIMAL, None),
        # datatype and function depend on the winning data format type
        (T.NUMERIC_WITH_DATA_FORMAT, 5, Accessor.JSON, L, XSD_DATE, FunctionId.PARSE_DATE),
    ]
    return {row[0]: TemplateSpec(*row, order=i) for i, row in enumerate(rows)}


TEMPLATES = _spec_table()

_FORMAT_FUNCTIONS = {
    DataFormatType.DATE: (FunctionId.PARSE_DATE, XSD_DATE),
    DataFormatType.DATETIME: (FunctionId.PARSE_DATETIME, XSD_DATETIME),
    DataFormatType.BOOLEAN_DISPLAY: (FunctionId.PARSE_BOOLEAN, XSD_BOOLEAN),
}


@dataclass(frozen=True)
class PredictionOptions:
    bool_length_threshold: float = 3.5
    true_tokens: tuple[str, ...] = TRUE_TOKENS
    false_tokens: tuple[str, ...] = FALSE_TOKENS
    boolean_display: bool = True
    day_first: bool = False
    entity_namespace: str = "http://example.org/entity/"
    gazetteer: Gazetteer | None = None


@dataclass(frozen=True)
class TemplateScore:
    template: TemplateSpec
    score: Fraction
    covered: tuple[int, ...]
    call: FunctionCall | None
    datatype: str | None
    data_format: DataFormatType | None = None

    @property
    def term_type(self) -> TermType:
        return self.template.term_type

    @property
    def accessor(self) -> Accessor:
        return self.template.accessor


class NoTemplateError(ValueError):
    pass


# -- gazetteer and lexicons ----------------------------------------------------

def mint_entity(label: str, namespace: str) -> str:
    return namespace + quote(label.lower(), safe="")


def column_gazetteer(labels: Sequence[str], namespace: str) -> Gazetteer:
    entries = {}
    for label in labels:
        label = label.strip()
        if label:
            entries.setdefault(label, mint_entity(label, namespace))
    return Gazetteer(entries)


def boolean_lexicons(strings: Sequence[str], true_tokens=TRUE_TOKENS, false_tokens=FALSE_TOKENS):
    """Split a column's tokens into true and false lists.

    Known tokens keep their lexicon side. Unknown tokens are voted in by
    frequency: the most frequent fills an empty true side first, the next
    the false side.
    """
    freq = Counter(s.strip().casefold() for s in strings)
    tset = {t.casefold() for t in true_tokens}
    fset = {t.casefold() for t in false_tokens}
    true = sorted(t for t in freq if t in tset)
    false = sorted(t for t in freq if t in fset)
    for token in sorted((t for t in freq if t not in tset and t not in fset), key=lambda t: (-freq[t], t)):
        if not true:
            true.append(token)
        elif not false:
            false.append(token)
    return tuple(sorted(true)), tuple(sorted(false))


# -- scoring -------------------------------------------------------------------

def _frac(count: int, total: int) -> Fraction:
    return Fraction(count, total) if total else Fraction(0)


def _covered(cells: Sequence[Cell], spec: TemplateSpec, call, datatype) -> tuple[int, ...]:
    return tuple(
        i for i, c in enumerate(cells) if object_terms(c.value, spec.accessor, call, spec.term_type, datatype)
    )


def score_all(column: pr.ColumnPartition, options: PredictionOptions = PredictionOptions()) -> list[TemplateScore]:
    """Score every heuristic template on a column without formatted cells."""
    cells = column.cells
    n = len(cells)
    if n == 0:
        raise ValueError("cannot score an empty column")
    if column.formatted:
        raise ValueError("formatted cells must be expanded into virtual columns first")

    index = {id(c): i for i, c in enumerate(cells)}
    S = {index[id(c)]: c.value.content for c in column.strings}
    N = {index[id(c)]: c.value for c in column.numerics}
    n_int = {i for i, v in N.items() if pr.dp(v.value) == 0}
    n_dec = set(N) - n_int
    day_first = options.day_first

    def dec_set(point):
        return {i for i, t in S.items() if pr.is_dec(t, point)} | n_dec

    raw: list[tuple[TemplateId, Fraction, FunctionCall | None, str | None, DataFormatType | None]] = []
    raw.append((TemplateId.INTEGER_AS_STRING,
                _frac(len({i for i, t in S.items() if pr.is_int(t)} | n_int), n),
                FunctionCall(FunctionId.PARSE_NUMBER, ".", integer_only=True), XSD_INTEGER, None))
    raw.append((TemplateId.DECIMAL_AS_STRING_POINT, _frac(len(dec_set(".")), n),
                FunctionCall(FunctionId.PARSE_NUMBER, "."), XSD_DECIMAL, None))
    raw.append((TemplateId.DECIMAL_AS_STRING_COMMA, _frac(len(dec_set(",")), n),
                FunctionCall(FunctionId.PARSE_NUMBER, ","), XSD_DECIMAL, None))
    raw.append((TemplateId.DATE_AS_STRING,
                _frac(len({i for i, t in S.items() if pr.is_date(t, day_first)} | set(N)), n),
                FunctionCall(FunctionId.PARSE_DATE, day_first=day_first), XSD_DATE, None))
    raw.append((TemplateId.DATETIME_AS_STRING,
                _frac(len({i for i, t in S.items() if pr.is_datetime(t, day_first)} | set(N)), n),
                FunctionCall(FunctionId.PARSE_DATETIME, day_first=day_first), XSD_DATETIME, None))

    subs = column.substrings
    raw.append((TemplateId.INTEGER_LIST_AS_STRING, _frac(sum(1 for s in subs if pr.is_int(s)), len(subs)),
                FunctionCall(FunctionId.PARSE_NUMBER, ".", integer_only=True, multiple=True), XSD_INTEGER, None))

    distinct = set(S.values())
    bool_score = Fraction(0)
    if distinct and len(distinct) <= 2:
        mean_length = sum(len(s) for s in distinct) / len(distinct)
        if mean_length < options.bool_length_threshold:
            bool_score = _frac(len(S), n)
    true_t, false_t = boolean_lexicons(list(S.values()), options.true_tokens, options.false_tokens)
    raw.append((TemplateId.BOOLEAN_AS_STRING, bool_score,
                FunctionCall(FunctionId.PARSE_BOOLEAN, true_tokens=true_t, false_tokens=false_t), XSD_BOOLEAN, None))

    duplication = pr.dup_exact(cells)
    raw.append((TemplateId.STRING, 1 - duplication if n > 0 else Fraction(0), None, XSD_STRING, None))
    single_gaz = options.gazetteer or column_gazetteer(sorted(set(S.values())), options.entity_namespace)
    raw.append((TemplateId.SINGLE_ENTITY, duplication,
                FunctionCall(FunctionId.ENTITY_LINKING, gazetteer=single_gaz), None, None))
    multi_gaz = options.gazetteer or column_gazetteer(sorted(set(subs)), options.entity_namespace)
    raw.append((TemplateId.MULTIPLE_ENTITIES,
                pr.dup_multiset_exact(subs, len(column.numerics) + len(column.booleans)),
                FunctionCall(FunctionId.ENTITY_LINKING, gazetteer=multi_gaz), None, None))

    raw.append((TemplateId.NATIVE_BOOLEAN, _frac(len(column.booleans), n), None, XSD_BOOLEAN, None))
    raw.append((TemplateId.NATIVE_INTEGER, _frac(len(n_int), n), None, XSD_INTEGER, None))
    raw.append((TemplateId.NATIVE_DECIMAL, _frac(len(n_dec), n), None, XSD_DECIMAL, None))

    formats = [DataFormatType.DATE, DataFormatType.DATETIME]
    if options.boolean_display:
        formats.append(DataFormatType.BOOLEAN_DISPLAY)
    counts = Counter(pr.classify_format(v.data_format, options.boolean_display) for v in N.values())
    best = max(formats, key=lambda d: (counts[d], -formats.index(d)))
    fn, datatype = _FORMAT_FUNCTIONS[best]
    call = FunctionCall(fn, day_first=day_first) if fn is not FunctionId.PARSE_BOOLEAN else FunctionCall(fn)
    raw.append((TemplateId.NUMERIC_WITH_DATA_FORMAT, _frac(counts[best], n), call, datatype, best))

    out = []
    for tid, score, call, datatype, delta in raw:
        spec = TEMPLATES[tid]
        covered = _covered(cells, spec, call, datatype) if score > 0 else ()
        out.append(TemplateScore(spec, score, covered, call, datatype, delta))
    return out


def _selection_key(s: TemplateScore):
    return (-s.score, -(s.template.rank or 0), s.template.function is not None, s.template.order)


def ranked(scores: Sequence[TemplateScore]) -> list[TemplateScore]:
    """Positive-scoring templates in selection order."""
    return sorted((s for s in scores if s.score > 0), key=_selection_key)


def select(scores: Sequence[TemplateScore]) -> TemplateScore:
    """Highest score; ties by higher rank, then function-free first, then table order."""
    if not scores:
        raise ValueError("no candidate templates")
    order = ranked(scores)
    if not order:
        raise NoTemplateError("no template scores above zero")
    return order[0]


# -- prediction trees ----------------------------------------------------------

@dataclass(frozen=True)
class PredictionNode:
    choice: TemplateScore
    covered: tuple[int, ...]  # indices into the tree's cells
    children: tuple["PredictionNode", ...] = ()

    def preorder(self):
        yield self
        for child in self.children:
            yield from child.preorder()


@dataclass(frozen=True)
class PredictionTree:
    cells: tuple[Cell, ...]
    roots: tuple[PredictionNode, ...]
    residue: tuple[int, ...] = ()

    def nodes(self) -> list[PredictionNode]:
        return [n for root in self.roots for n in root.preorder()]


def predict_column(column: pr.ColumnPartition | Sequence[Cell],
                   options: PredictionOptions = PredictionOptions()) -> PredictionTree:
    """Select a template, then recurse on the cells it leaves uncovered."""
    if not isinstance(column, pr.ColumnPartition):
        column = pr.ColumnPartition(tuple(column))
    cells = column.cells
    remaining = list(range(len(cells)))
    chain: list[tuple[TemplateScore, tuple[int, ...]]] = []
    while remaining:
        part = pr.ColumnPartition(tuple(cells[i] for i in remaining))
        choice = next((s for s in ranked(score_all(part, options)) if s.covered), None)
        if choice is None:
            break
        covered = tuple(remaining[i] for i in choice.covered)
        chain.append((choice, covered))
        taken = set(covered)
        remaining = [i for i in remaining if i not in taken]
    node = None
    for choice, covered in reversed(chain):
        node = PredictionNode(choice, covered, (node,) if node else ())
    return PredictionTree(cells, (node,) if node else (), tuple(remaining))


@dataclass(frozen=True)
class VirtualColumn:
    source_column: int
    format_key: str | None  # None: the column is not formatted
    cells: tuple[Cell, ...]

    def extraction_call(self) -> FunctionCall | None:
        if self.format_key is None:
            return None
        style = richtext.style_from_key(self.format_key)
        if style.emphasis:
            tag = next(t for t in richtext.EMPHASIS_TAGS if t in style.emphasis)
            return FunctionCall(FunctionId.GET_ENTITIES_BY_TAG, tag=tag, format_key=self.format_key)
        if style.color:
            return FunctionCall(FunctionId.GET_ENTITIES_BY_COLOR, color=style.color, format_key=self.format_key)
        return FunctionCall(FunctionId.GET_ENTITIES_BY_UNFORMATTED, format_key=self.format_key)


def _group_order(key: str):
    return (key == richtext.UNFORMATTED, key)


def expand_formatted(column: pr.ColumnPartition) -> list[VirtualColumn]:
    """One virtual column per formatting combination found in the column."""
    cells = column.cells
    source = cells[0].column if cells else -1
    if not column.formatted:
        return [VirtualColumn(source, None, cells)]
    groups: dict[str, list[Cell]] = {}
    for c in cells:
        v = c.value
        if isinstance(v, RichText):
            for text, style in richtext.segments(v.html):
                if text.strip():
                    groups.setdefault(style.key, []).append(Cell(c.column, c.row, Text(text.strip())))
        elif isinstance(v, Text):
            if v.content.strip():
                groups.setdefault(richtext.UNFORMATTED, []).append(Cell(c.column, c.row, Text(v.content.strip())))
        else:
            groups.setdefault(richtext.UNFORMATTED, []).append(c)
    return [VirtualColumn(source, key, tuple(groups[key])) for key in sorted(groups, key=_group_order)]


@dataclass(frozen=True)
class ColumnPrediction:
    column: int
    header: str
    groups: tuple[tuple[VirtualColumn, PredictionTree], ...]

    @property
    def formatted(self) -> bool:
        return any(vc.format_key is not None for vc, _ in self.groups)


def predict_cells(cells: Sequence[Cell], options: PredictionOptions = PredictionOptions(),
                  column: int | None = None, header: str = "") -> ColumnPrediction:
    part = pr.ColumnPartition(tuple(cells))
    groups = []
    for vc in expand_formatted(part):
        if vc.cells:
            groups.append((vc, predict_column(pr.ColumnPartition(vc.cells), options)))
    index = column if column is not None else (part.cells[0].column if part.cells else -1)
    return ColumnPrediction(index, header, tuple(groups))


def predict_table(table: Table, options: PredictionOptions = PredictionOptions()) -> list[ColumnPrediction]:
    return [
        predict_cells(table.column_cells(col), options, column=col, header=table.header(col))
        for col in table.columns
    ]
