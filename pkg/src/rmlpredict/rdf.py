"""Minimal RDF terms, provenance-annotated statements and N-Quads I/O."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union
from urllib.parse import quote, unquote

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_STRING = XSD + "string"
RDF_LANGSTRING = RDF + "langString"


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def n3(self) -> str:
        return "<" + _escape_iri(self.value) + ">"


@dataclass(frozen=True, order=True)
class BNode:
    id: str

    def n3(self) -> str:
        return "_:" + self.id


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: str | None = None

    def n3(self) -> str:
        body = '"' + escape_string(self.lexical) + '"'
        if self.language:
            return f"{body}@{self.language}"
        if self.datatype == XSD_STRING:
            return body
        return f"{body}^^<{_escape_iri(self.datatype)}>"


Term = Union[IRI, BNode, Literal]
Resource = Union[IRI, BNode]


def is_resource(term: Term) -> bool:
    return isinstance(term, (IRI, BNode))


@dataclass(frozen=True, order=True)
class CellRef:
    sheet: str
    column: str  # spreadsheet column letter
    row: int  # zero-based

    def iri(self) -> str:
        return f"urn:cell:{quote(self.sheet, safe='')}:{self.column}{self.row + 1}"

    @classmethod
    def from_iri(cls, iri: str) -> "CellRef":
        m = re.fullmatch(r"urn:cell:(.*):([A-Z]+)([1-9]\d*)", iri)
        if not m:
            raise ValueError(f"not a cell provenance IRI: {iri!r}")
        return cls(unquote(m.group(1)), m.group(2), int(m.group(3)) - 1)


Triple = tuple  # (subject, predicate, object)


@dataclass(frozen=True)
class ProvenancedStatement:
    subject: Resource
    predicate: IRI
    object: Term
    cell: CellRef

    @property
    def triple(self) -> tuple:
        return (self.subject, self.predicate, self.object)


_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def escape_string(text: str) -> str:
    return "".join(_STRING_ESCAPES.get(ch, ch) for ch in text)


def _escape_iri(text: str) -> str:
    return "".join(ch if ch > " " and ch not in '<>"{}|^`\\' else f"\\u{ord(ch):04X}" for ch in text)


class NQuadsError(ValueError):
    pass


_UCHAR = re.compile(r"\\u([0-9A-Fa-f]{4})|\\U([0-9A-Fa-f]{8})")
_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(text: str, where: str) -> str:
    out, i = [], 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        m = _UCHAR.match(text, i)
        if m:
            out.append(chr(int(m.group(1) or m.group(2), 16)))
            i = m.end()
        elif i + 1 < len(text) and text[i + 1] in _ECHAR:
            out.append(_ECHAR[text[i + 1]])
            i += 2
        else:
            raise NQuadsError(f"{where}: invalid escape")
    return "".join(out)


_TERM = re.compile(
    r"""\s*(?:
        <(?P<iri>[^>]*)>
      | _:(?P<bnode>[A-Za-z0-9_][A-Za-z0-9_.\-]*)
      | "(?P<lit>(?:[^"\\]|\\.)*)"(?:@(?P<lang>[A-Za-z]+(?:-[A-Za-z0-9]+)*)|\^\^<(?P<dt>[^>]*)>)?
    )""",
    re.VERBOSE,
)


def _term(line: str, pos: int, where: str):
    m = _TERM.match(line, pos)
    if not m:
        raise NQuadsError(f"{where}: expected a term at column {pos + 1}")
    if m.group("iri") is not None:
        return IRI(_unescape(m.group("iri"), where)), m.end()
    if m.group("bnode") is not None:
        return BNode(m.group("bnode")), m.end()
    lexical = _unescape(m.group("lit"), where)
    if m.group("lang"):
        return Literal(lexical, RDF_LANGSTRING, m.group("lang").lower()), m.end()
    dt = _unescape(m.group("dt"), where) if m.group("dt") is not None else XSD_STRING
    return Literal(lexical, dt), m.end()


def parse_nquads(text: str) -> list[ProvenancedStatement]:
    """Parse N-Quads whose graph terms are ``urn:cell:`` provenance IRIs."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        where = f"line {lineno}"
        terms, pos = [], 0
        while True:
            rest = line[pos:].lstrip()
            if rest.startswith("."):
                tail = rest[1:].strip()
                if tail and not tail.startswith("#"):
                    raise NQuadsError(f"{where}: trailing content after '.'")
                break
            if not rest:
                raise NQuadsError(f"{where}: missing terminating '.'")
            term, pos = _term(line, pos, where)
            terms.append(term)
        if len(terms) != 4:
            raise NQuadsError(f"{where}: expected 4 terms, found {len(terms)}")
        s, p, o, g = terms
        if isinstance(s, Literal) or not isinstance(p, IRI):
            raise NQuadsError(f"{where}: invalid subject or predicate")
        if not isinstance(g, IRI):
            raise NQuadsError(f"{where}: graph term must be a urn:cell IRI")
        try:
            cell = CellRef.from_iri(g.value)
        except ValueError as exc:
            raise NQuadsError(f"{where}: {exc}") from exc
        out.append(ProvenancedStatement(s, p, o, cell))
    return out


def serialize_nquads(statements: Iterable[ProvenancedStatement]) -> str:
    return "".join(
        f"{st.subject.n3()} {st.predicate.n3()} {st.object.n3()} <{st.cell.iri()}> .\n" for st in statements
    )
