"""RML mapping documents: emission from predictions, Turtle I/O and execution.

The spreadsheet dialect understood here: a logical source names a sheet and
iterates its rows from ``rp:firstRow`` on; references read ``{column}.{accessor}``;
subject templates substitute ``{row}`` with the zero-based row number. Object
maps that call a function carry an ``fno:Execution`` node with its parameters
under the ``rp:`` vocabulary. A predicate-object map with ``rp:residualOf``
only fires on cells (or rich-text spans) where its ancestors produced nothing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Sequence

import rdflib
from rdflib.namespace import RDF as RDF_NS

from . import richtext
from .ahocorasick import Gazetteer
from .cells import Sheet, Table, column_index, column_letter
from .functions import (
    EXTRACTORS,
    Accessor,
    FunctionCall,
    FunctionId,
    TermType,
    extract_spans,
    object_terms,
    project,
)
from .ingest import Workbook
from .rdf import IRI, RDFS, XSD, Literal, ProvenancedStatement, CellRef, Term, escape_string
from .templates import ColumnPrediction, PredictionNode

RR = "http://www.w3.org/ns/r2rml#"
RML = "http://semweb.mmlab.be/ns/rml#"
QL = "http://semweb.mmlab.be/ns/ql#"
FNML = "http://semweb.mmlab.be/ns/fnml#"
FNO = "https://w3id.org/function/ontology#"
RP = "http://example.org/rmlpredict#"


class MappingError(ValueError):
    pass


@dataclass(frozen=True)
class Namespaces:
    entity: str = "http://example.org/entity/"
    property: str = "http://example.org/property/"
    function: str = "http://example.org/function/"
    mapping: str = "http://example.org/mapping/"


@dataclass(frozen=True)
class Reference:
    column: str  # column letter
    accessor: Accessor

    def text(self) -> str:
        return f"{self.column}.{self.accessor.value}"

    @classmethod
    def parse(cls, text: str) -> "Reference":
        m = re.fullmatch(r"([A-Z]+)\.(\w+)", text)
        if not m:
            raise MappingError(f"malformed reference {text!r}")
        try:
            return cls(m.group(1), Accessor(m.group(2)))
        except ValueError:
            raise MappingError(f"unknown accessor in reference {text!r}") from None


@dataclass(frozen=True)
class ObjectMap:
    reference: Reference
    term_type: TermType
    datatype: str | None = None
    call: FunctionCall | None = None

    def __post_init__(self):
        if self.term_type is TermType.IRI and self.datatype is not None:
            raise ValueError("IRI object maps take no datatype")


@dataclass(frozen=True)
class PredicateObjectMap:
    name: str  # local name under the mapping namespace, e.g. pom_1_A_2
    predicate: str
    object_map: ObjectMap
    residual_of: str | None = None


@dataclass(frozen=True)
class TriplesMap:
    name: str
    sheet: str
    first_row: int
    subject_template: str
    poms: tuple[PredicateObjectMap, ...] = ()

    @property
    def index(self) -> int:
        return int(self.name.rsplit("_", 1)[1])


@dataclass(frozen=True)
class MappingDocument:
    namespaces: Namespaces = Namespaces()
    triples_maps: tuple[TriplesMap, ...] = ()

    def entity_labels(self) -> list[tuple[str, str]]:
        """(IRI, label) pairs of every gazetteer used by the document, sorted."""
        pairs = set()
        for tm in self.triples_maps:
            for pom in tm.poms:
                call = pom.object_map.call
                while call is not None:
                    if call.gazetteer is not None:
                        pairs.update((iri, label) for label, iri in call.gazetteer.entries.items())
                    call = call.inner
        return sorted(pairs)


# -- emission ------------------------------------------------------------------

def slugify(text: str) -> str:
    return re.sub(r"[^0-9a-z]+", "_", text.lower()).strip("_")


def format_suffix(format_key: str) -> str:
    if format_key == richtext.UNFORMATTED:
        return "plain"
    return format_key.replace("color:#", "color_").replace("+", "_")


def _column_slugs(table: Table) -> dict[int, str]:
    slugs, seen = {}, {}
    for col in table.columns:
        slug = slugify(table.header(col)) or f"column_{column_letter(col)}"
        seen[slug] = seen.get(slug, 0) + 1
        slugs[col] = slug if seen[slug] == 1 else f"{slug}_{seen[slug]}"
    return slugs


def _node_object_map(node: PredictionNode, letter: str, extraction: FunctionCall | None) -> ObjectMap:
    choice = node.choice
    if extraction is None:
        return ObjectMap(Reference(letter, choice.accessor), choice.term_type, choice.datatype, choice.call)
    call = replace(
        extraction,
        inner=choice.call,
        inner_accessor=choice.accessor,
        inner_term_type=choice.term_type,
        inner_datatype=choice.datatype,
    )
    return ObjectMap(Reference(letter, Accessor.VALUE_RICH_TEXT), choice.term_type, choice.datatype, call)


def emit_triples_map(table: Table, predictions: Sequence[ColumnPrediction], namespaces: Namespaces = Namespaces(),
                     index: int = 1) -> TriplesMap:
    slugs = _column_slugs(table)
    poms = []
    for prediction in predictions:
        letter = column_letter(prediction.column)
        slug = slugs.get(prediction.column) or f"column_{letter}"
        counter = 0
        for vc, tree in prediction.groups:
            predicate = namespaces.property + (slug if vc.format_key is None else f"{slug}_{format_suffix(vc.format_key)}")
            extraction = vc.extraction_call()

            def walk(node: PredictionNode, parent: str | None):
                nonlocal counter
                counter += 1
                name = f"pom_{index}_{letter}_{counter}"
                poms.append(PredicateObjectMap(name, predicate, _node_object_map(node, letter, extraction), parent))
                for child in node.children:
                    walk(child, name)

            for root in tree.roots:
                walk(root, None)
    return TriplesMap(
        name=f"TriplesMap_{index}",
        sheet=table.sheet.name,
        first_row=table.header_row + 1,
        subject_template=namespaces.entity + "row_{row}",
        poms=tuple(poms),
    )


def emit_mapping(tables: Sequence[tuple[Table, Sequence[ColumnPrediction]]],
                 namespaces: Namespaces = Namespaces()) -> MappingDocument:
    """One triples map per table; one predicate-object map per prediction node."""
    maps = tuple(emit_triples_map(t, p, namespaces, i) for i, (t, p) in enumerate(tables, 1))
    return MappingDocument(namespaces, maps)


# -- Turtle writing ------------------------------------------------------------

_LOCAL = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


class _Writer:
    def __init__(self, doc: MappingDocument):
        self.prefixes = [
            ("rr", RR), ("rml", RML), ("ql", QL), ("fnml", FNML), ("fno", FNO), ("xsd", XSD),
            ("rdfs", RDFS), ("rp", RP), ("fn", doc.namespaces.function), ("map", doc.namespaces.mapping),
        ]
        self.blocks: list[str] = []

    def iri(self, value: str) -> str:
        for prefix, ns in self.prefixes:
            if value.startswith(ns) and _LOCAL.fullmatch(value[len(ns):]):
                return f"{prefix}:{value[len(ns):]}"
        return IRI(value).n3()

    @staticmethod
    def literal(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value)
        return '"' + escape_string(value) + '"'

    def block(self, subject: str, rdf_type: str | None, props: list[tuple[str, list[str]]]):
        lines = []
        if rdf_type:
            lines.append(("a", [rdf_type]))
        lines.extend((p, objs) for p, objs in props if objs)
        body = " ;\n    ".join(f"{p} {', '.join(objs)}" for p, objs in lines)
        self.blocks.append(f"{subject} {body} .\n")

    def text(self) -> str:
        head = "".join(f"@prefix {p}: <{ns}> .\n" for p, ns in self.prefixes)
        return head + "".join("\n" + b for b in self.blocks)


def _write_call(w: _Writer, name: str, call: FunctionCall, ns: Namespaces):
    props: list[tuple[str, list[str]]] = [("fno:executes", [w.iri(ns.function + call.function.value)])]
    f = call.function
    if f is FunctionId.PARSE_NUMBER:
        props += [
            ("rp:decimalPoint", [w.literal(call.decimal_point)]),
            ("rp:integerOnly", [w.literal(call.integer_only)]),
            ("rp:multiple", [w.literal(call.multiple)]),
        ]
    if f is FunctionId.PARSE_BOOLEAN:
        props += [
            ("rp:trueToken", [w.literal(t) for t in sorted(call.true_tokens)]),
            ("rp:falseToken", [w.literal(t) for t in sorted(call.false_tokens)]),
        ]
    if f in (FunctionId.PARSE_DATE, FunctionId.PARSE_DATETIME):
        props.append(("rp:dayFirst", [w.literal(call.day_first)]))
    gaz_name = None
    if call.gazetteer is not None:
        gaz_name = name.replace("fn_", "gaz_", 1)
        props.append(("rp:gazetteer", [w.iri(ns.mapping + gaz_name)]))
    if call.tag is not None:
        props.append(("rp:tag", [w.literal(call.tag)]))
    if call.color is not None:
        props.append(("rp:color", [w.literal(call.color)]))
    if call.format_key is not None:
        props.append(("rp:formatKey", [w.literal(call.format_key)]))
    inner_name = name + "_inner"
    if call.inner is not None:
        props.append(("rp:inner", [w.iri(ns.mapping + inner_name)]))
    if call.inner_accessor is not None:
        props.append(("rp:innerAccessor", [w.literal(call.inner_accessor.value)]))
    if call.inner_term_type is not None:
        props.append(("rp:innerTermType", [w.iri(RR + call.inner_term_type.value)]))
    if call.inner_datatype is not None:
        props.append(("rp:innerDatatype", [w.iri(call.inner_datatype)]))
    w.block(w.iri(ns.mapping + name), "fno:Execution", props)
    if gaz_name is not None:
        entities = sorted(set(call.gazetteer.entries.values()))
        w.block(w.iri(ns.mapping + gaz_name), "rp:Gazetteer", [("rp:entity", [w.iri(e) for e in entities])])
    if call.inner is not None:
        _write_call(w, inner_name, call.inner, ns)


def serialize_turtle(doc: MappingDocument) -> str:
    """Deterministic Turtle rendering; parses back to an equal document."""
    w = _Writer(doc)
    ns = doc.namespaces
    m = lambda local: w.iri(ns.mapping + local)  # noqa: E731
    for tm in doc.triples_maps:
        suffix = tm.name.split("_", 1)[1]
        w.block(m(tm.name), "rr:TriplesMap", [
            ("rml:logicalSource", [m("Source_" + suffix)]),
            ("rr:subjectMap", [m("SubjectMap_" + suffix)]),
            ("rr:predicateObjectMap", [m(p.name) for p in tm.poms]),
        ])
        w.block(m("Source_" + suffix), "rml:LogicalSource", [
            ("rml:source", [w.literal(tm.sheet)]),
            ("rml:referenceFormulation", ["ql:Spreadsheet"]),
            ("rml:iterator", [w.literal("row")]),
            ("rp:firstRow", [w.literal(tm.first_row)]),
        ])
        w.block(m("SubjectMap_" + suffix), "rr:SubjectMap", [("rr:template", [w.literal(tm.subject_template)])])
        for pom in tm.poms:
            local = pom.name.split("_", 1)[1]
            om = pom.object_map
            w.block(m(pom.name), "rr:PredicateObjectMap", [
                ("rr:predicate", [w.iri(pom.predicate)]),
                ("rr:objectMap", [m("om_" + local)]),
                ("rp:residualOf", [m(pom.residual_of)] if pom.residual_of else []),
            ])
            om_props = [
                ("rml:reference", [w.literal(om.reference.text())]),
                ("rr:termType", [w.iri(RR + om.term_type.value)]),
                ("rr:datatype", [w.iri(om.datatype)] if om.datatype else []),
                ("fnml:functionValue", [m("fn_" + local)] if om.call else []),
            ]
            w.block(m("om_" + local), "fnml:FunctionTermMap" if om.call else "rr:ObjectMap", om_props)
            if om.call is not None:
                _write_call(w, "fn_" + local, om.call, ns)
    labels = doc.entity_labels()
    for iri in dict.fromkeys(i for i, _ in labels):
        w.block(w.iri(iri), None, [("rdfs:label", [w.literal(label) for i, label in labels if i == iri])])
    return w.text()


def serialize_entities(doc: MappingDocument) -> str:
    """Companion graph of presumed entities with their labels."""
    lines = [f"@prefix rdfs: <{RDFS}> .\n"]
    for iri, label in doc.entity_labels():
        lines.append(f'{IRI(iri).n3()} rdfs:label "{escape_string(label)}" .\n')
    return "".join(lines)


# -- Turtle reading ------------------------------------------------------------

class _Reader:
    def __init__(self, text: str):
        self.g = rdflib.Graph()
        try:
            self.g.parse(data=text, format="turtle")
        except Exception as exc:  # rdflib raises a variety of parser errors
            raise MappingError(f"invalid Turtle: {exc}") from exc
        prefixes = {p: str(u) for p, u in self.g.namespaces()}
        defaults = Namespaces()
        self.function_ns = prefixes.get("fn", defaults.function)
        self.mapping_ns = prefixes.get("map", defaults.mapping)

    def one(self, subject, prop: str, required: bool = True):
        values = list(self.g.objects(subject, rdflib.URIRef(prop)))
        if len(values) > 1:
            raise MappingError(f"{self.local(subject)}: multiple values for <{prop}>")
        if not values:
            if required:
                raise MappingError(f"{self.local(subject)}: missing <{prop}>")
            return None
        return values[0]

    def all(self, subject, prop: str):
        return list(self.g.objects(subject, rdflib.URIRef(prop)))

    def local(self, node) -> str:
        text = str(node)
        return text[len(self.mapping_ns):] if text.startswith(self.mapping_ns) else text

    def call(self, node) -> FunctionCall:
        fn_iri = str(self.one(node, FNO + "executes"))
        name = re.split(r"[#/]", fn_iri)[-1]
        try:
            function = FunctionId(name)
        except ValueError:
            raise MappingError(f"{self.local(node)}: unknown function <{fn_iri}>") from None
        kwargs = {}
        lit = lambda p: self.one(node, RP + p, required=False)  # noqa: E731
        if (v := lit("decimalPoint")) is not None:
            kwargs["decimal_point"] = str(v)
        for key, attr in (("integerOnly", "integer_only"), ("multiple", "multiple"), ("dayFirst", "day_first")):
            if (v := lit(key)) is not None:
                kwargs[attr] = bool(v.toPython())
        kwargs["true_tokens"] = tuple(sorted(str(v) for v in self.all(node, RP + "trueToken")))
        kwargs["false_tokens"] = tuple(sorted(str(v) for v in self.all(node, RP + "falseToken")))
        if (gaz := lit("gazetteer")) is not None:
            entries = {}
            for entity in self.all(gaz, RP + "entity"):
                labels = self.all(entity, RDFS + "label")
                if not labels:
                    raise MappingError(f"{self.local(gaz)}: entity <{entity}> has no label")
                for label in labels:
                    entries[str(label)] = str(entity)
            kwargs["gazetteer"] = Gazetteer(entries)
        for key, attr in (("tag", "tag"), ("color", "color"), ("formatKey", "format_key")):
            if (v := lit(key)) is not None:
                kwargs[attr] = str(v)
        if (inner := lit("inner")) is not None:
            kwargs["inner"] = self.call(inner)
        if (v := lit("innerAccessor")) is not None:
            kwargs["inner_accessor"] = Accessor(str(v))
        if (v := lit("innerTermType")) is not None:
            kwargs["inner_term_type"] = TermType(str(v)[len(RR):])
        if (v := lit("innerDatatype")) is not None:
            kwargs["inner_datatype"] = str(v)
        try:
            return FunctionCall(function, **kwargs)
        except ValueError as exc:
            raise MappingError(f"{self.local(node)}: {exc}") from exc

    def object_map(self, node) -> ObjectMap:
        reference = Reference.parse(str(self.one(node, RML + "reference")))
        term_type = str(self.one(node, RR + "termType"))
        try:
            tt = TermType(term_type[len(RR):])
        except ValueError:
            raise MappingError(f"{self.local(node)}: unsupported term type <{term_type}>") from None
        dt = self.one(node, RR + "datatype", required=False)
        fn = self.one(node, FNML + "functionValue", required=False)
        try:
            return ObjectMap(reference, tt, str(dt) if dt is not None else None, self.call(fn) if fn is not None else None)
        except ValueError as exc:
            raise MappingError(f"{self.local(node)}: {exc}") from exc

    def triples_map(self, node) -> TriplesMap:
        name = self.local(node)
        source = self.one(node, RML + "logicalSource")
        subject_map = self.one(node, RR + "subjectMap")
        poms = []
        for pom in self.all(node, RR + "predicateObjectMap"):
            residual = self.one(pom, RP + "residualOf", required=False)
            poms.append(PredicateObjectMap(
                self.local(pom),
                str(self.one(pom, RR + "predicate")),
                self.object_map(self.one(pom, RR + "objectMap")),
                self.local(residual) if residual is not None else None,
            ))
        poms.sort(key=_pom_order)
        first_row = self.one(source, RP + "firstRow", required=False)
        return TriplesMap(
            name=name,
            sheet=str(self.one(source, RML + "source")),
            first_row=int(first_row) if first_row is not None else 0,
            subject_template=str(self.one(subject_map, RR + "template")),
            poms=tuple(poms),
        )


def _pom_order(pom: PredicateObjectMap):
    m = re.fullmatch(r"pom_\d+_([A-Z]+)_(\d+)", pom.name)
    if not m:
        return (1, 0, 0, pom.name)
    return (0, column_index(m.group(1)), int(m.group(2)), pom.name)


def _tm_order(tm: TriplesMap):
    m = re.fullmatch(r"TriplesMap_(\d+)", tm.name)
    return (0, int(m.group(1)), tm.name) if m else (1, 0, tm.name)


def parse_turtle(text: str, namespaces: Namespaces | None = None) -> MappingDocument:
    r = _Reader(text)
    maps = [r.triples_map(node) for node in r.g.subjects(RDF_NS.type, rdflib.URIRef(RR + "TriplesMap"))]
    base = namespaces or Namespaces()
    ns = replace(base, function=r.function_ns, mapping=r.mapping_ns)
    return MappingDocument(ns, tuple(sorted(maps, key=_tm_order)))


# -- execution -----------------------------------------------------------------

def _finish(terms: list[Term], term_type: TermType, datatype: str | None) -> list[Term]:
    out = []
    for t in terms:
        if term_type is TermType.IRI:
            if isinstance(t, IRI):
                out.append(t)
        elif isinstance(t, Literal):
            out.append(replace(t, datatype=datatype) if datatype else t)
    return out


def _units(om: ObjectMap, value) -> list[list[Term]]:
    """Objects per unit: the whole cell, or each span an extraction call selects."""
    call = om.call
    if call is None or call.function not in EXTRACTORS:
        return [object_terms(value, om.reference.accessor, call, om.term_type, om.datatype)]
    projected = project(om.reference.accessor, value)
    if projected is None:
        return []
    out = []
    for span in extract_spans(projected, call.function, call.tag, call.color, call.format_key):
        if call.inner is None and call.inner_accessor is None:
            terms = object_terms(span, Accessor.VALUE, None, TermType.LITERAL, None)
        else:
            terms = object_terms(span, call.inner_accessor or Accessor.JSON, call.inner,
                                 call.inner_term_type or TermType.LITERAL, call.inner_datatype)
        out.append(_finish(terms, om.term_type, om.datatype))
    return out


def _chains(poms: Sequence[PredicateObjectMap]) -> list[list[PredicateObjectMap]]:
    """Group residual maps under their root, in preorder."""
    by_name = {p.name: p for p in poms}
    children: dict[str, list[PredicateObjectMap]] = {}
    roots = []
    for p in poms:
        if p.residual_of is None:
            roots.append(p)
        elif p.residual_of not in by_name:
            raise MappingError(f"{p.name}: residualOf refers to unknown map {p.residual_of}")
        else:
            children.setdefault(p.residual_of, []).append(p)

    def preorder(p, seen):
        if p.name in seen:
            raise MappingError(f"{p.name}: residual cycle")
        seen.add(p.name)
        out = [p]
        for c in children.get(p.name, []):
            out.extend(preorder(c, seen))
        return out

    return [preorder(r, set()) for r in roots]


def execute_triples_map(tm: TriplesMap, sheet: Sheet) -> list[ProvenancedStatement]:
    for pom in tm.poms:
        col = column_index(pom.object_map.reference.column)
        if col >= sheet.width:
            raise MappingError(f"{pom.name}: column {pom.object_map.reference.column} not in sheet {sheet.name!r}")
    chains = _chains(tm.poms)
    out: list[ProvenancedStatement] = []
    seen = set()
    for row in range(tm.first_row, sheet.height):
        subject = IRI(tm.subject_template.replace("{row}", str(row)))
        for chain in chains:
            col = column_index(chain[0].object_map.reference.column)
            value = sheet.value(col, row)
            cell = CellRef(sheet.name, column_letter(col), row)
            per_node = []
            for pom in chain:
                if column_index(pom.object_map.reference.column) != col:
                    raise MappingError(f"{pom.name}: residual map reads a different column than its root")
                try:
                    per_node.append(_units(pom.object_map, value))
                except richtext.MalformedHtmlError as exc:
                    raise MappingError(f"{pom.name}: cell {cell.column}{row + 1}: {exc}") from exc
            for i in range(max((len(u) for u in per_node), default=0)):
                for pom, units in zip(chain, per_node):
                    if i < len(units) and units[i]:
                        for obj in units[i]:
                            st = ProvenancedStatement(subject, IRI(pom.predicate), obj, cell)
                            if st not in seen:
                                seen.add(st)
                                out.append(st)
                        break
    return out


def execute(doc: MappingDocument, workbook: Workbook) -> list[ProvenancedStatement]:
    """Statements in triples-map, row, map order; each tagged with its cell."""
    out = []
    for tm in doc.triples_maps:
        try:
            sheet = workbook.sheet(tm.sheet)
        except KeyError:
            raise MappingError(f"{tm.name}: sheet {tm.sheet!r} not in workbook") from None
        out.extend(execute_triples_map(tm, sheet))
    return out
