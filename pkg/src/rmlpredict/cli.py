"""Command-line entry point: predict | execute | evaluate | pipeline."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import rdf
from .cells import CanonicalFormatError, NoTableError, column_letter, extract_table, serialize_canonical
from .config import ConfigError, RunConfig, load_config
from .ingest import IngestError, Workbook, read_path
from .matching import MetricsReport, evaluate
from .rml import MappingDocument, MappingError, emit_mapping, execute, parse_turtle, serialize_entities, serialize_turtle
from .templates import ColumnPrediction, PredictionNode, predict_table

log = logging.getLogger("rmlpredict")

USER_ERRORS = (ConfigError, IngestError, NoTableError, CanonicalFormatError, MappingError, rdf.NQuadsError, OSError)
INPUT_SUFFIXES = (".xlsx", ".json")


# -- reporting -----------------------------------------------------------------

def _node_lines(node: PredictionNode, total: int, depth: int) -> list[str]:
    c = node.choice
    rank = "-" if c.template.rank is None else str(c.template.rank)
    detail = f" [{c.data_format.name}]" if c.data_format is not None else ""
    line = (f"{'  ' * depth}{c.template.id.value}{detail} score={float(c.score):.3f} rank={rank} "
            f"covers {len(node.covered)}/{total}")
    out = [line]
    for child in node.children:
        out.extend(_node_lines(child, total, depth + 1))
    return out


def prediction_report(sheet_name: str, predictions: list[ColumnPrediction], headers: dict[int, str]) -> str:
    """Selected templates per column, one line per prediction-tree node."""
    lines = [f"sheet {sheet_name}"]
    for p in predictions:
        title = f"  {column_letter(p.column)} {headers.get(p.column, '')!r}"
        lines.append(title + (": FormattedText" if p.formatted else ""))
        for vc, tree in p.groups:
            depth = 2
            if p.formatted:
                lines.append(f"    [{vc.format_key}]")
                depth = 3
            if not tree.roots:
                lines.append("  " * depth + "(no template)")
            for root in tree.roots:
                lines.extend(_node_lines(root, len(tree.cells), depth))
            if tree.residue:
                lines.append("  " * depth + f"{len(tree.residue)} cell(s) uncovered")
    return "\n".join(lines) + "\n"


def metrics_table(per_sheet: dict[str, MetricsReport], total: MetricsReport) -> str:
    rows = [("sheet", "tp", "fn", "fp", "precision", "recall", "f-measure")]
    for name, r in list(per_sheet.items()) + [("(all)", total)]:
        rows.append((name, str(r.tp), str(r.fn), str(r.fp), f"{r.precision:.4f}", f"{r.recall:.4f}", f"{r.fmeasure:.4f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows) + "\n"


def metrics_document(per_sheet: dict[str, MetricsReport], total: MetricsReport) -> str:
    doc = {"sheets": {k: v.as_dict() for k, v in per_sheet.items()}, "total": total.as_dict()}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- stages --------------------------------------------------------------------

@dataclass
class Prediction:
    workbook: Workbook
    mapping: MappingDocument
    report: str


def predict_workbook(workbook: Workbook, config: RunConfig) -> Prediction:
    options = config.prediction_options()
    tables, reports = [], []
    for sheet in workbook.sheets:
        try:
            table = extract_table(sheet)
        except NoTableError:
            if len(workbook.sheets) == 1:
                raise
            log.warning("skipping sheet %r: no table", sheet.name)
            continue
        predictions = predict_table(table, options)
        tables.append((table, predictions))
        reports.append(prediction_report(sheet.name, predictions, {c: table.header(c) for c in table.columns}))
    if not tables:
        raise NoTableError("no table: every sheet is blank")
    return Prediction(workbook, emit_mapping(tables, config.namespaces), "".join(reports))


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def _stem(path: Path) -> str:
    return path.name[: -len(path.suffix)] if path.suffix else path.name


def run_predict(input_path: Path, out_dir: Path, config: RunConfig, dump_canonical: bool = False) -> Prediction:
    workbook = read_path(input_path)
    prediction = predict_workbook(workbook, config)
    stem = _stem(input_path)
    _write(out_dir / f"{stem}.rml.ttl", serialize_turtle(prediction.mapping))
    _write(out_dir / f"{stem}.entities.ttl", serialize_entities(prediction.mapping))
    _write(out_dir / f"{stem}.report.txt", prediction.report)
    if dump_canonical:
        for i, sheet in enumerate(workbook.sheets, 1):
            suffix = "" if len(workbook.sheets) == 1 else f".{i}"
            _write(out_dir / f"{stem}{suffix}.canonical.json", serialize_canonical(sheet))
    return prediction


def run_execute(input_path: Path, mapping_path: Path, out_path: Path, config: RunConfig) -> list[rdf.ProvenancedStatement]:
    workbook = read_path(input_path)
    mapping = parse_turtle(mapping_path.read_text(encoding="utf-8"), config.namespaces)
    statements = execute(mapping, workbook)
    _write(out_path, rdf.serialize_nquads(statements))
    return statements


def run_evaluate(actual: list, expected: list, config: RunConfig):
    return evaluate(actual, expected, config.matching_threshold)


def _read_nquads(path: Path) -> list[rdf.ProvenancedStatement]:
    try:
        return rdf.parse_nquads(path.read_text(encoding="utf-8"))
    except rdf.NQuadsError as exc:
        raise rdf.NQuadsError(f"{path}: {exc}") from exc


def _inputs(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file() and p.suffix.lower() in INPUT_SUFFIXES)
        if not files:
            raise IngestError(f"no .xlsx or .json inputs in {path}")
        return files
    return [path]


def run_pipeline(input_path: Path, expected: Path | None, out_dir: Path, config: RunConfig,
                 dump_canonical: bool = False) -> MetricsReport | None:
    inputs = _inputs(input_path)
    batch = input_path.is_dir()
    all_per_sheet: dict[str, MetricsReport] = {}
    evaluated = False
    for path in inputs:
        stem = _stem(path)
        prediction = run_predict(path, out_dir, config, dump_canonical)
        statements = execute(prediction.mapping, prediction.workbook)
        _write(out_dir / f"{stem}.nq", rdf.serialize_nquads(statements))
        truth = None
        if expected is not None:
            truth = expected / f"{stem}.nq" if expected.is_dir() else expected
            if batch and not truth.exists():
                log.warning("no expected statements for %s", path.name)
                truth = None
        sys.stdout.write(prediction.report)
        if truth is None:
            continue
        per_sheet, total = run_evaluate(statements, _read_nquads(truth), config)
        _write(out_dir / f"{stem}.metrics.json", metrics_document(per_sheet, total))
        sys.stdout.write(metrics_table(per_sheet, total))
        evaluated = True
        for name, r in per_sheet.items():
            key = f"{stem}:{name}" if batch else name
            all_per_sheet[key] = r
    if not evaluated:
        return None
    total = MetricsReport()
    for r in all_per_sheet.values():
        total = total + r
    if batch:
        _write(out_dir / "aggregate.metrics.json", metrics_document(all_per_sheet, total))
        sys.stdout.write(metrics_table(all_per_sheet, total))
    return total


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmlpredict", description="Predict RML mappings for spreadsheets.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON configuration file")
    common.add_argument("--out-dir", type=Path, help="directory for written artifacts")
    common.add_argument("--matching-threshold", type=float)
    common.add_argument("--bool-length-threshold", type=float)
    common.add_argument("--namespace-entity")
    common.add_argument("--namespace-property")
    common.add_argument("--namespace-function")
    common.add_argument("--namespace-mapping")
    common.add_argument("--gazetteer", help="JSON object mapping entity labels to IRIs")
    common.add_argument("--day-first", action="store_true", default=None, help="read d/m/y slash dates")
    common.add_argument("--no-boolean-display", dest="boolean_display", action="store_false", default=None,
                        help="do not treat text-only number formats as booleans")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("predict", parents=[common], help="predict a mapping for an XLSX or canonical sheet")
    p.add_argument("input", type=Path)
    p.add_argument("--dump-canonical", action="store_true")

    e = sub.add_parser("execute", parents=[common], help="run a mapping over a sheet")
    e.add_argument("input", type=Path)
    e.add_argument("mapping", type=Path)
    e.add_argument("-o", "--output", type=Path, help="N-Quads output file")

    v = sub.add_parser("evaluate", parents=[common], help="compare two N-Quads files")
    v.add_argument("actual", type=Path)
    v.add_argument("expected", type=Path)

    pl = sub.add_parser("pipeline", parents=[common], help="predict, execute and optionally evaluate")
    pl.add_argument("input", type=Path, help="input file or directory")
    pl.add_argument("--expected", type=Path, help="expected N-Quads file (or directory of <stem>.nq)")
    pl.add_argument("--dump-canonical", action="store_true")
    return parser


def _config(args) -> RunConfig:
    config = load_config(args.config)
    return config.with_overrides(
        matching_threshold=args.matching_threshold,
        bool_length_threshold=args.bool_length_threshold,
        namespace_entity=args.namespace_entity,
        namespace_property=args.namespace_property,
        namespace_function=args.namespace_function,
        namespace_mapping=args.namespace_mapping,
        gazetteer=args.gazetteer,
        day_first=args.day_first,
        boolean_display=args.boolean_display,
        out_dir=str(args.out_dir) if args.out_dir else None,
    )


def _dispatch(args) -> int:
    config = _config(args)
    out_dir = Path(config.out_dir)
    if args.command == "predict":
        prediction = run_predict(args.input, out_dir, config, args.dump_canonical)
        sys.stdout.write(prediction.report)
    elif args.command == "execute":
        out = args.output or out_dir / f"{_stem(args.input)}.nq"
        statements = run_execute(args.input, args.mapping, out, config)
        print(f"{len(statements)} statements written to {out}")
    elif args.command == "evaluate":
        per_sheet, total = run_evaluate(_read_nquads(args.actual), _read_nquads(args.expected), config)
        sys.stdout.write(metrics_table(per_sheet, total))
        _write(out_dir / f"{_stem(args.actual)}.metrics.json", metrics_document(per_sheet, total))
    else:
        run_pipeline(args.input, args.expected, out_dir, config, args.dump_canonical)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return _dispatch(args)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything else is a bug
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
