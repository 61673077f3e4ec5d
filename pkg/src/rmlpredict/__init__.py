"""Predict RML mappings for spreadsheets from per-column heuristics."""

from .cells import Cell, Sheet, Table, extract_table, parse_canonical, serialize_canonical
from .ingest import Workbook, read_path, read_xlsx
from .matching import MetricsReport, evaluate, evaluate_sheet, greedy_match
from .rml import MappingDocument, emit_mapping, execute, parse_turtle, serialize_turtle
from .templates import PredictionOptions, predict_column, predict_table, score_all, select

__version__ = "0.1.0"

__all__ = [
    "Cell", "Sheet", "Table", "extract_table", "parse_canonical", "serialize_canonical",
    "Workbook", "read_path", "read_xlsx",
    "MetricsReport", "evaluate", "evaluate_sheet", "greedy_match",
    "MappingDocument", "emit_mapping", "execute", "parse_turtle", "serialize_turtle",
    "PredictionOptions", "predict_column", "predict_table", "score_all", "select",
]
