import json

import pytest

from conftest import xlsx_bytes
from rmlpredict import cli
from rmlpredict.cells import serialize_canonical, sheet_from_rows
from rmlpredict.rdf import parse_nquads


def run(*args):
    return cli.main([str(a) for a in args])


def test_predict_writes_artifacts(sample_path, tmp_path, capsys):
    assert run("predict", sample_path, "--out-dir", tmp_path) == 0
    report = capsys.readouterr().out
    for line in ("A 'ID'", "NativeInteger", "B 'Active'", "BOOLEAN_DISPLAY", "C 'Date'", "DateAsString",
                 "D 'Editors'", "MultipleEntities", "E 'Deadlines': FormattedText", "[color:#ff0000]", "[i]"):
        assert line in report
    assert (tmp_path / "sample.rml.ttl").read_text().count("a rr:PredicateObjectMap") == 7
    assert "rdfs:label" in (tmp_path / "sample.entities.ttl").read_text()
    assert (tmp_path / "sample.report.txt").read_text() == report


def test_predict_dump_canonical(sample_path, tmp_path):
    assert run("predict", sample_path, "--out-dir", tmp_path, "--dump-canonical") == 0
    assert (tmp_path / "sample.canonical.json").read_text() == sample_path.read_text()


def test_predict_empty_sheet(tmp_path, capsys):
    src = tmp_path / "empty.json"
    src.write_text(serialize_canonical(sheet_from_rows("S", [])))
    assert run("predict", src, "--out-dir", tmp_path / "out") == 1
    assert "no table" in capsys.readouterr().err


def test_missing_input(tmp_path, capsys):
    assert run("predict", tmp_path / "nothing.xlsx", "--out-dir", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_predict_xlsx_workbook(tmp_path, capsys):
    def build(wb):
        ws = wb.active
        ws.title = "People"
        ws.append(["name", "age"])
        ws.append(["Ann", 31])
        ws.append(["Bob", 42])
        wb.create_sheet("Blank")
    src = tmp_path / "book.xlsx"
    src.write_bytes(xlsx_bytes(build))
    assert run("pipeline", src, "--out-dir", tmp_path / "out") == 0
    out = capsys.readouterr().out
    assert "sheet People" in out and "Blank" not in out
    statements = parse_nquads((tmp_path / "out" / "book.nq").read_text())
    assert len(statements) == 4
    assert {s.cell.sheet for s in statements} == {"People"}


def test_execute_and_missing_column(sample_path, tmp_path, capsys):
    run("predict", sample_path, "--out-dir", tmp_path)
    mapping = tmp_path / "sample.rml.ttl"
    assert run("execute", sample_path, mapping, "-o", tmp_path / "x.nq") == 0
    assert parse_nquads((tmp_path / "x.nq").read_text())
    narrow = tmp_path / "narrow.json"
    narrow.write_text(serialize_canonical(sheet_from_rows("Sheet1", [["ID"], [1]])))
    assert run("execute", narrow, mapping, "-o", tmp_path / "y.nq") == 1
    assert "column" in capsys.readouterr().err


def test_execute_empty_mapping(sample_path, tmp_path):
    from rmlpredict.rml import MappingDocument, serialize_turtle
    mapping = tmp_path / "empty.ttl"
    mapping.write_text(serialize_turtle(MappingDocument()))
    assert run("execute", sample_path, mapping, "-o", tmp_path / "e.nq") == 0
    assert (tmp_path / "e.nq").read_text() == ""


def _nq(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_evaluate(tmp_path, capsys):
    a = _nq(tmp_path, "a.nq", "<http://s> <http://p> <http://o> <urn:cell:S:A2> .\n")
    renamed = _nq(tmp_path, "b.nq", "<http://t> <http://p> <http://q> <urn:cell:S:A2> .\n")
    other = _nq(tmp_path, "c.nq", '<http://s> <http://p> "x" <urn:cell:S:B2> .\n')
    for actual, expected, f in ((a, a, 1.0), (renamed, a, 1.0), (other, a, 0.0)):
        assert run("evaluate", actual, expected, "--out-dir", tmp_path) == 0
        metrics = json.loads((tmp_path / f"{actual.stem}.metrics.json").read_text())
        assert metrics["total"]["fmeasure"] == f
    assert "f-measure" in capsys.readouterr().out


def test_evaluate_bad_nquads(tmp_path, capsys):
    bad = _nq(tmp_path, "bad.nq", "garbage\n")
    assert run("evaluate", bad, bad, "--out-dir", tmp_path) == 1


def test_pipeline_with_expected(sample_path, tmp_path):
    run("pipeline", sample_path, "--out-dir", tmp_path / "first")
    truth = tmp_path / "first" / "sample.nq"
    assert run("pipeline", sample_path, "--out-dir", tmp_path / "second", "--expected", truth,
               "--namespace-entity", "http://other.org/e/") == 0
    metrics = json.loads((tmp_path / "second" / "sample.metrics.json").read_text())
    assert metrics["total"]["fmeasure"] == 1.0


def test_pipeline_directory(sample_path, tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    (src / "one.json").write_text(sample_path.read_text())
    (src / "two.json").write_text(serialize_canonical(sheet_from_rows("Sheet1", [["n"], [1], [2]])))
    run("pipeline", src, "--out-dir", tmp_path / "truth")
    assert run("pipeline", src, "--out-dir", tmp_path / "out", "--expected", tmp_path / "truth") == 0
    agg = json.loads((tmp_path / "out" / "aggregate.metrics.json").read_text())
    assert set(agg["sheets"]) == {"one:Sheet1", "two:Sheet1"}
    assert agg["total"]["fmeasure"] == 1.0


def test_pipeline_deterministic(sample_path, tmp_path):
    for d in ("r1", "r2"):
        assert run("pipeline", sample_path, "--out-dir", tmp_path / d, "--dump-canonical") == 0
    names = sorted(p.name for p in (tmp_path / "r1").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "r2").iterdir())
    for name in names:
        assert (tmp_path / "r1" / name).read_bytes() == (tmp_path / "r2" / name).read_bytes()


def test_config_file_and_bad_config(sample_path, tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"namespaces": {"entity": "http://cfg.org/"}}))
    assert run("predict", sample_path, "--config", cfg, "--out-dir", tmp_path) == 0
    assert "http://cfg.org/" in (tmp_path / "sample.rml.ttl").read_text()
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run("predict", sample_path, "--config", cfg, "--out-dir", tmp_path) == 1


def test_usage_error():
    with pytest.raises(SystemExit):
        cli.main([])
