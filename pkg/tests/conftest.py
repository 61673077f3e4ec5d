import io
from pathlib import Path

import pytest

from rmlpredict.cells import Numeric, RichText, Text, sheet_from_rows

FIXTURES = Path(__file__).parent / "fixtures"

YES_NO = '"Yes";;"No";'


def sample_rows():
    return [
        ["ID", "Active", "Date", "Editors", "Deadlines"],
        [Numeric(1), Numeric(1, YES_NO), Text("2021-02-01"), Text("DFKI"),
         RichText('<font color="#ff0000">2021-02-01</font> draft, <i>2021-03-05</i> final')],
        [Numeric(2), Numeric(0, YES_NO), Numeric(44260, "m/d/yyyy"), Text("DFKI; TUKL"),
         RichText('<font color="#ff0000">2021-04-01</font>')],
        [Numeric(3), Numeric(1, YES_NO), Text("03/05/2021"), Text("TUKL"), RichText("<i>2021-05-05</i>")],
        [Numeric(4), Numeric(0, YES_NO), Text("01.04.2021"), Text("DFKI"),
         RichText('<font color="#ff0000">2021-06-01</font> and <i>2021-06-07</i>')],
    ]


@pytest.fixture
def sample_sheet():
    return sheet_from_rows("Sheet1", sample_rows())


@pytest.fixture
def sample_path():
    return FIXTURES / "sample.json"


def xlsx_bytes(build) -> bytes:
    """Workbook bytes written by openpyxl; ``build(workbook)`` fills it."""
    openpyxl = pytest.importorskip("openpyxl")
    wb = openpyxl.Workbook()
    build(wb)
    buf = io.BytesIO()
    wb.save(buf)
    return buf.getvalue()

