import json

import pytest
from conftest import FIXTURES, sample_rows
from hypothesis import given, strategies as st

from rmlpredict.cells import (
    BLANK,
    Boolean,
    CanonicalFormatError,
    Cell,
    NoTableError,
    Numeric,
    RichText,
    Sheet,
    Text,
    column_index,
    column_letter,
    extract_table,
    parse_canonical,
    serialize_canonical,
    sheet_from_rows,
)


def test_single_text_cell():
    doc = '{"name": "S", "width": 1, "height": 1, "cells": [{"col": 0, "row": 0, "kind": "text", "text": "Hi"}]}'
    sheet = parse_canonical(doc)
    assert sheet.value(0, 0) == Text("Hi")


def test_numeric_format_is_kept_verbatim():
    doc = json.dumps({"name": "S", "width": 1, "height": 1, "cells": [
        {"col": 0, "row": 0, "kind": "numeric", "value": 44228.3479166667, "format": "MM/DD/YYYY HH:MM AM/PM"}]})
    value = parse_canonical(doc).value(0, 0)
    assert value == Numeric(44228.3479166667, "MM/DD/YYYY HH:MM AM/PM")


def test_empty_cell_list_gives_blank_sheet():
    sheet = parse_canonical('{"name": "S", "width": 2, "height": 2, "cells": []}')
    assert all(sheet.value(c, r) == BLANK for c in range(2) for r in range(2))
    assert serialize_canonical(sheet).rstrip().endswith('"cells": []\n}')


def test_rich_text_html_preserved():
    sheet = sheet_from_rows("S", [[RichText("<b>a</b> b")]])
    assert '"html": "<b>a</b> b"' in serialize_canonical(sheet)


@pytest.mark.parametrize("doc, where", [
    ('{"name": "S", "width": 1, "height": 1, "cells": [{"col": 0, "row": 0, "kind": "text"}]}', "cells[0]"),
    ('{"name": "S", "width": 1, "height": 1, "cells": [{"col": 0, "row": 0, "kind": "text", "text": "a", "html": "x"}]}', "cells[0]"),
    ('{"name": "S", "width": 1, "height": 1, "cells": [{"col": 0, "row": 0, "kind": "date", "text": "a"}]}', "cells[0].kind"),
    ('{"name": "S", "width": 1, "height": 1, "cells": [{"col": -1, "row": 0, "kind": "blank"}]}', "cells[0].col"),
    ('{"name": "S", "width": 1, "height": 1, "cells": [{"col": 3, "row": 0, "kind": "blank"}]}', ""),
    ('{"name": "S", "width": 1, "height": 1}', "document"),
    ('{"name": "S", "width": 1, "height": 1, "cells": [], "extra": 1}', "document"),
    ('{"name": "S", ', "line 1"),
])
def test_malformed_documents_name_the_problem(doc, where):
    with pytest.raises(CanonicalFormatError) as err:
        parse_canonical(doc)
    assert where in str(err.value)


def test_duplicate_cells_rejected():
    with pytest.raises(ValueError):
        Sheet("S", 1, 1, (Cell(0, 0, Text("a")), Cell(0, 0, Text("b"))))


@pytest.mark.parametrize("index, letters", [(0, "A"), (25, "Z"), (26, "AA"), (701, "ZZ"), (702, "AAA")])
def test_column_letters(index, letters):
    assert column_letter(index) == letters
    assert column_index(letters) == index


@given(st.integers(min_value=0, max_value=20000))
def test_column_letter_round_trip(index):
    assert column_index(column_letter(index)) == index


_values = st.one_of(
    st.just(BLANK),
    st.builds(Boolean, st.booleans()),
    st.builds(Numeric, st.floats(allow_nan=False, allow_infinity=False, width=64),
              st.one_of(st.none(), st.sampled_from(["0.00", "m/d/yyyy", '"Yes";;"No";']))),
    st.builds(Text, st.text(max_size=12)),
    st.builds(RichText, st.sampled_from(["<b>a</b>", 'x <font color="#ff0000">y</font>', "<i>é\"</i>"])),
)


@st.composite
def sheets(draw):
    width = draw(st.integers(0, 5))
    height = draw(st.integers(0, 5))
    coords = [(c, r) for c in range(width) for r in range(height)]
    chosen = draw(st.lists(st.sampled_from(coords), unique=True, max_size=len(coords))) if coords else []
    cells = tuple(Cell(c, r, draw(_values)) for c, r in chosen)
    return Sheet(draw(st.text(max_size=8)), width, height, cells)


@given(sheets())
def test_canonical_round_trip(sheet):
    text = serialize_canonical(sheet)
    again = parse_canonical(text)
    assert again == sheet
    assert serialize_canonical(again) == text


def test_sheet_drops_blanks_and_orders_row_major():
    sheet = Sheet("S", 2, 2, (Cell(1, 1, Text("d")), Cell(0, 0, BLANK), Cell(0, 1, Text("c"))))
    assert [c.coordinate for c in sheet.cells] == ["A2", "B2"]


def test_extract_table_basic():
    sheet = sheet_from_rows("S", [["h1", "h2"], [1, 2], [3, None], [None, "x"]])
    table = extract_table(sheet)
    assert table.header_row == 0
    assert table.entity_rows == (1, 2, 3)
    assert table.header(1) == "h2"


def test_extract_table_skips_blank_rows(sample_sheet):
    sheet = sheet_from_rows("S", [["h"], [1], [None], [2]])
    assert extract_table(sheet).entity_rows == (1, 3)
    assert extract_table(sample_sheet).columns == (0, 1, 2, 3, 4)


def test_extract_table_blank_sheet():
    with pytest.raises(NoTableError, match="no table"):
        extract_table(Sheet("S", 3, 3, ()))


def test_sample_fixture_file_matches_builder():
    sheet = parse_canonical((FIXTURES / "sample.json").read_text(encoding="utf-8"))
    assert sheet == sheet_from_rows("Sheet1", sample_rows())
