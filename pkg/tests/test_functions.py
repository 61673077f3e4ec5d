import datetime as dt

import pytest
from hypothesis import given, strategies as st

from reference_values import SERIAL, SERIAL_DATETIME, SERIAL_FORMAT
from rmlpredict import functions as fn
from rmlpredict.ahocorasick import Gazetteer
from rmlpredict.cells import Boolean, Numeric, RichText, Text
from rmlpredict.functions import Accessor, FunctionCall, FunctionId, TermType
from rmlpredict.rdf import IRI, Literal, XSD_STRING
from rmlpredict.richtext import MalformedHtmlError


def lit(text, datatype):
    return Literal(text, datatype)


# -- parseNumber ---------------------------------------------------------------

def test_parse_number_examples():
    assert fn.parse_number(Text("3,14"), ",") == lit("3.14", fn.XSD_DECIMAL)
    assert fn.parse_number(Numeric(42.0), integer_only=True) == lit("42", fn.XSD_INTEGER)
    assert fn.parse_number(Text("Baseline")) is None
    assert fn.parse_number(Text("N/A")) is None


@pytest.mark.parametrize("text, point, expected", [
    ("042", ".", ("42", fn.XSD_INTEGER)),
    ("1,234.50", ".", ("1234.5", fn.XSD_DECIMAL)),
    ("1.234,5", ",", ("1234.5", fn.XSD_DECIMAL)),
    ("approx. 12 units", ".", ("12", fn.XSD_INTEGER)),
    ("-0.5", ".", ("-0.5", fn.XSD_DECIMAL)),
])
def test_parse_number_text(text, point, expected):
    assert fn.parse_number(Text(text), point) == lit(*expected)


def test_integer_only_rejects_fractions():
    assert fn.parse_number(Text("4.2"), integer_only=True) is None
    assert fn.parse_number(Numeric(4.2), integer_only=True) is None


def test_integer_list():
    found = fn.parse_number_all(Text("42, 15; 3"), integer_only=True, multiple=True)
    assert [l.lexical for l in found] == ["42", "15", "3"]


@given(st.integers(-10**12, 10**12))
def test_parse_number_integers(n):
    assert fn.parse_number(Text(str(n))) == lit(str(n), fn.XSD_INTEGER)
    assert fn.parse_number(Numeric(float(n)), integer_only=True) == lit(str(n), fn.XSD_INTEGER)


# -- parseBoolean --------------------------------------------------------------

def test_parse_boolean_examples():
    assert fn.parse_boolean(Text("Yes")) == lit("true", fn.XSD_BOOLEAN)
    assert fn.parse_boolean(Text("No")) == lit("false", fn.XSD_BOOLEAN)
    assert fn.parse_boolean(Numeric(0.0, '"Yes";;"No";')) == lit("false", fn.XSD_BOOLEAN)
    assert fn.parse_boolean(Text("maybe")) is None
    assert fn.parse_boolean(Boolean(True)) == lit("true", fn.XSD_BOOLEAN)
    assert fn.parse_boolean(Numeric(2)) is None


def test_parse_boolean_custom_lexicon():
    call = FunctionCall(FunctionId.PARSE_BOOLEAN, true_tokens=("da",), false_tokens=("njet",))
    assert fn.apply(call, Text("DA")) == [lit("true", fn.XSD_BOOLEAN)]
    assert fn.apply(call, Text("yes")) == []


def test_overlapping_lexicons_rejected():
    with pytest.raises(ValueError):
        FunctionCall(FunctionId.PARSE_BOOLEAN, true_tokens=("x",), false_tokens=("X",))


# -- dates ---------------------------------------------------------------------

def test_serial_example():
    assert fn.parse_datetime(Numeric(SERIAL, SERIAL_FORMAT)) == lit(SERIAL_DATETIME, fn.XSD_DATETIME)
    assert fn.parse_date(Numeric(SERIAL, SERIAL_FORMAT)) == lit("2021-02-01", fn.XSD_DATE)


def test_text_date_examples():
    assert fn.parse_date(Text("01.02.2021")) == lit("2021-02-01", fn.XSD_DATE)
    assert fn.parse_date(Text("n/a")) is None
    assert fn.parse_datetime(Text("02/01/2021 08:21 AM")) == lit("2021-02-01T08:21:00", fn.XSD_DATETIME)
    assert fn.parse_datetime(Text("02/01/2021 08:21 PM")) == lit("2021-02-01T20:21:00", fn.XSD_DATETIME)


def test_leap_bug_region():
    assert fn.serial_to_datetime(1) == dt.datetime(1900, 1, 1)
    assert fn.serial_to_datetime(59) == dt.datetime(1900, 2, 28)
    assert fn.serial_to_datetime(61) == dt.datetime(1900, 3, 1)


@given(st.dates(min_value=dt.date(1900, 3, 1), max_value=dt.date(9999, 12, 30)),
       st.integers(0, 86399))
def test_serial_agrees_with_calendar(day, second):
    # from March 1900 on, serial n is n days after 1899-12-30
    serial = (day - dt.date(1899, 12, 30)).days + second / 86400
    moment = dt.datetime.combine(day, dt.time()) + dt.timedelta(seconds=second)
    assert fn.serial_to_datetime(serial) == moment


# -- entity linking -------------------------------------------------------------

def test_entity_linking_examples():
    gaz = Gazetteer({"DFKI": ":dfki", "TUKL": ":tukl"})
    assert fn.entity_linking(Text("DFKI; TUKL"), gaz) == [IRI(":dfki"), IRI(":tukl")]
    assert fn.entity_linking(Text(""), gaz) == []
    gaz = Gazetteer({"AB": ":ab", "ABC": ":abc"})
    assert fn.entity_linking(Text("AB ABC"), gaz) == [IRI(":ab"), IRI(":abc")]


# -- rich-text extraction --------------------------------------------------------

def test_get_entities_by_tag():
    inner = FunctionCall(FunctionId.PARSE_NUMBER)
    call = FunctionCall(FunctionId.GET_ENTITIES_BY_TAG, tag="b", inner=inner, inner_accessor=Accessor.JSON)
    assert [t.lexical for t in fn.apply(call, RichText("<b>42</b> x <b>7</b>"))] == ["42", "7"]
    date = FunctionCall(FunctionId.GET_ENTITIES_BY_TAG, tag="i", inner=FunctionCall(FunctionId.PARSE_DATE),
                        inner_accessor=Accessor.JSON)
    assert fn.apply(date, RichText("<i>01.02.2021</i>")) == [lit("2021-02-01", fn.XSD_DATE)]
    assert fn.get_entities_by_tag("plain", "b") == []


def test_get_entities_by_color():
    inner = FunctionCall(FunctionId.PARSE_DATE)
    html = '<font color="#ff0000">01.02.2021</font> <font color="#00ff00">02.02.2021</font>'
    assert fn.get_entities_by_color(html, "#ff0000", inner) == [lit("2021-02-01", fn.XSD_DATE)]
    assert fn.get_entities_by_color(html, "#0000ff", inner) == []
    assert fn.get_entities_by_color('<font color="#FF0000">x</font>', "#ff0000") == [Literal("x", XSD_STRING)]


def test_get_entities_by_unformatted():
    assert fn.get_entities_by_unformatted("plain <b>bold</b>") == [Literal("plain", XSD_STRING)]
    assert fn.get_entities_by_unformatted("<b>all bold</b>") == []
    assert fn.get_entities_by_unformatted('<font color="#000000">x</font>') == [Literal("x", XSD_STRING)]


def test_format_key_selects_exact_combination():
    html = '<b>a</b> <b><font color="#ff0000">c</font></b>'
    assert fn.extract_spans(RichText(html), FunctionId.GET_ENTITIES_BY_TAG, tag="b", format_key="b") == [Text("a")]
    assert fn.extract_spans(RichText(html), FunctionId.GET_ENTITIES_BY_TAG, tag="b") == [Text("a"), Text("c")]


def test_plain_cells_are_wholly_unformatted():
    spans = fn.extract_spans(Text(" x "), FunctionId.GET_ENTITIES_BY_UNFORMATTED, format_key="unformatted")
    assert spans == [Text("x")]
    assert fn.extract_spans(Text("x"), FunctionId.GET_ENTITIES_BY_TAG, tag="b", format_key="b") == []


def test_malformed_html_raises():
    with pytest.raises(MalformedHtmlError):
        fn.get_entities_by_tag("<b>x", "b")


# -- accessors -----------------------------------------------------------------

@pytest.mark.parametrize("accessor, value, expected", [
    (Accessor.VALUE, Numeric(42), Text("42")),
    (Accessor.VALUE_STRING, Numeric(42), None),
    (Accessor.VALUE_STRING, RichText("<b>a</b> b"), Text("a b")),
    (Accessor.VALUE_INT, Numeric(1.5), None),
    (Accessor.VALUE_INT, Numeric(2), Numeric(2)),
    (Accessor.VALUE_NUMERIC, Text("2"), None),
    (Accessor.VALUE_BOOLEAN, Boolean(False), Boolean(False)),
    (Accessor.JSON, Text("x"), Text("x")),
])
def test_project(accessor, value, expected):
    assert fn.project(accessor, value) == expected


def test_object_terms_plain_maps():
    assert fn.object_terms(Numeric(3), Accessor.VALUE_INT, None, TermType.LITERAL, fn.XSD_INTEGER) == [
        lit("3", fn.XSD_INTEGER)]
    assert fn.object_terms(Numeric(0.5), Accessor.VALUE_NUMERIC, None, TermType.LITERAL, fn.XSD_DECIMAL) == [
        lit("0.5", fn.XSD_DECIMAL)]
    assert fn.object_terms(Text("x"), Accessor.VALUE_INT, None, TermType.LITERAL, fn.XSD_INTEGER) == []


def test_call_validation():
    with pytest.raises(ValueError):
        FunctionCall(FunctionId.ENTITY_LINKING)
    with pytest.raises(ValueError):
        FunctionCall(FunctionId.GET_ENTITIES_BY_TAG, tag="blink")
    with pytest.raises(ValueError):
        FunctionCall(FunctionId.GET_ENTITIES_BY_COLOR, color="red")
    with pytest.raises(ValueError):
        FunctionCall(FunctionId.PARSE_NUMBER, decimal_point=";")
