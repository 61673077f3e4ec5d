import pytest
from hypothesis import given, strategies as st

from rmlpredict import richtext as rt
from rmlpredict.ingest import FormatRun, runs_to_html


def test_segments_merge_equal_styles():
    segs = rt.segments('a <b>b</b><b>c</b> <font color="#FF0000">d</font>')
    assert [(t, s.key) for t, s in segs] == [("a ", "unformatted"), ("bc", "b"), (" ", "unformatted"), ("d", "color:#ff0000")]


def test_nested_styles_combine():
    segs = rt.segments('<font color="#ff0000"><b>x</b></font>')
    assert segs == [("x", rt.Style(frozenset({"b"}), "#ff0000"))]
    assert segs[0][1].key == "b+color:#ff0000"


def test_style_key_round_trip():
    for key in ["unformatted", "b", "i+u", "b+i+u+strike+color:#00ff00", "color:#123abc"]:
        assert rt.style_from_key(key).key == key


def test_black_is_default_colour():
    assert rt.normalize_color("#000000") is None
    assert rt.normalize_color("#FF0000") == "#ff0000"
    assert rt.segments('<font color="#000000">x</font>')[0][1].formatted is False


def test_elements_by_tag_and_colour():
    html = '<b>42</b> x <b>7</b> <font color="#ff0000">r</font>'
    assert rt.elements(html, tag="b") == ["42", "7"]
    assert rt.elements(html, color="#FF0000") == ["r"]
    assert rt.elements(html, tag="i") == []


def test_entities_are_decoded():
    assert rt.strip_tags("a &amp; <b>&lt;b&gt;</b>") == "a & <b>"


@pytest.mark.parametrize("html", ["<b>x", "x</b>", "<b><i>x</b></i>", "<table>x</table>"])
def test_malformed_fragments_raise(html):
    with pytest.raises(rt.MalformedHtmlError):
        rt.segments(html)


_runs = st.lists(
    st.tuples(
        st.text(alphabet="ab <&>\"'é", min_size=1, max_size=5),
        st.booleans(), st.booleans(), st.booleans(), st.booleans(),
        st.sampled_from([None, "#ff0000", "#00AA00", "#000000"]),
    ),
    max_size=6,
)


@given(_runs)
def test_runs_to_html_preserves_text_and_styles(pieces):
    text, runs, pos = "", [], 0
    for chunk, b, i, u, s, color in pieces:
        runs.append(FormatRun(pos, pos + len(chunk), b, i, u, s, color))
        text += chunk
        pos += len(chunk)
    html = runs_to_html(text, runs)
    assert rt.strip_tags(html) == text
    # each character keeps the style of its run
    expected = "".join(r.style.key[0] * (r.end - r.start) for r in runs)
    got = "".join(style.key[0] * len(t) for t, style in rt.segments(html))
    assert got == expected


@given(st.text(max_size=30))
def test_escape_round_trip(text):
    assert rt.strip_tags(rt.escape(text)) == text
