from hypothesis import given, settings, strategies as st

from oracles import brute_force_link
from rmlpredict.ahocorasick import Automaton, Gazetteer, Match, remove_overlaps

ALPHABET = "ab c;"


def test_automaton_finds_overlapping_occurrences():
    found = sorted((m.start, m.end, m.label) for m in Automaton(["he", "she", "his", "hers"]).iter("ushers"))
    assert found == [(1, 4, "she"), (2, 4, "he"), (2, 6, "hers")]


def test_longest_match_wins():
    gaz = Gazetteer({"AB": ":ab", "ABC": ":abc", "B": ":b"})
    assert gaz.link("AB ABC") == [":ab", ":abc"]
    assert gaz.link("xABC") == []  # no token boundary


def test_remove_overlaps_prefers_longer_then_earlier():
    kept = remove_overlaps([Match(0, 2, "x"), Match(1, 4, "y"), Match(3, 5, "z")])
    assert kept == [Match(1, 4, "y")]


def test_empty_labels_rejected():
    import pytest

    with pytest.raises(ValueError):
        Gazetteer({"": ":x"})


@settings(max_examples=300)
@given(st.text(alphabet=ALPHABET, max_size=25),
       st.lists(st.text(alphabet=ALPHABET, min_size=1, max_size=4), max_size=12))
def test_matches_brute_force(text, labels):
    entries = {label: f":e{i}" for i, label in enumerate(dict.fromkeys(labels))}
    assert Gazetteer(entries).link(text) == brute_force_link(text, entries)
