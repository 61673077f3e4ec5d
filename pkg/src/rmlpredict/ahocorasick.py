"""Multi-pattern dictionary matching with whole-token, longest-match semantics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator


@dataclass(frozen=True)
class Match:
    start: int
    end: int  # exclusive
    label: str

    @property
    def length(self) -> int:
        return self.end - self.start


class Automaton:
    def __init__(self, labels: Iterable[str]):
        self._goto: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._out: list[list[str]] = [[]]
        for label in dict.fromkeys(labels):
            if not label:
                raise ValueError("dictionary labels must be non-empty")
            self._insert(label)
        self._link()

    def _insert(self, label: str):
        state = 0
        for ch in label:
            nxt = self._goto[state].get(ch)
            if nxt is None:
                nxt = len(self._goto)
                self._goto.append({})
                self._fail.append(0)
                self._out.append([])
                self._goto[state][ch] = nxt
            state = nxt
        self._out[state].append(label)

    def _link(self):
        queue = deque(self._goto[0].values())
        while queue:
            state = queue.popleft()
            for ch, nxt in self._goto[state].items():
                queue.append(nxt)
                f = self._fail[state]
                while f and ch not in self._goto[f]:
                    f = self._fail[f]
                target = self._goto[f].get(ch, 0)
                self._fail[nxt] = target if target != nxt else 0
                self._out[nxt] = self._out[nxt] + self._out[self._fail[nxt]]

    def iter(self, text: str) -> Iterator[Match]:
        """All (possibly overlapping) occurrences, ordered by end position."""
        state = 0
        for i, ch in enumerate(text):
            while state and ch not in self._goto[state]:
                state = self._fail[state]
            state = self._goto[state].get(ch, 0)
            for label in self._out[state]:
                yield Match(i + 1 - len(label), i + 1, label)


def on_token_boundary(text: str, start: int, end: int) -> bool:
    before_ok = start == 0 or not text[start - 1].isalnum()
    after_ok = end == len(text) or not text[end].isalnum()
    return before_ok and after_ok


def remove_overlaps(matches: Iterable[Match]) -> list[Match]:
    """Keep longest matches first (earlier start on equal length); result in text order."""
    kept: list[Match] = []
    for m in sorted(matches, key=lambda m: (-m.length, m.start)):
        if all(m.end <= k.start or m.start >= k.end for k in kept):
            kept.append(m)
    return sorted(kept, key=lambda m: m.start)


class Gazetteer:
    """Label to IRI dictionary with a compiled matcher; immutable once built."""

    def __init__(self, entries: dict[str, str]):
        if any(not label for label in entries):
            raise ValueError("gazetteer labels must be non-empty")
        self.entries = dict(sorted(entries.items()))
        self._automaton = Automaton(self.entries)

    def find(self, text: str) -> list[Match]:
        hits = [m for m in self._automaton.iter(text) if on_token_boundary(text, m.start, m.end)]
        return remove_overlaps(hits)

    def link(self, text: str) -> list[str]:
        """Distinct IRIs in order of first occurrence."""
        return list(dict.fromkeys(self.entries[m.label] for m in self.find(text)))

    def __eq__(self, other):
        return isinstance(other, Gazetteer) and self.entries == other.entries

    def __hash__(self):
        return hash(tuple(self.entries.items()))

    def __repr__(self):
        return f"Gazetteer({len(self.entries)} entries)"
