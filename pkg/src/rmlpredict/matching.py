"""Resource matching between two provenance-annotated graphs and the resulting metrics.

Statements are grouped into per-cell graphs. A single injective match of
resources (IRIs and blank nodes) evolves cell by cell in row-major order; each
cell's statements are paired by a branch-and-bound permutation search, and only
bindings that are unambiguous within the cell are carried to the next one.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .cells import column_index
from .rdf import CellRef, Literal, ProvenancedStatement, is_resource

MISMATCH = 1


@dataclass
class MatchFunction:
    forward: dict = field(default_factory=dict)
    inverse: dict = field(default_factory=dict)

    def copy(self) -> "MatchFunction":
        return MatchFunction(dict(self.forward), dict(self.inverse))

    def inverted(self) -> "MatchFunction":
        return MatchFunction(dict(self.inverse), dict(self.forward))

    def bind(self, source, target):
        self.forward[source] = target
        self.inverse[target] = source

    def identities(self) -> int:
        return sum(1 for k, v in self.forward.items() if k == v)

    def image(self, term):
        """Where a term lands: literals stay, bound resources follow the match,
        unbound ones keep their identity unless that would break injectivity."""
        if not is_resource(term):
            return term
        if term in self.forward:
            return self.forward[term]
        if term in self.inverse:
            return _Unmatched(term)
        return term

    def apply(self, triple):
        return tuple(self.image(t) for t in triple)


@dataclass(frozen=True)
class _Unmatched:
    term: object


def distance(a, b, m: MatchFunction) -> int:
    """0 when triple ``a`` can be mapped onto ``b`` under ``m`` (recording the new
    bindings), otherwise the mismatch distance; ``m`` is untouched on mismatch."""
    pending: dict = {}
    pending_inv: dict = {}
    for x, y in zip(a, b):
        if isinstance(x, Literal) or isinstance(y, Literal):
            if x != y:
                return MISMATCH
            continue
        fx = m.forward.get(x, pending.get(x))
        iy = m.inverse.get(y, pending_inv.get(y))
        if fx is None and iy is None:
            pending[x] = y
            pending_inv[y] = x
        elif fx != y or iy != x:
            return MISMATCH
    for x, y in pending.items():
        m.bind(x, y)
    return 0


def order_for_matching(statements: Sequence) -> list:
    """Literal-object statements last, so right-to-left zipping checks them first."""
    triples = [_triple(s) for s in statements]
    return [t for t in triples if not isinstance(t[2], Literal)] + [t for t in triples if isinstance(t[2], Literal)]


def _triple(s):
    return s.triple if isinstance(s, ProvenancedStatement) else tuple(s)


def matched_count(A: Sequence, B: Sequence, m: MatchFunction) -> int:
    """|m(A) ∩ B| over distinct triples."""
    targets = set(map(tuple, B))
    return len({m.apply(a) for a in A} & targets)


def _agreement(a, b) -> int:
    return sum(1 for x, y in zip(a, b) if x == y)


class _Done(Exception):
    pass


def greedy_match(A: Sequence, B: Sequence, m0: MatchFunction | None = None,
                 threshold: float = 0) -> MatchFunction:
    """Permute A, zip it right to left against B and keep the best partial match.

    Branches whose accumulated distance exceeds ``threshold`` are pruned. A pair
    that could match may also be zipped as a mismatch when the threshold leaves
    room for it, so that its bindings do not block better pairs. Every
    search node is a candidate; the winner maximises matched statements, then
    bound resources, then identity bindings. ``m0`` is never mutated.
    """
    return _search(A, B, m0, threshold, False)[0]


def match_cell(A: Sequence, B: Sequence, m0: MatchFunction | None = None,
               threshold: float = 0) -> tuple[MatchFunction, MatchFunction]:
    """The greedy winner plus the match restricted to bindings shared by every
    candidate reaching the winner's matched count."""
    return _search(A, B, m0, threshold, True)


def _search(A, B, m0, threshold, track_common):
    m0 = m0.copy() if m0 is not None else MatchFunction()
    A = [tuple(t) for t in order_for_matching(A)]
    B = [tuple(t) for t in order_for_matching(B)]
    if len(A) < len(B):
        best, common = _search(B, A, m0.inverted(), threshold, track_common)
        return best.inverted(), common.inverted()
    if not B:
        return m0, m0

    target_count = len(set(B))
    base = len(m0.forward)
    best_key = None
    best = m0
    common: dict = {}

    def consider(m: MatchFunction):
        nonlocal best_key, best, common
        key = (matched_count(A, B, m), len(m.forward), m.identities())
        if best_key is None or key[0] > best_key[0]:
            common = dict(m.forward)
        elif key[0] == best_key[0] and track_common:
            common = {k: v for k, v in common.items() if m.forward.get(k) == v}
        if best_key is None or key > best_key:
            best_key, best = key, m
        if best_key[0] == target_count and (not track_common or len(common) == base):
            raise _Done

    def enumerate_(j: int, used: frozenset, m: MatchFunction, dist: float):
        consider(m)
        if j < 0:
            return
        b = B[j]
        order = sorted((i for i in range(len(A)) if i not in used), key=lambda i: -_agreement(A[i], b))
        for i in order:
            m_next = m.copy()
            d = distance(A[i], b, m_next)
            if dist + d <= threshold:
                enumerate_(j - 1, used | {i}, m_next, dist + d)
            if d == 0 and dist + MISMATCH <= threshold:
                # also try leaving the pair unbound; its bindings may block better pairs later
                enumerate_(j - 1, used | {i}, m, dist + MISMATCH)

    try:
        enumerate_(len(B) - 1, frozenset(), m0, 0)
    except _Done:
        pass
    shared = MatchFunction()
    for k, v in common.items():
        shared.bind(k, v)
    return best, shared


@dataclass(frozen=True)
class MetricsReport:
    tp: int = 0
    fn: int = 0
    fp: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fmeasure(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "MetricsReport") -> "MetricsReport":
        return MetricsReport(self.tp + other.tp, self.fn + other.fn, self.fp + other.fp)

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fn": self.fn,
            "fp": self.fp,
            "precision": self.precision,
            "recall": self.recall,
            "fmeasure": self.fmeasure,
        }


def cell_graphs(statements: Iterable[ProvenancedStatement]) -> dict[CellRef, list[tuple]]:
    graphs: dict[CellRef, list[tuple]] = defaultdict(list)
    for st in statements:
        if st.triple not in graphs[st.cell]:
            graphs[st.cell].append(st.triple)
    return dict(graphs)


def _cell_order(cell: CellRef):
    return (cell.row, column_index(cell.column))


@dataclass(frozen=True)
class CellResult:
    cell: CellRef
    metrics: MetricsReport


def evaluate_cells(actual: Iterable[ProvenancedStatement], expected: Iterable[ProvenancedStatement],
                   threshold: float = 0) -> tuple[MetricsReport, list[CellResult], MatchFunction]:
    actual, expected = list(actual), list(expected)
    sheets_a = {s.cell.sheet for s in actual}
    sheets_e = {s.cell.sheet for s in expected}
    if len(sheets_a | sheets_e) > 1:
        raise ValueError(f"statements span several sheets: {sorted(sheets_a | sheets_e)}")
    ga, ge = cell_graphs(actual), cell_graphs(expected)
    m = MatchFunction()
    total = MetricsReport()
    results = []
    for cell in sorted(set(ga) | set(ge), key=_cell_order):
        ca, ce = ga.get(cell, []), ge.get(cell, [])
        cell_match = m
        if ca and ce:
            # score the cell with its best match but only carry bindings that every
            # equally good match agrees on; arbitrary picks would poison later cells
            cell_match, m = match_cell(ca, ce, m, threshold)
        mapped = {cell_match.apply(t) for t in ca}
        targets = set(ce)
        r = MetricsReport(len(targets & mapped), len(targets - mapped), len(mapped - targets))
        results.append(CellResult(cell, r))
        total = total + r
    return total, results, m


def evaluate_sheet(actual: Iterable[ProvenancedStatement], expected: Iterable[ProvenancedStatement],
                   threshold: float = 0) -> MetricsReport:
    """tp/fn/fp summed over cell graphs of one sheet."""
    return evaluate_cells(actual, expected, threshold)[0]


def evaluate(actual: Iterable[ProvenancedStatement], expected: Iterable[ProvenancedStatement],
             threshold: float = 0) -> tuple[dict[str, MetricsReport], MetricsReport]:
    """Per-sheet reports plus their sum; sheets present on only one side still count."""
    by_a: dict[str, list] = defaultdict(list)
    by_e: dict[str, list] = defaultdict(list)
    for s in actual:
        by_a[s.cell.sheet].append(s)
    for s in expected:
        by_e[s.cell.sheet].append(s)
    per_sheet = {}
    for sheet in sorted(set(by_a) | set(by_e)):
        per_sheet[sheet] = evaluate_sheet(by_a.get(sheet, []), by_e.get(sheet, []), threshold)
    total = MetricsReport()
    for r in per_sheet.values():
        total = total + r
    return per_sheet, total


INFINITE = math.inf
