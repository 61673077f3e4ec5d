"""Brute-force reference implementations used by property tests."""

from rmlpredict.rdf import Literal


def brute_force_link(text, entries):
    """Every dictionary substring on token boundaries; longest first, then leftmost;
    overlaps dropped; distinct IRIs in text order."""
    hits = []
    for i in range(len(text)):
        for j in range(i + 1, len(text) + 1):
            if text[i:j] not in entries:
                continue
            left = i == 0 or not text[i - 1].isalnum()
            right = j == len(text) or not text[j].isalnum()
            if left and right:
                hits.append((i, j))
    taken = [False] * len(text)
    kept = []
    for i, j in sorted(hits, key=lambda h: (h[0] - h[1], h[0])):
        if not any(taken[i:j]):
            for k in range(i, j):
                taken[k] = True
            kept.append((i, j))
    out = []
    for i, j in sorted(kept):
        iri = entries[text[i:j]]
        if iri not in out:
            out.append(iri)
    return out


def optimal_matched_count(A, B):
    """Largest set of statement pairs that one injective resource map makes equal."""
    A = list(dict.fromkeys(map(tuple, A)))
    B = list(dict.fromkeys(map(tuple, B)))
    best = 0

    def extend(fwd, inv, a, b):
        fwd, inv = dict(fwd), dict(inv)
        for x, y in zip(a, b):
            if isinstance(x, Literal) or isinstance(y, Literal):
                if x != y:
                    return None
                continue
            if fwd.get(x, y) != y or inv.get(y, x) != x:
                return None
            fwd[x], inv[y] = y, x
        return fwd, inv

    def search(i, used, fwd, inv, count):
        nonlocal best
        if count + len(A) - i <= best:
            return
        if i == len(A):
            best = count
            return
        for j, b in enumerate(B):
            if j not in used:
                step = extend(fwd, inv, A[i], b)
                if step:
                    search(i + 1, used | {j}, step[0], step[1], count + 1)
        search(i + 1, used, fwd, inv, count)

    search(0, frozenset(), {}, {}, 0)
    return best
