"""Exact Ramsey numbers of tiny 3-graphs by exhaustive search over 2-colourings.

Triples of ``K_m^(3)`` are coloured in lexicographic order.  The first triple is
fixed to colour 0 (swapping colours is a symmetry) and every copy of the pattern
acts as a clause "not all one colour", propagated as soon as one triple of the
copy is left open.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

import numpy as np

from .core import Hypergraph3
from .errors import CapacityError, DomainError, ParseError

MAX_PATTERN_VERTICES = 8
MAX_PATTERN_EDGES = 6
MAX_M = 12


@dataclass
class RamseyResult:
    exact: int | None
    lower: int
    upper: int | None
    certificates: dict = field(default_factory=dict)  # m -> colouring avoiding a monochromatic copy
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"exact": self.exact, "lower": self.lower, "upper": self.upper, "trace": self.trace,
                "certificates": {str(m): serialize_colouring(c) for m, c in sorted(self.certificates.items())}}


def copies_in_complete(H: Hypergraph3, m: int) -> list[frozenset]:
    """Distinct hyperedge sets of copies of ``H`` in ``K_m^(3)``."""
    out = set()
    hv = H.vertex_count
    edges = list(H.hyperedges)
    for img in permutations(range(m), hv):
        out.add(frozenset(tuple(sorted(img[x] for x in e)) for e in edges))
    return sorted(out, key=sorted)


def _search(m: int, clauses: list[list[int]], n_tri: int, budget: int | None):
    """DFS with unit propagation; returns (colouring list or None, nodes, exhausted flag)."""
    by_tri = [[] for _ in range(n_tri)]
    for ci, cl in enumerate(clauses):
        for x in cl:
            by_tri[x].append(ci)
    col = [-1] * n_tri
    nodes = 0

    def assign(x, c, trail):
        # returns False on conflict
        stack = [(x, c)]
        while stack:
            y, cy = stack.pop()
            if col[y] != -1:
                if col[y] != cy:
                    return False
                continue
            col[y] = cy
            trail.append(y)
            for ci in by_tri[y]:
                cl = clauses[ci]
                open_, same = None, 0
                n_open = 0
                for z in cl:
                    if col[z] == -1:
                        n_open += 1
                        open_ = z
                    elif col[z] == cy:
                        same += 1
                if same == len(cl):
                    return False
                if n_open == 1 and same == len(cl) - 1:
                    stack.append((open_, 1 - cy))
        return True

    def undo(trail):
        for y in trail:
            col[y] = -1

    class Out(Exception):
        pass

    def rec(x):
        nonlocal nodes
        while x < n_tri and col[x] != -1:
            x += 1
        if x == n_tri:
            return True
        nodes += 1
        if budget is not None and nodes > budget:
            raise Out()
        for c in (0, 1):
            trail = []
            if assign(x, c, trail) and rec(x + 1):
                return True
            undo(trail)
        return False

    trail = []
    try:
        if n_tri == 0:
            return [], 0, True
        ok = assign(0, 0, trail) and rec(1)
    except Out:
        return None, nodes, False
    return (list(col) if ok else None), nodes, True


def find_monochromatic(H: Hypergraph3, m: int, colouring: dict):
    """Independent brute force: a vertex map giving a monochromatic copy, or None."""
    for img in permutations(range(m), H.vertex_count):
        cols = {colouring[tuple(sorted(img[x] for x in e))] for e in H.hyperedges}
        if len(cols) == 1:
            return img
    return None


def exact_ramsey(H: Hypergraph3, m_max: int = 8, budget: int | None = 5_000_000) -> RamseyResult:
    """Smallest ``m <= m_max`` forcing a monochromatic ``H`` in every 2-colouring of ``K_m^(3)``.

    Returns exact value when found; otherwise honest bounds.
    """
    if H.vertex_count > MAX_PATTERN_VERTICES or H.e > MAX_PATTERN_EDGES:
        raise CapacityError(f"pattern too large (limits: {MAX_PATTERN_VERTICES} vertices, {MAX_PATTERN_EDGES} hyperedges)")
    if H.e == 0:
        raise DomainError("pattern needs at least one hyperedge")
    if m_max > MAX_M:
        raise CapacityError(f"m_max above {MAX_M}")
    res = RamseyResult(None, H.vertex_count, None)
    for m in range(H.vertex_count, m_max + 1):
        triples = list(combinations(range(m), 3))
        index = {t: i for i, t in enumerate(triples)}
        clauses = [[index[t] for t in sorted(cp)] for cp in copies_in_complete(H, m)]
        colours, nodes, done = _search(m, clauses, len(triples), budget)
        if colours is not None:
            cert = {t: colours[i] for i, t in enumerate(triples)}
            res.certificates[m] = cert
            res.lower = m + 1
            res.trace.append({"m": m, "status": "avoiding colouring", "nodes": nodes, "copies": len(clauses)})
            continue
        if not done:
            res.trace.append({"m": m, "status": "budget exhausted", "nodes": nodes, "copies": len(clauses)})
            return res
        res.trace.append({"m": m, "status": "exhausted: every colouring has a monochromatic copy",
                          "nodes": nodes, "copies": len(clauses)})
        res.exact = res.upper = m
        return res
    return res


def complementary_pair_colouring(m: int = 6) -> dict:
    """On ``K_6^(3)`` give each triple containing vertex 0 colour 0 and the others colour 1.

    Every complementary pair of triples then gets opposite colours, so no two
    disjoint triples share a colour.
    """
    return {t: 0 if 0 in t else 1 for t in combinations(range(m), 3)}


def random_colouring(m: int, seed=0) -> dict:
    rng = np.random.default_rng([int(seed), 23])
    triples = list(combinations(range(m), 3))
    bitsv = rng.integers(0, 2, size=len(triples))
    return {t: int(b) for t, b in zip(triples, bitsv)}


def serialize_colouring(colouring: dict) -> str:
    return "".join(f"col {u} {v} {w} {c}\n" for (u, v, w), c in sorted(colouring.items()))


def parse_colouring(text: str) -> tuple[int, dict]:
    """Returns ``(m, colouring)``; every triple of ``0..m-1`` must be coloured exactly once."""
    col = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "col" or len(parts) != 5:
            raise ParseError("expected 'col u v w c'", lineno)
        try:
            u, v, w, c = map(int, parts[1:])
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
        if c not in (0, 1) or len({u, v, w}) != 3 or min(u, v, w) < 0:
            raise ParseError("bad triple or colour", lineno)
        t = tuple(sorted((u, v, w)))
        if t in col:
            raise ParseError(f"triple {t} coloured twice", lineno)
        col[t] = c
    m = max((max(t) for t in col), default=-1) + 1
    missing = [t for t in combinations(range(m), 3) if t not in col]
    if missing:
        raise ParseError(f"triple {missing[0]} has no colour")
    return m, col
