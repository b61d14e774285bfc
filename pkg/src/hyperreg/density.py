"""Bipartite densities and graph-regularity verifiers.

Two notions are checked, never converted into each other:

* ``(d, delta)``-regular: every ``X, Y`` with ``|X| >= delta|A|``, ``|Y| >= delta|B|``
  has ``(1-delta) d < d(X, Y) < (1+delta) d``;
* ``delta``-regular: the same subsets satisfy ``|d(X, Y) - d(A, B)| <= delta``.

Subset-size thresholds are rounded up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import KPartiteGraph, as_fraction, bits, mask_of
from .errors import CapacityError, DomainError

EXHAUSTIVE_CAP = 18
MODES = ("exhaustive", "sampled")


@dataclass(frozen=True)
class GraphRegVerdict:
    regular: bool
    status: str  # "regular" | "irregular" | "empty"
    mode: str
    witness: tuple | None = None  # (X, Y, density) with X in class i, Y in class j
    tested: int = 0

    def to_json(self) -> dict:
        out = {"status": self.status, "regular": self.regular, "mode": self.mode, "tested": self.tested}
        if self.witness is not None:
            x, y, dens = self.witness
            out["witness"] = {"X": list(x), "Y": list(y), "density": str(dens)}
        return out


def _as_graph(G) -> KPartiteGraph:
    return G if isinstance(G, KPartiteGraph) else G.graph


def edge_count_between(G, i: int, j: int, X: Iterable[int], Y: Iterable[int]) -> int:
    G = _as_graph(G)
    ymask = mask_of(Y)
    rows = G.rows[i, j]
    return sum((rows[u] & ymask).bit_count() for u in set(X))


def bipartite_density(G, i: int, j: int, X: Iterable[int] | None = None,
                      Y: Iterable[int] | None = None) -> Fraction:
    """``e(X, Y) / (|X||Y|)``; ``None`` means the whole class."""
    G = _as_graph(G)
    X = range(G.class_sizes[i]) if X is None else set(X)
    Y = range(G.class_sizes[j]) if Y is None else set(Y)
    if not X or not Y:
        raise DomainError("density of an empty vertex set is undefined")
    return Fraction(edge_count_between(G, i, j, X, Y), len(X) * len(Y))


class _Bounds:
    """Violation test ``dens <= lo or dens >= hi`` (strict) or ``< / >`` (closed)."""

    def __init__(self, lo: Fraction, hi: Fraction, ref: Fraction, closed: bool):
        self.lo, self.hi, self.ref, self.closed = lo, hi, ref, closed

    def bad(self, e: int, xy: int) -> bool:
        d = Fraction(e, xy)
        if self.closed:
            return d < self.lo or d > self.hi
        return d <= self.lo or d >= self.hi


def _threshold(delta: Fraction, size: int) -> int:
    return max(1, math.ceil(delta * size))


def _rank_key(dens: Fraction, ref: Fraction, size: int, xmask: int):
    # most deviating first; ties: upper side, larger sets, lower X mask
    return (abs(dens - ref), dens > ref, size, -xmask)


def _scan_exhaustive(rows, a: int, b: int, thr_a: int, thr_b: int, bounds: _Bounds):
    """Exact search: all X on the ``a`` side, extremal Y of each size on the ``b`` side."""
    M = np.zeros((a, b), dtype=np.int64)
    for u, r in enumerate(rows):
        for v in bits(r):
            M[u, v] = 1
    masks = np.arange(1 << a, dtype=np.int64)
    B = (masks[:, None] >> np.arange(a, dtype=np.int64)) & 1
    sizes = B.sum(axis=1)
    keep = sizes >= thr_a
    masks, B, sizes = masks[keep], B[keep], sizes[keep]
    if len(masks) == 0 or thr_b > b:
        return None, 0
    deg = B @ M
    order = np.argsort(-deg, axis=1, kind="stable")
    sdeg = np.take_along_axis(deg, order, axis=1)
    top = np.cumsum(sdeg, axis=1)
    bot = np.cumsum(sdeg[:, ::-1], axis=1)
    s = np.arange(1, b + 1, dtype=np.int64)
    xy = sizes[:, None] * s[None, :]
    valid = (s >= thr_b)[None, :]
    lo, hi = bounds.lo, bounds.hi
    if bounds.closed:
        high_bad = top * hi.denominator > hi.numerator * xy
        low_bad = bot * lo.denominator < lo.numerator * xy
    else:
        high_bad = top * hi.denominator >= hi.numerator * xy
        low_bad = bot * lo.denominator <= lo.numerator * xy
    high_bad &= valid
    low_bad &= valid
    tested = int(valid.sum()) * len(masks) * 2
    if not (high_bad.any() or low_bad.any()):
        return None, tested
    best = None
    ref = bounds.ref
    for side, bad, cum in (("high", high_bad, top), ("low", low_bad, bot)):
        if not bad.any():
            continue
        rr, cc = np.nonzero(bad)
        dev = np.abs(cum[rr, cc] / xy[rr, cc] - float(ref))
        # float ranking picks a few candidates; exact comparison settles them
        cand = np.argsort(-dev, kind="stable")[:64]
        for c in cand:
            r, col = int(rr[c]), int(cc[c])
            size = int(s[col])
            dens = Fraction(int(cum[r, col]), int(sizes[r]) * size)
            key = _rank_key(dens, ref, int(sizes[r]) + size, int(masks[r]))
            if best is None or key > best[0]:
                ys = order[r, :size] if side == "high" else order[r, b - size:]
                best = (key, int(masks[r]), tuple(sorted(int(y) for y in ys)), dens)
    _, xmask, ys, dens = best
    return (tuple(bits(xmask)), ys, dens), tested


def _scan_sampled(rows, a, b, thr_a, thr_b, bounds: _Bounds, budget: int, seed):
    rng = np.random.default_rng(seed)
    best = None
    if thr_a > a or thr_b > b:
        return None, 0
    for _ in range(budget):
        x = int(rng.integers(thr_a, a + 1))
        y = int(rng.integers(thr_b, b + 1))
        X = sorted(int(u) for u in rng.choice(a, x, replace=False))
        Y = sorted(int(v) for v in rng.choice(b, y, replace=False))
        ymask = mask_of(Y)
        e = sum((rows[u] & ymask).bit_count() for u in X)
        if bounds.bad(e, x * y):
            dens = Fraction(e, x * y)
            key = _rank_key(dens, bounds.ref, x + y, mask_of(X))
            if best is None or key > best[0]:
                best = (key, tuple(X), tuple(Y), dens)
    if best is None:
        return None, budget
    return best[1:], budget


def _check(G, i, j, delta: Fraction, bounds_for, mode, budget, seed, cap) -> GraphRegVerdict:
    G = _as_graph(G)
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    a, b = G.class_sizes[i], G.class_sizes[j]
    if a == 0 or b == 0 or G.edge_count(i, j) == 0:
        return GraphRegVerdict(True, "empty", mode)
    bounds = bounds_for(Fraction(G.edge_count(i, j), a * b))
    thr_a, thr_b = _threshold(delta, a), _threshold(delta, b)
    rows_ij, rows_ji = G.rows[i, j], G.rows[j, i]
    if mode == "exhaustive":
        if max(a, b) > cap:
            raise CapacityError(f"exhaustive check needs class sizes <= {cap}, got {a} and {b}")
        if a <= b:
            wit, tested = _scan_exhaustive(rows_ij, a, b, thr_a, thr_b, bounds)
        else:
            wit, tested = _scan_exhaustive(rows_ji, b, a, thr_b, thr_a, bounds)
            if wit is not None:
                wit = (wit[1], wit[0], wit[2])
    else:
        wit, tested = _scan_sampled(rows_ij, a, b, thr_a, thr_b, bounds, budget, seed)
    if wit is None:
        return GraphRegVerdict(True, "regular", mode, None, tested)
    return GraphRegVerdict(False, "irregular", mode, wit, tested)


def check_d_delta_regular(G, i: int, j: int, d, delta, mode: str = "exhaustive",
                          budget: int = 2000, seed=0, cap: int = EXHAUSTIVE_CAP) -> GraphRegVerdict:
    """Test ``(d, delta)``-regularity of the bipartite graph between classes ``i`` and ``j``.

    In sampled mode a pass only means no witness was found among ``budget`` random pairs.
    """
    d, delta = as_fraction(d), as_fraction(delta)
    if not (0 < d <= 1 and 0 < delta <= 1):
        raise DomainError("need 0 < d <= 1 and 0 < delta <= 1")
    return _check(G, i, j, delta,
                  lambda full: _Bounds((1 - delta) * d, (1 + delta) * d, d, closed=False),
                  mode, budget, seed, cap)


def check_delta_regular(G, i: int, j: int, delta, mode: str = "exhaustive",
                        budget: int = 2000, seed=0, cap: int = EXHAUSTIVE_CAP) -> GraphRegVerdict:
    """Test ``delta``-regularity: ``|d(X,Y) - d(A,B)| <= delta`` on all large subset pairs."""
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise DomainError("need 0 < delta <= 1")
    return _check(G, i, j, delta,
                  lambda full: _Bounds(full - delta, full + delta, full, closed=True),
                  mode, budget, seed, cap)


def check_graph_regular(G, i, j, d, delta, notion: str = "d-delta", **kw) -> GraphRegVerdict:
    if notion == "d-delta":
        return check_d_delta_regular(G, i, j, d, delta, **kw)
    if notion == "delta":
        return check_delta_regular(G, i, j, delta, **kw)
    raise DomainError(f"unknown regularity notion {notion!r}")


def auto_mode(G, i: int, j: int, cap: int = EXHAUSTIVE_CAP) -> str:
    G = _as_graph(G)
    return "exhaustive" if max(G.class_sizes[i], G.class_sizes[j]) <= cap else "sampled"


def witness_violates(G, i, j, witness, d=None, delta=None, notion="d-delta") -> bool:
    """Recompute a witness from scratch and confirm it breaks the tested inequality."""
    G = _as_graph(G)
    X, Y, _ = witness
    delta = as_fraction(delta)
    a, b = G.class_sizes[i], G.class_sizes[j]
    if len(set(X)) < delta * a or len(set(Y)) < delta * b:
        return False
    e = 0
    for u in X:
        for v in Y:
            e += G.has_edge((i, u), (j, v))
    dens = Fraction(e, len(X) * len(Y))
    if notion == "d-delta":
        d = as_fraction(d)
        return not ((1 - delta) * d < dens < (1 + delta) * d)
    full = Fraction(sum(G.has_edge((i, u), (j, v)) for u in range(a) for v in range(b)), a * b)
    return abs(dens - full) > delta
