"""Exact labelled partition-respecting copy and extension counts.

A copy of a pattern ``H`` in a host ``G`` maps pattern class ``c`` into host
class ``class_map[c]``, is injective inside each host class and sends edges to
edges and hyperedges to hyperedges (host structure among the image is free).

Two independent routes are provided:

* backtracking over pattern vertices with bit-row candidate sets;
* tensor contraction of homomorphisms followed by Moebius inversion over the
  set partitions of same-class pattern vertices.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Mapping

import numpy as np

from .core import Complex, Vertex, as_fraction, bits, degree_profile, worker_count
from .errors import CapacityError, DomainError, StructureError

METHODS = ("auto", "backtrack", "tensor")
TENSOR_PARTITION_CAP = 5000
TENSOR_CELL_CAP = 20_000_000


@dataclass(frozen=True)
class CopyCount:
    pattern: str
    host: str
    count: int

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "host": self.host, "count": self.count}


@dataclass(frozen=True)
class PredictedCount:
    value: float
    terms: dict = field(default_factory=dict)
    exact: Fraction | None = None  # kept for threshold tests, where float noise flips boundary values

    def __float__(self) -> float:
        return self.value


# class maps ------------------------------------------------------------------

def _class_map(H: Complex, G: Complex, class_map) -> tuple[int, ...]:
    cmap = tuple(range(H.k)) if class_map is None else tuple(int(c) for c in class_map)
    if len(cmap) != H.k:
        raise StructureError(f"class map has {len(cmap)} entries for a pattern with {H.k} classes")
    for c in cmap:
        if not 0 <= c < G.k:
            raise StructureError(f"class map target {c} is not a host class (host has {G.k})")
    return cmap


def _same_class_conflict(H: Complex, cmap) -> bool:
    """A pattern edge whose endpoints land in one host class can never be embedded."""
    return any(cmap[a[0]] == cmap[b[0]] for a, b in H.edges)


# backtracking ----------------------------------------------------------------

class _Plan:
    """Static vertex order and back-constraints for one (pattern, host, class map)."""

    def __init__(self, H: Complex, G: Complex, cmap, fixed: Mapping[Vertex, Vertex] | None = None,
                 order: list | None = None, tail: bool = True):
        self.H, self.G, self.cmap = H, G, cmap
        fixed = dict(fixed or {})
        self.impossible = _same_class_conflict(H, cmap)
        deg = degree_profile(H).complex_degree
        adj = {v: set() for v in H.vertices()}
        for a, b in H.edges:
            adj[a].add(b)
            adj[b].add(a)
        placed = set(fixed)
        rest = [v for v in H.vertices() if v not in placed]
        tri_of = {v: [] for v in H.vertices()}
        for t in H.triples:
            for v in t:
                tri_of[v].append(t)
        if order is not None:
            rank = {v: r for r, v in enumerate(order)}
            rest.sort(key=lambda v: rank[v])
            order = list(sorted(fixed)) + rest
            rest = []
        else:
            order = list(sorted(fixed))
        while rest:
            def score(v):
                e = sum(1 for w in adj[v] if w in placed)
                h = sum(1 for t in tri_of[v] if all(w in placed for w in t if w != v))
                return (e + h, deg[v], tuple(-x for x in v))
            v = max(rest, key=score)
            rest.remove(v)
            order.append(v)
            placed.add(v)
        self.order = order
        self.n_fixed = len(fixed)
        self.fixed_vals = [fixed[v] for v in order[: self.n_fixed]]
        pos = {v: p for p, v in enumerate(order)}
        self.hc = [cmap[v[0]] for v in order]
        self.edge_back = [[] for _ in order]
        self.tri_back = [[] for _ in order]
        for a, b in H.edges:
            pa, pb = pos[a], pos[b]
            lo, hi = min(pa, pb), max(pa, pb)
            self.edge_back[hi].append(lo)
        for t in H.triples:
            ps = sorted(pos[v] for v in t)
            q1, q2 = ps[0], ps[1]
            if self.hc[q1] > self.hc[q2]:
                q1, q2 = q2, q1
            self.tri_back[ps[2]].append((q1, q2))
        # trailing vertices whose constraints all point before the tail are counted in one step
        def refs(x):
            return self.edge_back[x] + [q for pair in self.tri_back[x] for q in pair]
        s = len(order)
        while tail and s > self.n_fixed and not any(r >= s - 1 for x in range(s - 1, len(order)) for r in refs(x)):
            s -= 1
        self.tail_start = s

    def candidates(self, p: int, val: list, used: list) -> int:
        G, hc = self.G, self.hc[p]
        mask = G.graph.full_mask(hc) & ~used[hc]
        rows = G.rows
        for q in self.edge_back[p]:
            mask &= rows[self.hc[q], hc][val[q]]
            if not mask:
                return 0
        links = G.links
        for q1, q2 in self.tri_back[p]:
            mask &= links.get(((self.hc[q1], val[q1]), (self.hc[q2], val[q2]), hc), 0)
            if not mask:
                return 0
        return mask

    def start(self):
        """Initial assignment from the fixed vertices, or None when they are not a partial copy."""
        val = [None] * len(self.order)
        used = [0] * self.G.k
        for p in range(self.n_fixed):
            c, x = self.fixed_vals[p]
            if c != self.hc[p]:
                return None
            if not (self.candidates(p, val, used) >> x & 1):
                return None
            val[p] = x
            used[c] |= 1 << x
        return val, used

    def count(self) -> int:
        if self.impossible:
            return 0
        st = self.start()
        if st is None:
            return 0
        val, used = st
        return self._count(self.n_fixed, val, used)

    def _count(self, p: int, val: list, used: list) -> int:
        if p >= self.tail_start:
            return self._tail(val, used)
        hc = self.hc[p]
        total = 0
        for x in bits(self.candidates(p, val, used)):
            val[p] = x
            used[hc] |= 1 << x
            total += self._count(p + 1, val, used)
            used[hc] &= ~(1 << x)
        val[p] = None
        return total

    def _tail(self, val, used) -> int:
        groups: dict[int, list[int]] = {}
        for p in range(self.tail_start, len(self.order)):
            groups.setdefault(self.hc[p], []).append(self.candidates(p, val, used))
        total = 1
        for masks in groups.values():
            total *= injective_count(masks)
            if not total:
                return 0
        return total

    def enumerate(self) -> Iterator[dict]:
        if self.impossible:
            return
        st = self.start()
        if st is None:
            return
        val, used = st
        yield from self._enum(self.n_fixed, val, used)

    def _enum(self, p, val, used):
        if p == len(self.order):
            yield {v: (self.hc[q], val[q]) for q, v in enumerate(self.order)}
            return
        hc = self.hc[p]
        for x in bits(self.candidates(p, val, used)):
            val[p] = x
            used[hc] |= 1 << x
            yield from self._enum(p + 1, val, used)
            used[hc] &= ~(1 << x)
        val[p] = None


def _set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def injective_count(masks: list[int]) -> int:
    """Number of injective choices ``x_i in masks[i]``."""
    if not masks:
        return 1
    if any(m == 0 for m in masks):
        return 0
    if all(m == masks[0] for m in masks):
        return math.perm(masks[0].bit_count(), len(masks))
    if len(masks) <= 5:
        total = 0
        for part in _set_partitions(list(range(len(masks)))):
            term = 1
            for block in part:
                inter = -1
                for i in block:
                    inter &= masks[i]
                term *= (-1) ** (len(block) - 1) * math.factorial(len(block) - 1) * inter.bit_count()
            total += term
        return total
    first, rest = masks[0], masks[1:]
    return sum(injective_count([m & ~(1 << x) for m in rest]) for x in bits(first))


def _count_first_fixed(args):
    H, G, cmap, first, x = args
    return _Plan(H, G, cmap, {first: (cmap[first[0]], x)}).count()


def _backtrack_count(H: Complex, G: Complex, cmap) -> int:
    plan = _Plan(H, G, cmap)
    workers = worker_count()
    if workers <= 1 or plan.impossible or not plan.order or plan.tail_start == 0:
        return plan.count()
    first = plan.order[0]
    cands = list(bits(plan.candidates(0, [None] * len(plan.order), [0] * G.k)))
    if len(cands) < 2:
        return plan.count()
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return sum(ex.map(_count_first_fixed, [(H, G, cmap, first, x) for x in cands]))


# tensor route ----------------------------------------------------------------

def _host_tensors(G: Complex, dtype):
    cache = G.meta.setdefault("_tensors", {}) if isinstance(G.meta, dict) else {}
    key = np.dtype(dtype).str if dtype is not object else "object"
    if key in cache:
        return cache[key]
    A = {}
    for i, j in combinations(range(G.k), 2):
        M = np.zeros((G.class_sizes[i], G.class_sizes[j]), dtype=dtype)
        for u, r in enumerate(G.rows[i, j]):
            for v in bits(r):
                M[u, v] = 1
        A[i, j] = M
    T = {}
    for a, b, c in G.triples:
        key3 = (a[0], b[0], c[0])
        if key3 not in T:
            T[key3] = np.zeros(tuple(G.class_sizes[x] for x in key3), dtype=dtype)
        T[key3][a[1], b[1], c[1]] = 1
    cache[key] = (A, T)
    return A, T


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _hom_count(nv: int, hcls: list[int], edges, triples, G: Complex, dtype) -> int:
    """Homomorphisms of a (multi)pattern given by vertex host classes, edges and triples."""
    if nv > len(_LETTERS):
        raise CapacityError("tensor route handles at most 52 pattern vertices")
    A, T = _host_tensors(G, dtype)
    ops, subs, seen = [], [], set()
    for a, b in set(tuple(sorted(e)) for e in edges):
        if hcls[a] == hcls[b]:
            return 0
        if hcls[a] > hcls[b]:
            a, b = b, a
        ops.append(A[hcls[a], hcls[b]])
        subs.append(_LETTERS[a] + _LETTERS[b])
        seen.update((a, b))
    for t in set(tuple(sorted(t)) for t in triples):
        t = sorted(t, key=lambda x: hcls[x])
        key = tuple(hcls[x] for x in t)
        if key not in T:
            return 0
        ops.append(T[key])
        subs.append("".join(_LETTERS[x] for x in t))
        seen.update(t)
    free = 1
    for v in range(nv):
        if v not in seen:
            free *= G.class_sizes[hcls[v]]
    if not ops:
        return free
    val = np.einsum(",".join(subs) + "->", *ops, optimize="greedy")
    return int(val) * free


def _tensor_count(H: Complex, G: Complex, cmap) -> int:
    if _same_class_conflict(H, cmap):
        return 0
    verts = H.vertices()
    idx = {v: i for i, v in enumerate(verts)}
    groups: dict[int, list[int]] = {}
    for v in verts:
        groups.setdefault(cmap[v[0]], []).append(idx[v])
    n_part = 1
    for g in groups.values():
        n_part *= _bell(len(g))
    if n_part > TENSOR_PARTITION_CAP:
        raise CapacityError(f"tensor route would need {n_part} partition terms")
    bound = 1
    for v in verts:
        bound *= max(1, G.class_sizes[cmap[v[0]]])
    dtype = np.int64 if bound < 2 ** 62 else object
    edges = [(idx[a], idx[b]) for a, b in H.edges]
    triples = [tuple(idx[v] for v in t) for t in H.triples]
    total = 0
    for combo in product(*(list(_set_partitions(g)) for g in groups.values())):
        rep = list(range(len(verts)))
        mu = 1
        blocks = [b for part in combo for b in part]
        for block in blocks:
            mu *= (-1) ** (len(block) - 1) * math.factorial(len(block) - 1)
            for x in block:
                rep[x] = block[0]
        reps = sorted(set(rep))
        ren = {r: i for i, r in enumerate(reps)}
        hcls = [cmap[verts[r][0]] for r in reps]
        qe = [(ren[rep[a]], ren[rep[b]]) for a, b in edges]
        qt = [tuple(ren[rep[x]] for x in t) for t in triples]
        total += mu * _hom_count(len(reps), hcls, qe, qt, G, dtype)
    return total


def _bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[0]


def _tensor_feasible(H: Complex, G: Complex, cmap) -> bool:
    if H.order > len(_LETTERS):
        return False
    n_part = 1
    for c in set(cmap):
        n_part *= _bell(sum(H.class_sizes[p] for p in range(H.k) if cmap[p] == c))
    if n_part > TENSOR_PARTITION_CAP:
        return False
    cells = sum(math.prod(G.class_sizes[x] for x in key)
                for key in {tuple(sorted(cmap[v[0]] for v in t)) for t in H.triples})
    return cells <= TENSOR_CELL_CAP


# public counting API -----------------------------------------------------------

def count_copies(H: Complex, G: Complex, class_map=None, method: str = "auto") -> int:
    """``|H|_G``: labelled partition-respecting copies of ``H`` in ``G`` (exact)."""
    cmap = _class_map(H, G, class_map)
    if method not in METHODS:
        raise DomainError(f"unknown counting method {method!r}")
    if H.order == 0:
        return 1
    if method == "auto":
        big = max((G.class_sizes[c] for c in cmap), default=0) >= 16
        method = "tensor" if big and H.order >= 4 and _tensor_feasible(H, G, cmap) else "backtrack"
    if method == "tensor":
        return _tensor_count(H, G, cmap)
    return _backtrack_count(H, G, cmap)


def count_graph_copies(H: Complex, G: Complex, class_map=None, method: str = "auto") -> int:
    """``|H^(2)|_G``: copies of the underlying graph of ``H`` in the underlying graph of ``G``."""
    return count_copies(H.skeleton(), G.skeleton(), class_map, method)


def enumerate_copies(H: Complex, G: Complex, class_map=None, fixed=None) -> Iterator[dict]:
    """Every copy as a dict pattern vertex -> host vertex, in lexicographic search order."""
    cmap = _class_map(H, G, class_map)
    yield from _Plan(H, G, cmap, fixed).enumerate()


def is_copy(H: Complex, G: Complex, phi: Mapping[Vertex, Vertex], class_map=None) -> bool:
    """Direct re-check of a map against the copy definition."""
    cmap = _class_map(H, G, class_map)
    if set(phi) != set(H.vertices()):
        return False
    for v, x in phi.items():
        if x[0] != cmap[v[0]] or not 0 <= x[1] < G.class_sizes[x[0]]:
            return False
    images = list(phi.values())
    if len(set(images)) != len(images):
        return False
    if any(not G.has_edge(phi[a], phi[b]) for a, b in H.edges):
        return False
    return all(G.has_triple(*(phi[v] for v in t)) for t in H.triples)


def _check_inclusion(H: Complex, Hp: Complex, inclusion) -> dict:
    inc = {v: v for v in H.vertices()} if inclusion is None else dict(inclusion)
    if set(inc) != set(H.vertices()):
        raise DomainError("inclusion must be defined on every vertex of the subcomplex")
    if len(set(inc.values())) != len(inc):
        raise DomainError("inclusion is not injective")
    for v, w in inc.items():
        if v[0] != w[0] or w[0] >= Hp.k or not 0 <= w[1] < Hp.class_sizes[w[0]]:
            raise DomainError(f"inclusion sends {v} to {w}, not a vertex of the same class")
    image = set(inc.values())
    want_e = {tuple(sorted((inc[a], inc[b]))) for a, b in H.edges}
    have_e = {e for e in Hp.edges if e[0] in image and e[1] in image}
    want_t = {tuple(sorted(inc[v] for v in t)) for t in H.triples}
    have_t = {t for t in Hp.triples if all(v in image for v in t)}
    if want_e != have_e or want_t != have_t:
        raise DomainError("subcomplex is not induced in the larger pattern")
    return inc


def count_extensions(H: Complex, Hp: Complex, phi: Mapping[Vertex, Vertex], G: Complex,
                     inclusion=None, class_map=None) -> int:
    """``|phi -> H'|_G``: extensions of the copy ``phi`` of ``H`` to copies of ``H'``.

    ``inclusion`` maps vertices of ``H`` to vertices of ``H'`` (identity by default);
    ``H`` must be induced in ``H'`` and ``phi`` a genuine copy.
    """
    if Hp.k < H.k:
        raise DomainError("subcomplex has more classes than the larger pattern")
    inc = _check_inclusion(H, Hp, inclusion)
    cmap = _class_map(Hp, G, class_map)
    if not is_copy(H, G, phi, cmap[: H.k]):
        raise DomainError("phi is not a copy of the subcomplex in the host")
    fixed = {inc[v]: phi[v] for v in H.vertices()}
    return _Plan(Hp, G, cmap, fixed).count()


def extension_counts(H: Complex, Hp: Complex, G: Complex, inclusion=None, class_map=None):
    """Yield ``(phi, |phi -> H'|_G)`` over every copy ``phi`` of ``H``."""
    inc = _check_inclusion(H, Hp, inclusion)
    cmap = _class_map(Hp, G, class_map)
    for phi in enumerate_copies(H, G, cmap[: H.k]):
        fixed = {inc[v]: phi[v] for v in H.vertices()}
        yield phi, _Plan(Hp, G, cmap, fixed).count()


# predictions -------------------------------------------------------------------

def _check_densities(n, d2, d3=None):
    if n < 1:
        raise DomainError("n must be at least 1")
    for name, d in (("d2", d2), ("d3", d3)):
        if d is not None and not 0 < float(d) <= 1:
            raise DomainError(f"{name} must lie in (0, 1]")


def _predict(t: int, e2: int, e3: int, n, d2, d3) -> PredictedCount:
    d2f, d3f = float(d2), float(d3)
    exact = Fraction(n) ** t * as_fraction(d2) ** e2 * as_fraction(d3) ** e3
    try:
        value = float(exact)
    except OverflowError:
        value = math.exp(t * math.log(n) + e2 * math.log(d2f) + e3 * math.log(d3f))
    return PredictedCount(value, {"t": t, "e2": e2, "e3": e3, "n": n, "d2": d2f, "d3": d3f}, exact)


def predicted_count(H: Complex, n, d2, d3) -> PredictedCount:
    """``n^t d2^e2 d3^e3`` with ``t = |H|``."""
    _check_densities(n, d2, d3)
    return _predict(H.order, H.e2, H.e3, n, d2, d3)


def predicted_extension(H: Complex, Hp: Complex, n, d2, d3) -> PredictedCount:
    """Expected number of extensions of one copy of ``H`` to ``H'``."""
    _check_densities(n, d2, d3)
    return _predict(Hp.order - H.order, Hp.e2 - H.e2, Hp.e3 - H.e3, n, d2, d3)


def predicted_count_per_edge(H: Complex, n, d2, densities: Mapping) -> PredictedCount:
    """``n^t d2^e2 prod_e d_e`` with one density per hyperedge of ``H``."""
    _check_densities(n, d2)
    logv = H.order * math.log(n) + H.e2 * math.log(float(d2))
    canon = {tuple(sorted(k)): v for k, v in densities.items()}
    for t in sorted(H.triples):
        if t not in canon:
            raise DomainError(f"no density given for hyperedge {t}")
        de = float(canon[t])
        if not 0 < de <= 1:
            raise DomainError(f"density of {t} must lie in (0, 1]")
        logv += math.log(de)
    return PredictedCount(math.exp(logv), {"t": H.order, "e2": H.e2, "n": n, "d2": float(d2)})


# constructions -----------------------------------------------------------------

def partial_complement(G: Complex, D, H: Complex, class_map=None) -> Complex:
    """Swap hyperedges and non-hyperedge triangles on the host class triples hit by ``D``."""
    cmap = _class_map(H, G, class_map)
    targets = set()
    for t in D:
        t = tuple(sorted(t))
        if t not in H.triples:
            raise DomainError(f"{t} is not a hyperedge of the pattern")
        for v in t:
            if H.class_sizes[v[0]] != 1:
                raise DomainError(f"pattern class {v[0]} of {t} holds {H.class_sizes[v[0]]} vertices, need exactly one")
        hosts = [cmap[v[0]] for v in t]
        if len(set(hosts)) != 3:
            raise DomainError(f"{t} does not map to three distinct host classes")
        targets.add(tuple(sorted(hosts)))
    if not targets:
        return G
    keep = [t for t in G.triples if tuple(v[0] for v in t) not in targets]
    rows, links = G.rows, G.links
    new = []
    for i, j, l in sorted(targets):
        for u in range(G.class_sizes[i]):
            for v in bits(rows[i, j][u]):
                tri = rows[i, l][u] & rows[j, l][v] & ~links.get(((i, u), (j, v), l), 0)
                new.extend(((i, u), (j, v), (l, w)) for w in bits(tri))
    return Complex(G.class_sizes, G.edges, frozenset(keep + new))


def blow_up(G: Complex, multiplicities) -> tuple[Complex, dict[int, tuple[int, int]]]:
    """Replace class ``i`` by ``m_i`` identical copies.

    Returns the blown-up complex and ``new class -> (old class, copy index)``.
    Copies of one class carry no edges between them.
    """
    mult = tuple(int(m) for m in multiplicities)
    if len(mult) != G.k or any(m < 1 for m in mult):
        raise DomainError("need one multiplicity >= 1 per host class")
    origin, first = {}, []
    for i, m in enumerate(mult):
        first.append(len(origin))
        for s in range(m):
            origin[len(origin)] = (i, s)
    sizes = tuple(G.class_sizes[origin[c][0]] for c in range(len(origin)))
    edges = []
    for a, b in G.edges:
        for s in range(mult[a[0]]):
            for s2 in range(mult[b[0]]):
                edges.append(((first[a[0]] + s, a[1]), (first[b[0]] + s2, b[1])))
    triples = []
    for t in G.triples:
        for ss in product(*(range(mult[v[0]]) for v in t)):
            triples.append(tuple((first[v[0]] + s, v[1]) for v, s in zip(t, ss)))
    return Complex(sizes, frozenset(edges), frozenset(triples)), origin


def split_pattern(H: Complex) -> tuple[Complex, dict[Vertex, Vertex]]:
    """``H*``: the pattern with every vertex in its own class, classes ordered by (class, index)."""
    verts = H.vertices()
    ren = {v: (c, 0) for c, v in enumerate(verts)}
    edges = [(ren[a], ren[b]) for a, b in H.edges]
    triples = [tuple(ren[v] for v in t) for t in H.triples]
    return Complex((1,) * len(verts), frozenset(edges), frozenset(triples)), ren


@dataclass(frozen=True)
class SandwichReport:
    lower: int
    middle: int
    upper: int
    holds: bool

    def to_json(self) -> dict:
        return {"count": self.lower, "blown_up_count": self.middle, "upper_bound": self.upper, "holds": self.holds}


def blow_up_sandwich(H: Complex, G: Complex) -> SandwichReport:
    """``|H|_G <= |H*|_{G*} <= |H|_G + |H|^2 n^{|H|-1}``, with ``n`` the largest host class."""
    if H.k != G.k:
        raise StructureError("pattern and host must have the same classes for the blow-up")
    mult = [max(1, s) for s in H.class_sizes]
    Gs, origin = blow_up(G, mult)
    Hs, _ = split_pattern(H)
    # pattern vertex (c, x) goes to copy x of class c
    first = {}
    for new, (old, s) in origin.items():
        first.setdefault(old, new)
    cmap = [first[v[0]] + v[1] for v in H.vertices()]
    lower = count_copies(H, G)
    middle = count_copies(Hs, Gs, cmap)
    n = max(G.class_sizes)
    t = H.order
    upper = lower + t * t * n ** (t - 1) if t else lower
    return SandwichReport(lower, middle, upper, lower <= middle <= upper)


def glued_complex(H: Complex, Hp: Complex, inclusion=None) -> Complex:
    """Two copies of ``H'`` identified on the image of ``H``."""
    inc = _check_inclusion(H, Hp, inclusion)
    image = set(inc.values())
    sizes = list(Hp.class_sizes)
    twin = {}
    for v in Hp.vertices():
        if v in image:
            twin[v] = v
        else:
            twin[v] = (v[0], sizes[v[0]])
            sizes[v[0]] += 1
    edges = set(Hp.edges) | {(twin[a], twin[b]) for a, b in Hp.edges}
    triples = set(Hp.triples) | {tuple(twin[v] for v in t) for t in Hp.triples}
    return Complex(tuple(sizes), frozenset(edges), frozenset(triples))


@dataclass(frozen=True)
class SecondMoment:
    s1: int
    s2: int
    glued: int
    overlap_bound: int
    copies: int
    total: int

    @property
    def holds(self) -> bool:
        return self.glued <= self.s2 <= self.glued + self.overlap_bound

    def to_json(self) -> dict:
        return {"S1": self.s1, "S2": self.s2, "glued": self.glued, "overlap_bound": self.overlap_bound,
                "copies": self.copies, "count_H_prime": self.total, "holds": self.holds}


def second_moment_check(H: Complex, Hp: Complex, G: Complex, inclusion=None, class_map=None) -> SecondMoment:
    """First and second moments of extension counts against the glued-complex count."""
    cmap = _class_map(Hp, G, class_map)
    s1 = s2 = copies = 0
    for _, x in extension_counts(H, Hp, G, inclusion, cmap):
        s1 += x
        s2 += x * x
        copies += 1
    glued = count_copies(glued_complex(H, Hp, inclusion), G, cmap)
    n = max(G.class_sizes[c] for c in cmap) if cmap else 0
    t, tp = H.order, Hp.order
    bound = (tp - t) ** 2 * n ** (2 * tp - t - 1) if tp > t else 0
    return SecondMoment(s1, s2, glued, bound, copies, count_copies(Hp, G, cmap))


@dataclass(frozen=True)
class MomentReport:
    passed: bool
    premise_first: bool
    premise_second: bool
    outliers: int
    n_values: int
    first_moment: float
    second_moment: float

    @property
    def outlier_fraction(self) -> float:
        return self.outliers / self.n_values if self.n_values else 0.0

    def to_json(self) -> dict:
        return {"pass": self.passed, "premise_first": self.premise_first,
                "premise_second": self.premise_second, "outliers": self.outliers,
                "N": self.n_values, "outlier_fraction": self.outlier_fraction,
                "sum": self.first_moment, "sum_squares": self.second_moment}


def moment_concentration(values, A, delta, beta) -> MomentReport:
    """Check both moment premises within ``delta`` and count values outside ``(1 +- beta) A``.

    Comparisons are exact. Pass ``PredictedCount.exact`` (or the PredictedCount itself) as ``A``
    so that values on the window boundary are not flipped by rounding.
    """
    if isinstance(A, PredictedCount):
        A = A.exact if A.exact is not None else A.value
    xs = [as_fraction(x) for x in values]
    if any(x < 0 for x in xs):
        raise DomainError("values must be non-negative")
    A, delta, beta = as_fraction(A), as_fraction(delta), as_fraction(beta)
    N = len(xs)
    s1 = sum(xs, Fraction(0))
    s2 = sum((x * x for x in xs), Fraction(0))
    p1 = abs(s1 - A * N) <= delta * A * N
    p2 = abs(s2 - A * A * N) <= delta * A * A * N
    out = sum(1 for x in xs if abs(x - A) > beta * A)
    return MomentReport(p1 and p2 and out <= beta * N, p1, p2, out, N, float(s1), float(s2))
