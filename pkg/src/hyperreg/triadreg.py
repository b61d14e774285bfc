"""Triangles of triads and regularity of triads with respect to a 3-graph.

A :class:`Triad` stores its three bipartite parts as bit rows in local
coordinates: ``ij[u]`` is the set of ``v`` joined to ``u``, ``jk[v]`` the set of
``w`` joined to ``v`` and ``ik[u]`` the set of ``w`` joined to ``u``.  A triangle is
``(u, v, w)`` with ``v in ij[u]`` and ``w in jk[v] & ik[u]``.

The hypergraph side is a :class:`TriadHypergraph`, which keeps for every pair
``(u, v)`` the bit row of ``w`` with ``uvw`` a hyperedge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .core import Complex, KPartiteGraph, as_fraction, bits, mask_of
from .density import auto_mode, bipartite_density, check_graph_regular
from .errors import CapacityError, DomainError, StructureError

STRATEGIES = ("induced", "edge_sampled", "exhaustive_tiny")
TINY_EDGE_CAP = 12


@dataclass(frozen=True)
class Triad:
    sizes: tuple[int, int, int]
    ij: tuple[int, ...]
    jk: tuple[int, ...]
    ik: tuple[int, ...]
    classes: tuple[int, int, int] = field(default=(0, 1, 2), compare=False)

    def __post_init__(self):
        ni, nj, nk = self.sizes
        if len(self.ij) != ni or len(self.ik) != ni or len(self.jk) != nj:
            raise StructureError("triad rows do not match class sizes")
        if len(set(self.classes)) != 3:
            raise StructureError(f"triad classes {self.classes} are not distinct")
        fj, fk = (1 << nj) - 1, (1 << nk) - 1
        if any(r & ~fj for r in self.ij) or any(r & ~fk for r in self.jk) or any(r & ~fk for r in self.ik):
            raise StructureError("triad row refers to a vertex outside its class")

    @classmethod
    def from_complex(cls, G: Complex, i: int, j: int, k: int) -> "Triad":
        rows = G.rows
        return cls((G.class_sizes[i], G.class_sizes[j], G.class_sizes[k]),
                   rows[i, j], rows[j, k], rows[i, k], (i, j, k))

    @classmethod
    def from_bipartite(cls, p_ij: KPartiteGraph, p_jk: KPartiteGraph, p_ik: KPartiteGraph,
                       classes=(0, 1, 2)) -> "Triad":
        """Assemble from three 2-class graphs, each oriented (first class, second class)."""
        ni, nj = p_ij.class_sizes
        nj2, nk = p_jk.class_sizes
        ni2, nk2 = p_ik.class_sizes
        if (ni, nj, nk) != (ni2, nj2, nk2):
            raise StructureError("bipartite parts do not share class sizes")
        return cls((ni, nj, nk), p_ij.rows[0, 1], p_jk.rows[0, 1], p_ik.rows[0, 1], tuple(classes))

    @classmethod
    def complete(cls, sizes) -> "Triad":
        ni, nj, nk = sizes
        return cls(tuple(sizes), ((1 << nj) - 1,) * ni, ((1 << nk) - 1,) * nj, ((1 << nk) - 1,) * ni)

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.ij + self.jk + self.ik)

    def edge_list(self) -> list[tuple[str, int, int]]:
        out = []
        for name in ("ij", "jk", "ik"):
            for u, r in enumerate(getattr(self, name)):
                out.extend((name, u, v) for v in bits(r))
        return out

    def induced(self, si: int, sj: int, sk: int) -> "Triad":
        """Subtriad induced on vertex masks ``si, sj, sk``."""
        ni, nj, _ = self.sizes
        ij = tuple(self.ij[u] & sj if si >> u & 1 else 0 for u in range(ni))
        ik = tuple(self.ik[u] & sk if si >> u & 1 else 0 for u in range(ni))
        jk = tuple(self.jk[v] & sk if sj >> v & 1 else 0 for v in range(nj))
        return Triad(self.sizes, ij, jk, ik, self.classes)

    def from_edges(self, edges: Iterable[tuple[str, int, int]]) -> "Triad":
        rows = {"ij": [0] * self.sizes[0], "jk": [0] * self.sizes[1], "ik": [0] * self.sizes[0]}
        for name, u, v in edges:
            rows[name][u] |= 1 << v
        return Triad(self.sizes, tuple(rows["ij"]), tuple(rows["jk"]), tuple(rows["ik"]), self.classes)

    def is_subtriad_of(self, P: "Triad") -> bool:
        if self.sizes != P.sizes:
            return False
        return all(q & ~p == 0 for name in ("ij", "jk", "ik")
                   for q, p in zip(getattr(self, name), getattr(P, name)))

    def edges_json(self) -> dict:
        out: dict = {"ij": [], "jk": [], "ik": []}
        for name, u, v in self.edge_list():
            out[name].append([u, v])
        return out


class TriadHypergraph:
    """Hyperedges living on the three classes of a triad, stored as pair links."""

    __slots__ = ("sizes", "links")

    def __init__(self, sizes, links: dict[tuple[int, int], int] | None = None):
        self.sizes = tuple(sizes)
        self.links = {key: m for key, m in (links or {}).items() if m}

    @classmethod
    def from_triples(cls, sizes, triples: Iterable[tuple[int, int, int]]) -> "TriadHypergraph":
        links: dict = {}
        for u, v, w in triples:
            if not (0 <= u < sizes[0] and 0 <= v < sizes[1] and 0 <= w < sizes[2]):
                raise StructureError(f"hyperedge {(u, v, w)} out of range for {tuple(sizes)}")
            links[u, v] = links.get((u, v), 0) | 1 << w
        return cls(sizes, links)

    @classmethod
    def from_complex(cls, G: Complex, i: int, j: int, k: int) -> "TriadHypergraph":
        links: dict = {}
        order = sorted((i, j, k))
        pos = {c: order.index(c) for c in (i, j, k)}
        for t in G.triples:
            cls_t = tuple(v[0] for v in t)
            if cls_t != tuple(order):
                continue
            u, v, w = t[pos[i]][1], t[pos[j]][1], t[pos[k]][1]
            links[u, v] = links.get((u, v), 0) | 1 << w
        return cls((G.class_sizes[i], G.class_sizes[j], G.class_sizes[k]), links)

    @classmethod
    def from_hypergraph(cls, hyperedges: Iterable[tuple[int, int, int]],
                        clusters: Sequence[Sequence[int]]) -> "TriadHypergraph":
        """Restrict a 3-graph on integer vertices to three disjoint vertex lists."""
        where = {}
        for c, members in enumerate(clusters):
            for local, x in enumerate(members):
                where[x] = (c, local)
        links: dict = {}
        for e in hyperedges:
            if not all(x in where for x in e):
                continue
            loc = sorted(where[x] for x in e)
            if [c for c, _ in loc] != [0, 1, 2]:
                continue
            (_, u), (_, v), (_, w) = loc
            links[u, v] = links.get((u, v), 0) | 1 << w
        return cls(tuple(len(c) for c in clusters), links)

    def triples(self) -> Iterator[tuple[int, int, int]]:
        for (u, v), m in sorted(self.links.items()):
            for w in bits(m):
                yield (u, v, w)

    def __contains__(self, t) -> bool:
        u, v, w = t
        return bool(self.links.get((u, v), 0) >> w & 1)

    def __len__(self) -> int:
        return sum(m.bit_count() for m in self.links.values())

    def complement(self, P: Triad) -> "TriadHypergraph":
        """Triangles of ``P`` that are not hyperedges."""
        links = {}
        for u in range(P.sizes[0]):
            for v in bits(P.ij[u]):
                links[u, v] = P.jk[v] & P.ik[u] & ~self.links.get((u, v), 0)
        return TriadHypergraph(self.sizes, links)

    def restricted(self, P: Triad) -> "TriadHypergraph":
        """Only the hyperedges that are triangles of ``P``."""
        links = {}
        for u in range(P.sizes[0]):
            for v in bits(P.ij[u]):
                links[u, v] = P.jk[v] & P.ik[u] & self.links.get((u, v), 0)
        return TriadHypergraph(self.sizes, links)


def _as_triad_hypergraph(G, P: Triad) -> TriadHypergraph:
    if isinstance(G, TriadHypergraph):
        return G
    return TriadHypergraph.from_triples(P.sizes, G)


def _iter_triangles(P: Triad) -> Iterator[tuple[int, int, int]]:
    for u in range(P.sizes[0]):
        iku = P.ik[u]
        for v in bits(P.ij[u]):
            for w in bits(P.jk[v] & iku):
                yield (u, v, w)


def count_triangles(P: Triad) -> int:
    t = 0
    for u in range(P.sizes[0]):
        iku = P.ik[u]
        for v in bits(P.ij[u]):
            t += (P.jk[v] & iku).bit_count()
    return t


def enumerate_triangles(P: Triad) -> tuple[int, Iterator[tuple[int, int, int]]]:
    """``t(P)`` and a lazy stream of its triangles."""
    return count_triangles(P), _iter_triangles(P)


def _union_counts(members: Sequence[Triad], links: dict) -> tuple[int, int]:
    """(t, hits) for the union of the triangle sets of ``members``."""
    if len(members) == 1 or all(m is members[0] for m in members):
        Q = members[0]
        t = h = 0
        for u in range(Q.sizes[0]):
            iku = Q.ik[u]
            for v in bits(Q.ij[u]):
                m = Q.jk[v] & iku
                if m:
                    t += m.bit_count()
                    h += (m & links.get((u, v), 0)).bit_count()
        return t, h
    acc: dict = {}
    for Q in members:
        for u in range(Q.sizes[0]):
            iku = Q.ik[u]
            for v in bits(Q.ij[u]):
                m = Q.jk[v] & iku
                if m:
                    acc[u, v] = acc.get((u, v), 0) | m
    t = h = 0
    for key, m in acc.items():
        t += m.bit_count()
        h += (m & links.get(key, 0)).bit_count()
    return t, h


def triad_density(G, P: Triad) -> Fraction:
    """Share of the triangles of ``P`` that are hyperedges of ``G`` (0 when ``P`` has none)."""
    t, h = _union_counts([P], _as_triad_hypergraph(G, P).links)
    return Fraction(h, t) if t else Fraction(0)


def tuple_density(G, Q: Sequence[Triad], P: Triad | None = None) -> tuple[int, Fraction]:
    """``(t(Q), d_G(Q))`` over the union of the triangle sets of the subtriads in ``Q``."""
    if not Q:
        raise DomainError("a subtriad tuple needs r >= 1 members")
    if P is not None:
        for s, member in enumerate(Q):
            if not member.is_subtriad_of(P):
                raise StructureError(f"subtriad {s} uses an edge that is not in the triad")
    t, h = _union_counts(list(Q), _as_triad_hypergraph(G, Q[0]).links)
    return t, (Fraction(h, t) if t else Fraction(0))


@dataclass(frozen=True)
class TupleWitness:
    members: tuple[Triad, ...]
    t: int
    density: Fraction

    def to_json(self) -> dict:
        return {"t": self.t, "density": str(self.density),
                "subtriads": [m.edges_json() for m in self.members]}


@dataclass(frozen=True)
class TriadRegVerdict:
    regular: bool
    status: str  # "regular" | "irregular"
    strategy: str
    d3: Fraction | None
    witnesses: tuple[TupleWitness, ...] = ()
    tested: int = 0
    complete: bool = False  # True only when "regular" is a proof over the tested quantifier

    @property
    def witness(self) -> TupleWitness | None:
        return self.witnesses[0] if self.witnesses else None

    def to_json(self) -> dict:
        out = {"status": self.status, "regular": self.regular, "strategy": self.strategy,
               "d3": None if self.d3 is None else str(self.d3), "tested": self.tested,
               "complete": self.complete}
        if self.witnesses:
            out["witness"] = [w.to_json() for w in self.witnesses]
        return out


# candidate generators --------------------------------------------------------

def _local_densities(P: Triad, links: dict):
    """Per-vertex (triangles, hyperedge triangles) in each class."""
    ni, nj, nk = P.sizes
    tri = [[0] * ni, [0] * nj, [0] * nk]
    hit = [[0] * ni, [0] * nj, [0] * nk]
    for u, v, w in _iter_triangles(P):
        h = links.get((u, v), 0) >> w & 1
        for c, x in ((0, u), (1, v), (2, w)):
            tri[c][x] += 1
            hit[c][x] += h
    return tri, hit


def _peel_candidates(P: Triad, links: dict, direction: int):
    """Greedy vertex peeling: drop vertices of lowest (or highest) local density first."""
    tri, hit = _local_densities(P, links)
    verts = []
    for c in range(3):
        for x in range(P.sizes[c]):
            if tri[c][x] == 0:
                continue
            verts.append((Fraction(hit[c][x], tri[c][x]) * direction, c, x))
    verts.sort()
    masks = [(1 << s) - 1 for s in P.sizes]
    for _, c, x in verts:
        masks[c] &= ~(1 << x)
        if not all(masks):
            break
        yield tuple(masks)


def _random_mask(rng, n: int) -> int:
    if n == 0:
        return 0
    size = int(rng.integers(1, n + 1))
    return mask_of(int(x) for x in rng.choice(n, size, replace=False))


def _candidates(P: Triad, links, r: int, strategy: str, budget: int, rng, edge_cap: int):
    full = tuple((1 << s) - 1 for s in P.sizes)
    if strategy == "induced":
        yield (P,) * r, [full] * r
        for direction in (1, -1):
            for masks in _peel_candidates(P, links, direction):
                Q = P.induced(*masks)
                yield (Q,) * r, [masks] * r
        for _ in range(budget):
            ms = [tuple(_random_mask(rng, s) for s in P.sizes) for _ in range(r)]
            yield tuple(P.induced(*m) for m in ms), ms
    elif strategy == "edge_sampled":
        yield (P,) * r, None
        edges = P.edge_list()
        for _ in range(budget):
            members = []
            for _ in range(r):
                q = rng.uniform(0.2, 1.0)
                keep = rng.random(len(edges)) < q
                members.append(P.from_edges(e for e, k in zip(edges, keep) if k))
            yield tuple(members), None
    elif strategy == "exhaustive_tiny":
        edges = P.edge_list()
        if len(edges) > edge_cap:
            raise CapacityError(f"exhaustive_tiny needs at most {edge_cap} cross edges, triad has {len(edges)}")
        for m in range(1 << len(edges)):
            Q = P.from_edges(edges[b] for b in bits(m))
            yield (Q,) * r, None
    else:
        raise DomainError(f"unknown strategy {strategy!r}")


def _shrink(P: Triad, links, members, vmasks, d3, delta3, tP):
    """Greedily drop vertices (induced) or edges while the tuple still qualifies and violates."""

    def ok(ms):
        t, h = _union_counts(ms, links)
        if t * delta3.denominator < delta3.numerator * tP or t == 0:
            return None
        dens = Fraction(h, t)
        return (t, dens) if abs(d3 - dens) >= delta3 else None

    members = list(members)
    if vmasks is not None:
        vmasks = [list(m) for m in vmasks]
        for s in range(len(members)):
            for c in range(3):
                for x in list(bits(vmasks[s][c])):
                    trial = list(vmasks[s])
                    trial[c] &= ~(1 << x)
                    if not all(trial):
                        continue
                    cand = members[:s] + [P.induced(*trial)] + members[s + 1:]
                    if ok(cand):
                        vmasks[s] = trial
                        members = cand
    else:
        for s in range(len(members)):
            for e in members[s].edge_list()[:256]:
                rest = [x for x in members[s].edge_list() if x != e]
                cand = members[:s] + [P.from_edges(rest)] + members[s + 1:]
                if ok(cand):
                    members = cand
    t, dens = ok(members)
    return TupleWitness(tuple(members), t, dens)


def check_triad_regular(G, P: Triad, d3, delta3, r: int = 1, strategy: str = "induced",
                        budget: int = 200, seed=0, edge_cap: int = TINY_EDGE_CAP,
                        shrink: bool = True) -> TriadRegVerdict:
    """Search for an r-tuple of subtriads that breaks ``(d3, delta3, r)``-regularity.

    With ``d3=None`` the test is ``(delta3, r)``-regularity, i.e. regular for some
    density: the tested tuple densities must fit in an open window of width
    ``2*delta3``; the witness is then the (lowest, highest) pair.
    A pass is only "no witness found", except for ``exhaustive_tiny`` with r=1.
    """
    delta3 = as_fraction(delta3)
    d3 = None if d3 is None else as_fraction(d3)
    if not 0 < delta3 <= 1:
        raise DomainError("need 0 < delta3 <= 1")
    if r < 1:
        raise DomainError("need r >= 1")
    H = _as_triad_hypergraph(G, P)
    links = H.links
    tP = count_triangles(P)
    rng = np.random.default_rng(seed)
    best = None
    lo = hi = None
    tested = 0
    for members, vmasks in _candidates(P, links, r, strategy, budget, rng, edge_cap):
        t, h = _union_counts(members, links)
        if t * delta3.denominator < delta3.numerator * tP:
            continue
        tested += 1
        dens = Fraction(h, t) if t else Fraction(0)
        if d3 is not None:
            dev = abs(d3 - dens)
            if dev >= delta3 and (best is None or dev > best[0]):
                best = (dev, members, vmasks, t, dens)
        else:
            if lo is None or dens < lo[0]:
                lo = (dens, members, t)
            if hi is None or dens > hi[0]:
                hi = (dens, members, t)
    complete = strategy == "exhaustive_tiny" and r == 1
    if d3 is not None:
        if best is None:
            return TriadRegVerdict(True, "regular", strategy, d3, (), tested, complete)
        _, members, vmasks, t, dens = best
        if shrink:
            wit = _shrink(P, links, members, vmasks, d3, delta3, tP)
        else:
            wit = TupleWitness(tuple(members), t, dens)
        return TriadRegVerdict(False, "irregular", strategy, d3, (wit,), tested, complete)
    if lo is None or hi[0] - lo[0] < 2 * delta3:
        return TriadRegVerdict(True, "regular", strategy, None, (), tested, complete)
    wits = (TupleWitness(tuple(lo[1]), lo[2], lo[0]), TupleWitness(tuple(hi[1]), hi[2], hi[0]))
    return TriadRegVerdict(False, "irregular", strategy, None, wits, tested, complete)


def witness_violates(G, P: Triad, verdict: TriadRegVerdict, delta3) -> bool:
    """Independent recount of a failing verdict's witness by explicit triangle sets."""
    delta3 = as_fraction(delta3)
    H = _as_triad_hypergraph(G, P)
    tP = sum(1 for _ in _iter_triangles(P))

    def recount(w: TupleWitness):
        tri = set()
        for Q in w.members:
            if not Q.is_subtriad_of(P):
                return None
            tri.update(_iter_triangles(Q))
        if len(tri) < delta3 * tP:
            return None
        hits = sum(1 for x in tri if x in H)
        return Fraction(hits, len(tri)) if tri else Fraction(0)

    dens = [recount(w) for w in verdict.witnesses]
    if not dens or any(d is None for d in dens):
        return False
    if verdict.d3 is not None:
        return abs(verdict.d3 - dens[0]) >= delta3
    return max(dens) - min(dens) >= 2 * delta3


@dataclass
class ComplexRegReport:
    pairs: dict
    triples: dict
    regular: bool
    constants: dict

    def to_json(self) -> dict:
        return {
            "regular": self.regular,
            "constants": self.constants,
            "pairs": {f"{i},{j}": v for (i, j), v in sorted(self.pairs.items())},
            "triples": {",".join(map(str, key)): v for key, v in sorted(self.triples.items())},
        }


def check_complex_regular(G: Complex, d3, delta3, d2, delta2, r: int = 1,
                          strategy: str = "induced", mode: str | None = None,
                          notion: str = "d-delta", budget: int = 200, seed=0) -> ComplexRegReport:
    """Pairwise graph regularity plus per-triple hypergraph regularity of a partite complex.

    Empty class pairs and zero-density triples are reported as such and do not fail.
    """
    pairs, trip = {}, {}
    ok = True
    for i, j in combinations(range(G.k), 2):
        m = mode or auto_mode(G, i, j)
        v = check_graph_regular(G, i, j, d2, delta2, notion=notion, mode=m, budget=budget, seed=seed)
        entry = {"status": v.status}
        if v.status != "empty":
            entry["density"] = str(bipartite_density(G, i, j))
        if v.witness is not None:
            entry["witness"] = v.to_json()["witness"]
        pairs[i, j] = entry
        ok &= v.status != "irregular"
    for i, j, k in combinations(range(G.k), 3):
        P = Triad.from_complex(G, i, j, k)
        H = TriadHypergraph.from_complex(G, i, j, k)
        dens = triad_density(H, P)
        entry = {"density": str(dens)}
        if dens == 0:
            entry["status"] = "zero-density"
        else:
            v = check_triad_regular(H, P, d3, delta3, r, strategy, budget, seed)
            entry["status"] = v.status
            if v.witnesses:
                entry["witness"] = [w.to_json() for w in v.witnesses]
            ok &= v.regular
        trip[i, j, k] = entry
    consts = {"d2": str(as_fraction(d2)), "delta2": str(as_fraction(delta2)), "d3": str(as_fraction(d3)),
              "delta3": str(as_fraction(delta3)), "r": r, "strategy": strategy, "notion": notion,
              "budget": budget, "seed": seed}
    return ComplexRegReport(pairs, trip, ok, consts)
