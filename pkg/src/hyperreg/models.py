"""Seeded random hosts, bounded-degree patterns and planted-irregular hosts.

Every random draw comes from a generator keyed by ``(seed, tag, classes...)``, so a
class pair or class triple sees the same uniforms whatever else is generated.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .core import Complex, _canon_triple, close_complex, degree_profile
from .errors import DomainError, StructureError

_EDGE_TAG, _TRIPLE_TAG, _PATTERN_TAG = 2, 3, 5


@dataclass(frozen=True)
class HostParams:
    k: int
    n: int | tuple = 10
    d2: float = 0.5
    d3: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be at least 1")
        sizes = self.sizes
        if any(s < 1 for s in sizes):
            raise DomainError("every class needs at least one vertex")
        for name in ("d2", "d3"):
            if not 0 <= float(getattr(self, name)) <= 1:
                raise DomainError(f"{name} must lie in [0, 1]")

    @property
    def sizes(self) -> tuple[int, ...]:
        if isinstance(self.n, int):
            return (self.n,) * self.k
        if len(self.n) != self.k:
            raise DomainError("need one class size per class")
        return tuple(int(x) for x in self.n)


@dataclass(frozen=True)
class PlantSpec:
    class_index: int
    vertices: tuple
    density: float


@dataclass(frozen=True)
class PatternParams:
    k: int
    class_sizes: tuple
    max_degree: int
    target_hyperedges: int
    seed: int = 0
    target_edges: int = 0
    max_tries: int = 20000

    def __post_init__(self):
        if len(self.class_sizes) != self.k or any(s < 0 for s in self.class_sizes):
            raise DomainError("need k non-negative class sizes")
        if self.target_hyperedges > 0 and self.max_degree < 2:
            raise DomainError("a hyperedge forces complex degree 2, so max_degree must be >= 2")


@dataclass(frozen=True)
class PatternResult:
    complex: Complex
    achieved_degree: int
    shortfall: bool
    hyperedges_added: int
    edges_added: int = 0
    tries: int = 0

    def to_json(self) -> dict:
        return {"achieved_degree": self.achieved_degree, "shortfall": self.shortfall,
                "hyperedges": self.hyperedges_added, "extra_edges": self.edges_added, "tries": self.tries}


def _rng(seed, *key) -> np.random.Generator:
    return np.random.default_rng([int(seed), *map(int, key)])


def _uniform_pair(seed, i, j, a, b):
    return _rng(seed, _EDGE_TAG, i, j).random((a, b))


def _uniform_triple(seed, i, j, l, a, b, c):
    return _rng(seed, _TRIPLE_TAG, i, j, l).random((a, b, c))


def _generate(params: HostParams, plants: tuple[PlantSpec, ...] = ()) -> Complex:
    sizes = params.sizes
    k = params.k
    d2, d3 = float(params.d2), float(params.d3)
    adj = {}
    edges = []
    for i, j in combinations(range(k), 2):
        A = _uniform_pair(params.seed, i, j, sizes[i], sizes[j]) < d2
        adj[i, j] = A
        edges.extend(((i, int(u)), (j, int(v))) for u, v in zip(*np.nonzero(A)))
    triples = []
    for i, j, l in combinations(range(k), 3):
        prob = np.full((sizes[i], sizes[j], sizes[l]), d3)
        for p in plants:
            sl = [slice(None)] * 3
            if p.class_index not in (i, j, l):
                continue
            sl[(i, j, l).index(p.class_index)] = list(p.vertices)
            prob[tuple(sl)] = float(p.density)
        U = _uniform_triple(params.seed, i, j, l, sizes[i], sizes[j], sizes[l])
        tri = adj[i, j][:, :, None] & adj[j, l][None, :, :] & adj[i, l][:, None, :]
        hit = tri & (U < prob)
        triples.extend(((i, int(u)), (j, int(v)), (l, int(w))) for u, v, w in zip(*np.nonzero(hit)))
    return Complex(sizes, frozenset(edges), frozenset(triples))


def random_host(params: HostParams) -> Complex:
    """Each cross pair is an edge with probability d2; each triangle a hyperedge with probability d3."""
    G = _generate(params)
    G.meta["provenance"] = {"generator": "random_host", "params": asdict(params)}
    return G


def planted_host(params: HostParams, plants) -> Complex:
    """As :func:`random_host` (same draws) but triangles meeting a planted vertex set use the override density."""
    plants = (plants,) if isinstance(plants, PlantSpec) else tuple(plants)
    sizes = params.sizes
    for p in plants:
        if not 0 <= p.class_index < params.k:
            raise StructureError(f"planted class {p.class_index} out of range")
        if any(not 0 <= v < sizes[p.class_index] for v in p.vertices):
            raise StructureError(f"planted vertex out of range for class {p.class_index}")
        if not 0 <= float(p.density) <= 1:
            raise DomainError("planted density must lie in [0, 1]")
    G = _generate(params, plants)
    G.meta["provenance"] = {"generator": "planted_host", "params": asdict(params),
                            "plants": [asdict(p) for p in plants]}
    return G


def random_pattern(params: PatternParams) -> PatternResult:
    """Rejection-sample hyperedges (then extra edges) keeping every complex degree <= max_degree."""
    rng = _rng(params.seed, _PATTERN_TAG, params.k)
    sizes = tuple(params.class_sizes)
    live = [c for c in range(params.k) if sizes[c] > 0]
    edges, triples = set(), set()
    gdeg, hdeg = {}, {}
    Delta = params.max_degree
    tries = 0

    def deg_ok(new_edges, new_triple):
        g, h = dict(), dict()
        for a, b in new_edges:
            g[a] = g.get(a, gdeg.get(a, 0)) + 1
            g[b] = g.get(b, gdeg.get(b, 0)) + 1
        if new_triple is not None:
            for v in new_triple:
                h[v] = hdeg.get(v, 0) + 1
        touched = set(g) | set(h)
        return all(max(g.get(v, gdeg.get(v, 0)), h.get(v, hdeg.get(v, 0))) <= Delta for v in touched)

    def commit(new_edges, new_triple):
        for a, b in new_edges:
            edges.add((a, b))
            gdeg[a] = gdeg.get(a, 0) + 1
            gdeg[b] = gdeg.get(b, 0) + 1
        if new_triple is not None:
            triples.add(new_triple)
            for v in new_triple:
                hdeg[v] = hdeg.get(v, 0) + 1

    if len(live) >= 3:
        while len(triples) < params.target_hyperedges and tries < params.max_tries:
            tries += 1
            cls = sorted(int(c) for c in rng.choice(live, 3, replace=False))
            t = _canon_triple(tuple((c, int(rng.integers(sizes[c]))) for c in cls))
            if t in triples:
                continue
            new = [e for e in combinations(t, 2) if e not in edges]
            if deg_ok(new, t):
                commit(new, t)
    extra = 0
    if len(live) >= 2:
        budget = tries + params.max_tries
        while extra < params.target_edges and tries < budget:
            tries += 1
            ci, cj = sorted(int(c) for c in rng.choice(live, 2, replace=False))
            e = ((ci, int(rng.integers(sizes[ci]))), (cj, int(rng.integers(sizes[cj]))))
            if e in edges:
                continue
            if deg_ok([e], None):
                commit([e], None)
                extra += 1
    H = close_complex(sizes, triples, edges)
    achieved = degree_profile(H).max_degree
    if achieved > Delta:
        raise AssertionError("pattern generator exceeded its degree budget")
    short = len(triples) < params.target_hyperedges or extra < params.target_edges
    H.meta["provenance"] = {"generator": "random_pattern", "params": asdict(params),
                            "achieved_degree": achieved, "shortfall": short}
    return PatternResult(H, achieved, short, len(triples), extra, tries)
