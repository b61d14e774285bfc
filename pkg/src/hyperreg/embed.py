"""Constructive embedding of bounded-degree patterns plus diagnostics around one peeled vertex.

The embedder is a complete backtracking search.  Its vertex order follows the
inductive picture: pick a vertex ``h``, place its neighbourhood first, then
``h``, then the rest by distance from ``h``.  Components are handled
smallest first.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Mapping

from .core import Complex, Vertex, as_fraction, bits, degree_profile
from .counting import (_Plan, count_copies, count_extensions, enumerate_copies, is_copy,
                       predicted_extension)
from .errors import DomainError, StructureError


@dataclass(frozen=True)
class EmbedderConfig:
    alpha: float = 0.3
    beta: float = 0.1
    c: float = 1.0
    d2: float = 0.5
    d3: float = 0.5
    delta2: float = 0.3
    delta2_prime: float | None = None
    delta3: float = 0.1
    r: int = 1
    Delta: int | None = None
    k: int | None = None

    @property
    def delta2p(self) -> float:
        return math.sqrt(self.delta2) if self.delta2_prime is None else self.delta2_prime

    def to_json(self) -> dict:
        out = asdict(self)
        out["delta2_prime"] = self.delta2p
        return out


@dataclass(frozen=True)
class Embedding:
    mapping: dict

    def validate(self, H: Complex, G: Complex) -> bool:
        return is_copy(H, G, self.mapping)

    def lines(self) -> list[str]:
        return [f"map {v[0]} {v[1]} {x[1]}" for v, x in sorted(self.mapping.items())]


@dataclass(frozen=True)
class EmbedFailure:
    deepest: dict
    stuck_vertex: Vertex | None
    nodes: int
    reason: str

    def to_json(self) -> dict:
        return {"reason": self.reason, "nodes": self.nodes,
                "stuck_vertex": None if self.stuck_vertex is None else list(self.stuck_vertex),
                "deepest_partial": [[list(v), list(x)] for v, x in sorted(self.deepest.items())]}


# neighbourhood complexes ---------------------------------------------------------

def _adjacency(H: Complex) -> dict:
    adj = {v: set() for v in H.vertices()}
    for a, b in H.edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _distances(adj, sources) -> dict:
    dist = {s: 0 for s in sources}
    dq = deque(sources)
    while dq:
        v = dq.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                dq.append(w)
    return dist


@dataclass(frozen=True)
class NeighborhoodComplexes:
    """Subcomplexes around ``h``; each is stored as (complex, vertex set in ``H`` coordinates)."""

    h: Vertex
    H_h: tuple
    N_h: tuple
    B: tuple
    N_star: tuple
    F_prime: tuple
    H_star: tuple
    H_prime: tuple
    H_minus: tuple

    def vertex_sets(self) -> dict:
        return {name: getattr(self, name)[1] for name in
                ("H_h", "N_h", "B", "N_star", "F_prime", "H_star", "H_prime", "H_minus")}

    def to_json(self) -> dict:
        return {name: {"vertices": sorted(list(v) for v in vs),
                       "e2": getattr(self, name)[0].e2, "e3": getattr(self, name)[0].e3}
                for name, vs in self.vertex_sets().items()} | {"h": list(self.h)}


def neighborhood_complexes(H: Complex, h: Vertex) -> NeighborhoodComplexes:
    h = tuple(h)
    if h not in set(H.vertices()):
        raise DomainError(f"{h} is not a vertex of the pattern")
    adj = _adjacency(H)
    allv = frozenset(H.vertices())
    nh = frozenset(adj[h])
    dist = _distances(adj, list(nh)) if nh else {}
    n_star = frozenset(v for v, d in dist.items() if d == 2)
    first = frozenset(w for v in nh for w in adj[v] if w != h and w not in nh)
    f_prime = nh | n_star | first
    h_h = allv - {h}
    h_star = h_h - (f_prime - n_star)
    h_prime = h_star - n_star
    h_minus = h_h - nh
    b = nh | {h}

    def sub(vs):
        return (H.induced(vs)[0], vs)

    return NeighborhoodComplexes(h, sub(h_h), sub(nh), sub(b), sub(n_star), sub(f_prime),
                                 sub(h_star), sub(h_prime), sub(h_minus))


def _inclusion(H: Complex, small: frozenset, big: frozenset) -> dict:
    """Vertex map between two induced subcomplexes of ``H`` (renumbered coordinates)."""
    _, rs = H.induced(small)
    _, rb = H.induced(big)
    return {rs[v]: rb[v] for v in small}


# embedding -------------------------------------------------------------------------

def _embed_order(H: Complex) -> list:
    adj = _adjacency(H)
    deg = degree_profile(H).complex_degree
    seen, comps = set(), []
    for v in H.vertices():
        if v in seen:
            continue
        comp = set(_distances(adj, [v]))
        seen |= comp
        comps.append(comp)
    comps.sort(key=lambda c: (len(c), min(c)))
    order = []
    for comp in comps:
        h = max(sorted(comp), key=lambda v: deg[v])
        dist = _distances(adj, [h])
        nh = sorted(adj[h])
        rest = sorted((v for v in comp if v != h and v not in adj[h]), key=lambda v: (dist[v], v))
        order.extend(nh + [h] + rest)
    return order


def embed(H: Complex, G: Complex, config: EmbedderConfig | None = None,
          node_limit: int | None = None):
    """Return an :class:`Embedding` of ``H`` into ``G`` or an :class:`EmbedFailure`.

    Raises ``StructureError`` if ``G`` does not respect the partition of ``H``
    and ``DomainError`` if a pattern class exceeds ``c`` times its host class.
    """
    config = config or EmbedderConfig()
    if H.k > G.k:
        raise StructureError("pattern has more classes than the host")
    missing = G.respects(H)
    if missing:
        raise StructureError("host does not respect the partition of the pattern: " + "; ".join(missing))
    for c, s in enumerate(H.class_sizes):
        if s > config.c * G.class_sizes[c]:
            raise DomainError(f"pattern class {c} has {s} vertices, above c*n = {config.c * G.class_sizes[c]}")
    cmap = tuple(range(H.k))
    plan = _Plan(H, G, cmap, order=_embed_order(H), tail=False)
    if plan.impossible:
        return EmbedFailure({}, None, 0, "pattern edge inside one class")
    val = [None] * len(plan.order)
    used = [0] * G.k
    state = {"nodes": 0, "depth": -1, "deepest": {}, "stuck": None}

    def rec(p):
        if p == len(plan.order):
            return True
        state["nodes"] += 1
        if node_limit is not None and state["nodes"] > node_limit:
            raise _Budget()
        cand = plan.candidates(p, val, used)
        if not cand and p > state["depth"]:
            state["depth"] = p
            state["deepest"] = {plan.order[q]: (plan.hc[q], val[q]) for q in range(p)}
            state["stuck"] = plan.order[p]
        hc = plan.hc[p]
        for x in bits(cand):
            val[p] = x
            used[hc] |= 1 << x
            if rec(p + 1):
                return True
            used[hc] &= ~(1 << x)
        val[p] = None
        return False

    try:
        found = rec(0)
    except _Budget:
        return EmbedFailure(state["deepest"], state["stuck"], state["nodes"], "node limit reached")
    if found:
        return Embedding({plan.order[q]: (plan.hc[q], val[q]) for q in range(len(plan.order))})
    return EmbedFailure(state["deepest"], state["stuck"], state["nodes"], "no copy exists")


class _Budget(Exception):
    pass


# count diagnostics ----------------------------------------------------------------

@dataclass(frozen=True)
class RatioCheck:
    lhs: int
    rhs: float
    passed: bool
    sub_count: int
    constants: dict

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed,
                "count_H_h": self.sub_count, "constants": self.constants}


def count_ratio_check(H: Complex, h: Vertex, G: Complex, alpha=0.3, d2=1, d3=1,
                      n: int | None = None, method: str = "auto") -> RatioCheck:
    """``|H|_G >= (1-alpha) n d2^(e2 diff) d3^(e3 diff) |H_h|_G`` with ``H_h = H - h``."""
    h = tuple(h)
    H_h, _ = H.remove([h])
    n = G.class_sizes[h[0]] if n is None else n
    lhs = count_copies(H, G, method=method)
    sub = count_copies(H_h, G, method=method)
    alpha_q, d2q, d3q = as_fraction(alpha), as_fraction(d2), as_fraction(d3)
    rhs = (1 - alpha_q) * n * d2q ** (H.e2 - H_h.e2) * d3q ** (H.e3 - H_h.e3) * sub
    consts = {"alpha": str(alpha_q), "d2": str(d2q), "d3": str(d3q), "n": n}
    return RatioCheck(lhs, float(rhs), lhs >= rhs, sub, consts)


@dataclass(frozen=True)
class TypicalityReport:
    fraction: float
    threshold: float
    predicted: float
    counts: tuple
    typical: int
    total: int
    constants: dict

    def to_json(self) -> dict:
        return {"typical_fraction": self.fraction, "threshold": self.threshold,
                "predicted_extension": self.predicted, "typical": self.typical,
                "copies": self.total, "constants": self.constants,
                "extension_counts": [c for _, c in self.counts]}


def typicality_report(H: Complex, h: Vertex, G: Complex, beta=0.1, d2=0.5, d3=0.5,
                      n: int | None = None) -> TypicalityReport:
    """Classify copies of ``N_h`` by their number of extensions to ``B``."""
    nc = neighborhood_complexes(H, h)
    N, nset = nc.N_h
    B, bset = nc.B
    inc = _inclusion(H, nset, bset)
    n = G.class_sizes[tuple(h)[0]] if n is None else n
    pc = predicted_extension(N, B, n, d2, d3)
    pred = pc.value
    exact_thr = (1 - as_fraction(beta)) * pc.exact
    thr = float(exact_thr)
    counts = []
    for phi in enumerate_copies(N, G):
        counts.append((phi, count_extensions(N, B, phi, G, inclusion=inc)))
    typ = sum(1 for _, c in counts if c >= exact_thr)
    frac = typ / len(counts) if counts else 1.0
    consts = {"beta": float(beta), "d2": float(d2), "d3": float(d3), "n": n}
    return TypicalityReport(frac, thr, pred, tuple(counts), typ, len(counts), consts)


@dataclass(frozen=True)
class UsefulnessReport:
    fraction: float
    useful: int
    total: int
    offenders: tuple
    constants: dict

    def to_json(self) -> dict:
        return {"useful_fraction": self.fraction, "useful": self.useful, "copies": self.total,
                "constants": self.constants,
                "offenders": [{"copy": [[list(v), list(x)] for v, x in sorted(phi.items())],
                               "subset": [list(v) for v in sub], "class": c, "size": size,
                               "window": [lo, hi]} for phi, sub, c, size, lo, hi in self.offenders]}


def usefulness_report(H: Complex, h: Vertex, G: Complex, delta2=0.3, d2=0.5,
                      max_offenders: int = 50) -> UsefulnessReport:
    """Check common-neighbourhood sizes for every copy of ``N_h``.

    For each subset ``S`` of the copy whose pattern preimages have a common
    neighbour in class ``i`` of ``H``, the host common neighbourhood in class ``i``
    must have size in ``[((1-delta2) d2)^l n, ((1+delta2) d2)^l n]``, ``l = |S|``.
    """
    nc = neighborhood_complexes(H, h)
    N, nset = nc.N_h
    _, ren = H.induced(nset)
    back = {w: v for v, w in ren.items()}
    adj = _adjacency(H)
    d2f, dlt = float(d2), float(delta2)
    # subsets of N_h (in H coordinates) with the classes holding a common pattern neighbour
    checks = []
    members = sorted(nset)
    for size in range(1, len(members) + 1):
        for S in combinations(members, size):
            common = set.intersection(*(adj[v] for v in S))
            classes = sorted({w[0] for w in common})
            if classes:
                checks.append((S, classes))
    offenders, useful, total = [], 0, 0
    rows = G.rows
    for phi in enumerate_copies(N, G):
        total += 1
        ok = True
        for S, classes in checks:
            imgs = [phi[ren[v]] for v in S]
            for c in classes:
                if any(x[0] == c for x in imgs):
                    continue
                m = G.graph.full_mask(c)
                for x in imgs:
                    m &= rows[x[0], c][x[1]]
                n = G.class_sizes[c]
                l = len(S)
                lo, hi = ((1 - dlt) * d2f) ** l * n, ((1 + dlt) * d2f) ** l * n
                sz = m.bit_count()
                if not lo <= sz <= hi:
                    ok = False
                    if len(offenders) < max_offenders:
                        offenders.append(({back[w]: x for w, x in phi.items()}, S, c, sz, lo, hi))
        useful += ok
    frac = useful / total if total else 1.0
    return UsefulnessReport(frac, useful, total, tuple(offenders), {"delta2": dlt, "d2": d2f})
