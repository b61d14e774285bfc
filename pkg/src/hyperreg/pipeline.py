"""Toy-scale run of the whole Ramsey argument on a 2-coloured ``K_m^(3)``.

Every stage records its verdict; the first failing stage ends the run with a
structured report instead of an exception.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .core import Complex, Hypergraph3, as_fraction, hypergraph_as_pattern
from .embed import Embedding, embed
from .errors import HyperregError
from .partition import (BLUE, RED, classify_pairs_triples, colour_clique_by_density,
                        greedy_assignment, random_slicing_partition, reduced_hypergraph,
                        select_triad_system, turan_clique)
from .ramsey import random_colouring


@dataclass
class PipelineConfig:
    t: int = 6
    ell: int = 1
    k: int | None = None  # clique order in the reduced hypergraph; default 2*Delta + 1
    eps1: float = 0.5
    eps2: float = 0.5
    eps3: float = 1.0
    delta3: float = 0.5
    r: int = 1
    strategy: str = "induced"
    mode: str | None = None
    budget: int = 50
    seed: int = 0
    max_retries: int = 20
    thin: bool = False

    def to_json(self) -> dict:
        keys = ("t", "ell", "k", "eps1", "eps2", "eps3", "delta3", "r", "strategy", "mode",
                "budget", "seed", "max_retries", "thin")
        return {k: getattr(self, k) for k in keys}


@dataclass
class PipelineReport:
    success: bool
    stages: list = field(default_factory=list)
    colour: int | None = None
    embedding: dict | None = None  # pattern vertex -> vertex of K_m

    def to_json(self) -> dict:
        return {"success": self.success, "colour": self.colour, "stages": self.stages,
                "embedding": None if self.embedding is None else {str(k): v for k, v in sorted(self.embedding.items())}}


def _mono_clique(colours: dict, clusters, size: int):
    for sub in combinations(clusters, size):
        cs = {colours[tr] for tr in combinations(sub, 3)}
        if len(cs) == 1:
            return sub, cs.pop()
    return None, None


def run_pipeline(H: Hypergraph3, m: int, colouring: dict | None = None,
                 config: PipelineConfig | None = None) -> PipelineReport:
    """Look for a monochromatic copy of ``H`` in a 2-coloured ``K_m^(3)`` via the regularity route."""
    cfg = config or PipelineConfig()
    rep = PipelineReport(False)

    def stage(name, ok, **details):
        rep.stages.append({"stage": name, "ok": bool(ok), **details})
        return ok

    if colouring is None:
        colouring = random_colouring(m, cfg.seed)
        stage("colouring", True, source="random", seed=cfg.seed, m=m)
    else:
        stage("colouring", True, source="input", m=m)
    red = frozenset(t for t, c in colouring.items() if c == RED)
    blue = frozenset(t for t, c in colouring.items() if c == BLUE)
    main = RED if len(red) >= len(blue) else BLUE
    G_main = Hypergraph3(m, red if main == RED else blue)
    stage("majority colour", True, colour=main, red=len(red), blue=len(blue))

    Delta = H.max_degree()
    width = 2 * Delta + 1
    k = cfg.k or width
    try:
        P = random_slicing_partition(m, cfg.t, cfg.ell, cfg.seed)
    except HyperregError as exc:
        stage("partition", False, error=str(exc))
        return rep
    stage("partition", True, t=P.t, ell=P.ell, n=P.n, exceptional=len(P.exceptional))

    report = classify_pairs_triples(G_main, P, cfg.eps1, cfg.eps2, cfg.eps3, cfg.delta3, cfg.r,
                                    cfg.strategy, cfg.mode, cfg.budget, cfg.seed)
    stage("classify", True, good_pairs=len(report.good_pairs), good_triples=len(report.good_triples),
          irregular_mass=report.irregular_mass, item_iv=report.item_iv, item_v=report.item_v)
    R = reduced_hypergraph(report)
    stage("reduce", True, edges=R.e, possible=math.comb(P.t, 3))

    if P.t < k:
        stage("clique", False, error=f"only {P.t} clusters for a clique of order {k}")
        return rep
    tur = turan_clique(R, k)
    if not stage("clique", tur.clique is not None, **tur.to_json()):
        return rep

    d2 = as_fraction(1) / cfg.ell
    delta2 = as_fraction(math.sqrt(float(as_fraction(cfg.eps2))))
    system = select_triad_system(G_main, P, tur.clique, d2, delta2, cfg.delta3, cfg.r, cfg.strategy,
                                 cfg.seed, cfg.max_retries, cfg.mode, cfg.budget)
    if not stage("select triads", system.accepted, **system.to_json()):
        return rep

    col = colour_clique_by_density(G_main, P, system, thin=cfg.thin, seed=cfg.seed)
    stage("colour clique", True, **col.to_json())
    sub, ccol = _mono_clique(col.colours, system.clusters, min(width, k))
    if not stage("monochromatic clique", sub is not None, clusters=None if sub is None else list(sub),
                 colour=ccol):
        return rep
    # dense in the majority colour means that colour; sparse means the other one
    target = main if ccol == RED else 1 - main

    try:
        assign = greedy_assignment(H, len(sub))
    except AssertionError as exc:
        stage("assign", False, error=str(exc))
        return rep
    stage("assign", True, assignment={str(v): c for v, c in sorted(assign.items())})

    # host complex on the chosen clusters with the chosen slices
    k2 = len(sub)
    sizes = tuple(P.n for _ in sub)
    edges, triples = set(), set()
    for a, b in combinations(range(k2), 2):
        g = P.families[sub[a], sub[b]][system.choice[sub[a], sub[b]]]
        edges.update(((a, u), (b, v)) for (_, u), (_, v) in g.edges)
    target_set = red if target == RED else blue
    for a, b, c in combinations(range(k2), 3):
        ca, cb, cc = (P.clusters[x] for x in (sub[a], sub[b], sub[c]))
        for u, x in enumerate(ca):
            for v, y in enumerate(cb):
                if ((a, u), (b, v)) not in edges:
                    continue
                for w, z in enumerate(cc):
                    if ((a, u), (c, w)) in edges and ((b, v), (c, w)) in edges \
                            and tuple(sorted((x, y, z))) in target_set:
                        triples.add(((a, u), (b, v), (c, w)))
    host = Complex(sizes, frozenset(edges), frozenset(triples))
    pattern, vmap = hypergraph_as_pattern(H, assign, classes=k2)
    try:
        result = embed(pattern, host)
    except HyperregError as exc:
        stage("embed", False, error=str(exc))
        return rep
    if not isinstance(result, Embedding):
        stage("embed", False, **result.to_json())
        return rep
    image = {}
    for v, pv in vmap.items():
        cls, local = result.mapping[pv]
        image[v] = P.clusters[sub[cls]][local]
    mono = all(colouring[tuple(sorted(image[x] for x in e))] == target for e in H.hyperedges)
    injective = len(set(image.values())) == len(image)
    stage("embed", mono and injective, colour=target, monochromatic=mono, injective=injective)
    rep.success = mono and injective
    rep.colour = target
    rep.embedding = image
    return rep
