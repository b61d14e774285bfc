"""Cluster partitions with sliced bipartite families, good pairs and triples,
the reduced hypergraph and the clique/colouring steps built on top of it.

Clusters are numbered ``0..t-1``.  Every family ``families[i, j]`` is a tuple of
2-class graphs (class 0 = cluster ``i``, class 1 = cluster ``j``) in local
coordinates; index 0 is the garbage slice ``P0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .core import Hypergraph3, KPartiteGraph, as_fraction, bits
from .density import auto_mode, bipartite_density, check_d_delta_regular, check_delta_regular
from .errors import DomainError, StructureError
from .triadreg import Triad, TriadHypergraph, check_triad_regular, count_triangles, triad_density


@dataclass(frozen=True)
class RegularityPartition:
    vertex_count: int
    exceptional: tuple
    clusters: tuple
    families: dict
    ell: int

    @property
    def t(self) -> int:
        return len(self.clusters)

    @property
    def n(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    def slices(self, i: int, j: int) -> tuple:
        return self.families[(i, j) if i < j else (j, i)]

    def ell_ij(self, i: int, j: int) -> int:
        return len(self.slices(i, j)) - 1

    def triad(self, i: int, j: int, k: int, a: int, b: int, c: int) -> Triad:
        """Triad ``P^{ij}_a + P^{jk}_b + P^{ik}_c`` for clusters ``i < j < k``."""
        return Triad.from_bipartite(self.families[i, j][a], self.families[j, k][b],
                                    self.families[i, k][c], (i, j, k))

    def hypergraph_on(self, G: Hypergraph3, i: int, j: int, k: int) -> TriadHypergraph:
        return TriadHypergraph.from_hypergraph(G.hyperedges, (self.clusters[i], self.clusters[j], self.clusters[k]))


@dataclass(frozen=True)
class RamseyConfig:
    """Constants of the Ramsey argument, stored for reports only."""

    m: int
    t0: int = 1
    l0: int = 1
    k: int = 3
    Delta: int = 1
    c0: float | None = None
    T0: int | None = None
    N0: int | None = None
    n0: int | None = None
    c: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("m must be at least 1")
        if self.k < 2 * self.Delta + 1:
            raise DomainError("k must be at least 2*Delta + 1")

    @property
    def C(self):
        if None in (self.T0, self.N0, self.n0):
            return None
        return max(2 * self.T0 / self.c, self.N0, 2 * self.T0 * self.n0)


def default_eps2(ell: int, eps1) -> Fraction:
    return min(Fraction(1, ell), as_fraction(eps1) / 4) / 10


def default_r(ell: int, eps1) -> int:
    return max(1, math.ceil(1 / default_eps2(ell, eps1)))


# construction -----------------------------------------------------------------------

def random_slicing_partition(vertices, t: int, ell: int, seed=0) -> RegularityPartition:
    """Random equal clusters; each cross pair goes to one of ``ell`` slices uniformly; ``P0`` empty.

    ``vertices`` is a vertex count, a :class:`Hypergraph3` or anything with ``vertex_count``.
    """
    N = vertices if isinstance(vertices, int) else vertices.vertex_count
    if t < 1 or ell < 1:
        raise DomainError("need t >= 1 and ell >= 1")
    if N < t:
        raise DomainError(f"cannot split {N} vertices into {t} clusters")
    rng = np.random.default_rng([int(seed), 11])
    perm = [int(x) for x in rng.permutation(N)]
    n = N // t
    exceptional = tuple(sorted(perm[: N - n * t]))
    body = perm[N - n * t:]
    clusters = tuple(tuple(sorted(body[c * n:(c + 1) * n])) for c in range(t))
    families = {}
    for i, j in combinations(range(t), 2):
        prng = np.random.default_rng([int(seed), 13, i, j])
        lab = prng.integers(1, ell + 1, size=(n, n))
        parts = [KPartiteGraph.bipartite(n, n, ())]
        for a in range(1, ell + 1):
            us, vs = np.nonzero(lab == a)
            parts.append(KPartiteGraph.bipartite(n, n, zip(us.tolist(), vs.tolist())))
        families[i, j] = tuple(parts)
    return RegularityPartition(N, exceptional, clusters, families, ell)


def partition_from_slices(vertex_count: int, clusters, families, ell: int, exceptional=()) -> RegularityPartition:
    """Assemble a partition from explicit slices given as edge lists per pair.

    ``families[i, j]`` is a list whose entry ``a`` is the edge list of ``P^{ij}_a``.
    """
    clusters = tuple(tuple(c) for c in clusters)
    n = len(clusters[0]) if clusters else 0
    fam = {}
    for (i, j), parts in families.items():
        if i >= j:
            raise StructureError("family keys must be (i, j) with i < j")
        fam[i, j] = tuple(KPartiteGraph.bipartite(n, n, p) for p in parts)
    return RegularityPartition(vertex_count, tuple(exceptional), clusters, fam, ell)


# validation --------------------------------------------------------------------------

@dataclass
class PartitionReport:
    t: int
    ell: int
    n: int
    constants: dict
    item_iv: bool = True
    irregular_slice_edges: int = 0
    item_iv_limit: float = 0.0
    item_v: bool = True
    exceptional_pairs: list = field(default_factory=list)
    item_v_limit: float = 0.0
    good_pairs: set = field(default_factory=set)
    pair_details: dict = field(default_factory=dict)
    good_triples: set = field(default_factory=set)
    irregular_triads: dict = field(default_factory=dict)
    irregular_mass: int | None = None
    mass_limit: Fraction | None = None
    regular_partition: bool | None = None
    ell_half: dict = field(default_factory=dict)
    prop_bound: float | None = None
    bad_triples: int | None = None

    def to_json(self) -> dict:
        out = {
            "t": self.t, "ell": self.ell, "n": self.n, "constants": self.constants,
            "item_iv": {"holds": self.item_iv, "irregular_edges": self.irregular_slice_edges,
                        "limit": self.item_iv_limit},
            "item_v": {"holds": self.item_v, "exceptional_pairs": [list(p) for p in self.exceptional_pairs],
                       "limit": self.item_v_limit},
        }
        if self.pair_details:
            out["pairs"] = {f"{i},{j}": d for (i, j), d in sorted(self.pair_details.items())}
            out["good_pairs"] = sorted(list(p) for p in self.good_pairs)
            out["ell_ij_at_least_half"] = {f"{i},{j}": v for (i, j), v in sorted(self.ell_half.items())}
        if self.irregular_mass is not None:
            out["irregular_triads"] = {",".join(map(str, k)): v for k, v in sorted(self.irregular_triads.items())}
            out["good_triples"] = sorted(list(x) for x in self.good_triples)
            out["irregular_mass"] = self.irregular_mass
            out["mass_limit"] = str(self.mass_limit)
            out["regular_partition"] = self.regular_partition
            out["bad_triples"] = self.bad_triples
            out["bad_triple_bound_reported"] = self.prop_bound
        return out


def _validate_structure(P: RegularityPartition, ell: int, t: int) -> None:
    if P.t != t:
        raise StructureError(f"partition has {P.t} clusters, expected {t}")
    n = P.vertex_count // t
    for c, cl in enumerate(P.clusters):
        if len(cl) != n:
            raise StructureError(f"cluster {c} has {len(cl)} vertices, need floor(|V|/t) = {n}")
    seen = list(P.exceptional) + [v for cl in P.clusters for v in cl]
    if sorted(seen) != list(range(P.vertex_count)):
        raise StructureError("exceptional set and clusters do not partition the vertex set")
    full = (1 << n) - 1
    for i, j in combinations(range(t), 2):
        if (i, j) not in P.families:
            raise StructureError(f"no family for clusters {i},{j}")
        fam = P.families[i, j]
        if len(fam) - 1 > ell:
            raise StructureError(f"pair {i},{j} has {len(fam) - 1} slices, above ell = {ell}")
        if len(fam) < 1:
            raise StructureError(f"pair {i},{j} has no garbage slice")
        for u in range(n):
            acc = 0
            for g in fam:
                if g.class_sizes != (n, n):
                    raise StructureError(f"slice of pair {i},{j} has the wrong shape")
                row = g.rows[0, 1][u]
                if acc & row:
                    raise StructureError(f"slices of pair {i},{j} share an edge at vertex {u}")
                acc |= row
            if acc != full:
                raise StructureError(f"slices of pair {i},{j} do not cover the complete bipartite graph")


def _mode(g, mode):
    return mode or auto_mode(g, 0, 1)


def check_partition(P: RegularityPartition, ell: int, t: int, eps1, eps2, mode: str | None = None,
                    budget: int = 500, seed=0) -> PartitionReport:
    """Items (i)-(iii) raise on violation; items (iv) and (v) are reported with exact counters."""
    _validate_structure(P, ell, t)
    eps1, eps2 = as_fraction(eps1), as_fraction(eps2)
    n = P.n
    pairs = math.comb(t, 2)
    rep = PartitionReport(t, ell, n, {"eps1": str(eps1), "eps2": str(eps2), "mode": mode or "auto",
                                      "budget": budget, "seed": seed})
    irregular = 0
    for i, j in combinations(range(t), 2):
        for g in P.families[i, j]:
            if not g.edges:
                continue
            v = check_delta_regular(g, 0, 1, eps2, mode=_mode(g, mode), budget=budget, seed=seed)
            if v.status == "irregular":
                irregular += len(g.edges)
    rep.irregular_slice_edges = irregular
    rep.item_iv_limit = float(eps1 * pairs * n * n)
    rep.item_iv = irregular <= eps1 * pairs * n * n
    target = Fraction(1, ell)
    for i, j in combinations(range(t), 2):
        if _pair_exceptional(P, i, j, eps1, eps2, target):
            rep.exceptional_pairs.append((i, j))
    rep.item_v_limit = float(eps1 * pairs)
    rep.item_v = len(rep.exceptional_pairs) <= eps1 * pairs
    return rep


def _pair_exceptional(P, i, j, eps1, eps2, target) -> bool:
    fam = P.families[i, j]
    n = P.n
    if len(fam[0].edges) > eps1 * n * n:
        return True
    return any(abs(Fraction(len(g.edges), n * n) - target) > eps2 for g in fam[1:])


def _triad_hyper(G: Hypergraph3, P: RegularityPartition, cache: dict, key):
    if key not in cache:
        cache[key] = P.hypergraph_on(G, *key)
    return cache[key]


def _classify_triads(G, P, delta3, r, strategy, budget, seed, triples=None):
    """Verdict of every triad (alpha >= 1) on the given cluster triples."""
    out = {}
    hyper = {}
    for key in (triples if triples is not None else combinations(range(P.t), 3)):
        i, j, k = key
        H = _triad_hyper(G, P, hyper, key)
        for a in range(1, P.ell_ij(i, j) + 1):
            for b in range(1, P.ell_ij(j, k) + 1):
                for c in range(1, P.ell_ij(i, k) + 1):
                    T = P.triad(i, j, k, a, b, c)
                    v = check_triad_regular(H, T, None, delta3, r, strategy, budget, seed)
                    out[key, (a, b, c)] = (v, count_triangles(T))
    return out


def check_regular_partition(G: Hypergraph3, P: RegularityPartition, delta3, r: int = 1,
                            strategy: str = "induced", budget: int = 100, seed=0):
    """``(mass, pass)``: triangle mass of non-regular triads against ``delta3 |G|^3``."""
    delta3 = as_fraction(delta3)
    verdicts = _classify_triads(G, P, delta3, r, strategy, budget, seed)
    mass = sum(tp for v, tp in verdicts.values() if not v.regular)
    return mass, mass < delta3 * G.vertex_count ** 3


def classify_pairs_triples(G: Hypergraph3, P: RegularityPartition, eps1, eps2, eps3, delta3,
                           r: int = 1, strategy: str = "induced", mode: str | None = None,
                           budget: int = 100, seed=0, check_items: bool = True) -> PartitionReport:
    """Good pairs and good triples, the irregular-triad mass and the reported bad-triple bound."""
    eps1, eps2, eps3, delta3 = map(as_fraction, (eps1, eps2, eps3, delta3))
    t, ell, n = P.t, P.ell, P.n
    if check_items:
        rep = check_partition(P, ell, t, eps1, eps2, mode, budget, seed)
    else:
        _validate_structure(P, ell, t)
        rep = PartitionReport(t, ell, n, {})
    d2 = Fraction(1, ell)
    delta2 = as_fraction(math.sqrt(eps2))
    rep.constants.update({"eps1": str(eps1), "eps2": str(eps2), "eps3": str(eps3), "delta3": str(delta3),
                          "r": r, "d2": str(d2), "delta2": str(delta2), "strategy": strategy,
                          "budget": budget, "seed": seed})
    for i, j in combinations(range(t), 2):
        first = not _pair_exceptional(P, i, j, eps1, eps2, d2)
        irregular = []
        for a, g in enumerate(P.families[i, j][1:], start=1):
            if not g.edges:
                irregular.append(a)
                continue
            v = check_d_delta_regular(g, 0, 1, d2, delta2, mode=_mode(g, mode), budget=budget, seed=seed)
            if v.status != "regular":
                irregular.append(a)
        second = len(irregular) <= eps3 * ell / 6
        good = first and second
        rep.pair_details[i, j] = {"first_bullet": first, "irregular_slices": irregular,
                                  "second_bullet": second, "good": good}
        if good:
            rep.good_pairs.add((i, j))
            rep.ell_half[i, j] = 2 * P.ell_ij(i, j) >= ell
    verdicts = _classify_triads(G, P, delta3, r, strategy, budget, seed)
    mass = 0
    counts = {key: 0 for key in combinations(range(t), 3)}
    for (key, _), (v, tp) in verdicts.items():
        if not v.regular:
            counts[key] += 1
            mass += tp
    rep.irregular_triads = counts
    rep.irregular_mass = mass
    rep.mass_limit = delta3 * G.vertex_count ** 3
    rep.regular_partition = mass < rep.mass_limit
    for key, bad in counts.items():
        i, j, k = key
        if {(i, j), (j, k), (i, k)} <= rep.good_pairs and bad <= eps3 * ell ** 3:
            rep.good_triples.add(key)
    rep.bad_triples = math.comb(t, 3) - len(rep.good_triples)
    rep.prop_bound = float(40 * delta3 * math.comb(t, 3) / eps3)
    return rep


def reduced_hypergraph(report: PartitionReport) -> Hypergraph3:
    """One vertex per cluster, one hyperedge per good triple."""
    return Hypergraph3(report.t, frozenset(tuple(x) for x in report.good_triples))


# clique search -----------------------------------------------------------------------

@dataclass(frozen=True)
class TuranResult:
    clique: tuple | None
    density: float
    above_c0: bool | None
    nodes: int

    def to_json(self) -> dict:
        return {"clique": None if self.clique is None else list(self.clique), "density": self.density,
                "above_c0": self.above_c0, "nodes": self.nodes}


def turan_clique(R: Hypergraph3, k: int, c0=None) -> TuranResult:
    """Backtracking search for ``k`` vertices all of whose triples are hyperedges.

    ``c0`` only feeds the reported density diagnostic; the search always runs.
    """
    t = R.vertex_count
    if t < k:
        raise DomainError(f"need at least k = {k} vertices, hypergraph has {t}")
    total = math.comb(t, 3)
    dens = R.e / total if total else 0.0
    above = None if c0 is None else dens >= float(c0)
    # pair links: link[a][b] = mask of c with abc a hyperedge
    link = [[0] * t for _ in range(t)]
    for a, b, c in R.hyperedges:
        for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
            link[x][y] |= 1 << z
            link[y][x] |= 1 << z
    nodes = 0
    if k <= 2:
        return TuranResult(tuple(range(k)), dens, above, 1)
    found = None
    for a in range(t):
        for b in range(a + 1, t):
            nodes += 1
            m = link[a][b] & ~((1 << (b + 1)) - 1)
            found = _extend(link, [a, b], m, k)
            if found:
                break
        if found:
            break
    return TuranResult(found, dens, above, nodes)


def _extend(link, chosen, cand, k):
    if len(chosen) == k:
        return tuple(chosen)
    if len(chosen) + cand.bit_count() < k:
        return None
    for v in bits(cand):
        cand &= ~(1 << v)
        nxt = cand & ~((1 << (v + 1)) - 1)
        for u in chosen:
            nxt &= link[u][v]
        got = _extend(link, chosen + [v], nxt, k)
        if got:
            return got
    return None


def is_clique(R: Hypergraph3, vs) -> bool:
    return all(tuple(sorted(tr)) in R.hyperedges for tr in combinations(vs, 3))


# triad system selection ----------------------------------------------------------------

@dataclass(frozen=True)
class TriadSystem:
    accepted: bool
    choice: dict
    retries: int
    clusters: tuple
    offender: dict | None = None
    constants: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"accepted": self.accepted, "retries": self.retries, "clusters": list(self.clusters),
               "choice": {f"{i},{j}": a for (i, j), a in sorted(self.choice.items())},
               "constants": self.constants}
        if self.offender is not None:
            out["worst_offender"] = self.offender
        return out

    def triad(self, P: RegularityPartition, i: int, j: int, k: int) -> Triad:
        return P.triad(i, j, k, self.choice[i, j], self.choice[j, k], self.choice[i, k])


def select_triad_system(G: Hypergraph3, P: RegularityPartition, clusters, d2, delta2, delta3,
                        r: int = 1, strategy: str = "induced", seed=0, max_retries: int = 50,
                        mode: str | None = None, budget: int = 100) -> TriadSystem:
    """Pick one slice per cluster pair uniformly until all slices and triads are regular."""
    clusters = tuple(sorted(clusters))
    d2, delta2, delta3 = as_fraction(d2), as_fraction(delta2), as_fraction(delta3)
    consts = {"d2": str(d2), "delta2": str(delta2), "delta3": str(delta3), "r": r, "strategy": strategy,
              "seed": seed, "max_retries": max_retries, "budget": budget}
    rng = np.random.default_rng([int(seed), 17])
    pair_ok, triad_ok, hyper = {}, {}, {}
    fails: dict = {}
    pairs = list(combinations(clusters, 2))
    triples = list(combinations(clusters, 3))
    for attempt in range(1, max_retries + 1):
        choice = {}
        for i, j in pairs:
            lij = P.ell_ij(i, j)
            if lij < 1:
                return TriadSystem(False, {}, attempt, clusters, {"pair": [i, j], "reason": "no slices"}, consts)
            choice[i, j] = int(rng.integers(1, lij + 1))
        ok = True
        for i, j in pairs:
            key = (i, j, choice[i, j])
            if key not in pair_ok:
                g = P.families[i, j][choice[i, j]]
                v = check_d_delta_regular(g, 0, 1, d2, delta2, mode=_mode(g, mode), budget=budget, seed=seed) \
                    if g.edges else None
                pair_ok[key] = v is not None and v.regular
            if not pair_ok[key]:
                ok = False
                fails[("pair",) + key] = fails.get(("pair",) + key, 0) + 1
        for i, j, k in triples:
            key = (i, j, k, choice[i, j], choice[j, k], choice[i, k])
            if key not in triad_ok:
                H = _triad_hyper(G, P, hyper, (i, j, k))
                v = check_triad_regular(H, P.triad(*key), None, delta3, r, strategy, budget, seed)
                triad_ok[key] = v.regular
            if not triad_ok[key]:
                ok = False
                fails[("triad",) + key] = fails.get(("triad",) + key, 0) + 1
        if ok:
            return TriadSystem(True, choice, attempt, clusters, None, consts)
    worst = max(fails.items(), key=lambda kv: (kv[1], kv[0]))[0] if fails else None
    off = None
    if worst is not None:
        off = {"kind": worst[0], "key": list(worst[1:]), "failures": fails[worst]}
    return TriadSystem(False, {}, max_retries, clusters, off, consts)


# colouring of the clique ------------------------------------------------------------------

RED, BLUE = 0, 1


@dataclass(frozen=True)
class CliqueColouring:
    colours: dict  # (i, j, k) -> RED | BLUE
    densities: dict  # (i, j, k) -> Fraction
    thinned: dict | None = None  # (i, j, k) -> TriadHypergraph after thinning red triads
    thin_seed: int | None = None

    def to_json(self) -> dict:
        out = {"colours": {",".join(map(str, k)): c for k, c in sorted(self.colours.items())},
               "densities": {",".join(map(str, k)): str(d) for k, d in sorted(self.densities.items())}}
        if self.thinned is not None:
            out["thin_seed"] = self.thin_seed
        return out


def colour_clique_by_density(G_red: Hypergraph3, P: RegularityPartition, system: TriadSystem,
                             thin: bool = False, seed=0) -> CliqueColouring:
    """Red iff the chosen triad has red density at least 1/2.

    With ``thin`` every red triad's hyperedges are kept independently with probability
    ``1/(2d)`` so the kept density is close to 1/2.
    """
    colours, dens, thinned = {}, {}, {}
    for key in combinations(system.clusters, 3):
        T = system.triad(P, *key)
        H = P.hypergraph_on(G_red, *key)
        d = triad_density(H, T)
        dens[key] = d
        colours[key] = RED if d >= Fraction(1, 2) else BLUE
        if thin and colours[key] == RED:
            rng = np.random.default_rng([int(seed), 19, *key])
            keep = float(Fraction(1, 2) / d)
            on = H.restricted(T)
            trip = [x for x in on.triples()]
            mask = rng.random(len(trip)) < keep
            thinned[key] = TriadHypergraph.from_triples(T.sizes, [x for x, m in zip(trip, mask) if m])
    return CliqueColouring(colours, dens, thinned if thin else None, seed if thin else None)


def blue_complement_densities(G_red: Hypergraph3, P: RegularityPartition, system: TriadSystem) -> dict:
    """``(d_red, d_blue)`` per chosen triad; blue is computed from the complementary triangle set."""
    out = {}
    for key in combinations(system.clusters, 3):
        T = system.triad(P, *key)
        H = P.hypergraph_on(G_red, *key)
        d_red = triad_density(H, T)
        d_blue = triad_density(H.complement(T), T)
        if count_triangles(T):
            if d_red + d_blue != 1:
                raise AssertionError(f"red and blue densities of {key} do not sum to 1")
        elif d_red != 0 or d_blue != 0:
            raise AssertionError(f"empty triad {key} has nonzero density")
        out[key] = (d_red, d_blue)
    return out


def greedy_assignment(H: Hypergraph3, k: int | None = None) -> dict:
    """First-fit colouring so that the three vertices of every hyperedge get distinct colours.

    Vertices are taken by descending degree; ``2*Delta + 1`` colours always suffice.
    """
    conflict = {v: set() for v in range(H.vertex_count)}
    for e in H.hyperedges:
        for a, b in combinations(e, 2):
            conflict[a].add(b)
            conflict[b].add(a)
    limit = 2 * H.max_degree() + 1 if k is None else k
    order = sorted(range(H.vertex_count), key=lambda v: (-H.degree(v), v))
    col = {}
    for v in order:
        taken = {col[w] for w in conflict[v] if w in col}
        c = next(c for c in range(len(conflict[v]) + 1) if c not in taken)
        if c >= limit:
            raise AssertionError(f"first-fit needed more than {limit} colours")
        col[v] = c
    return col
