import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from hyperreg.core import Hypergraph3, KPartiteGraph
from hyperreg.errors import DomainError, StructureError
from hyperreg.partition import (RED, BLUE, RamseyConfig, blue_complement_densities, check_partition,
                                check_regular_partition, classify_pairs_triples, colour_clique_by_density,
                                default_eps2, default_r, greedy_assignment, is_clique,
                                partition_from_slices, random_slicing_partition, reduced_hypergraph,
                                select_triad_system, turan_clique)


def complete_slices(t, n, ell=1, p0_edges=()):
    """Clusters 0..t-1 of size n; slice 1 complete minus the P0 edges."""
    clusters = [list(range(c * n, (c + 1) * n)) for c in range(t)]
    full = [(u, v) for u in range(n) for v in range(n)]
    fam = {}
    for i, j in combinations(range(t), 2):
        p0 = list(p0_edges)
        fam[i, j] = [p0, [e for e in full if e not in set(p0)]]
    return partition_from_slices(t * n, clusters, fam, ell)


def all_cross_triples(t, n):
    out = []
    for i, j, k in combinations(range(t), 3):
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    out.append((i * n + a, j * n + b, k * n + c))
    return frozenset(out)


def test_slicing_partition_shapes():
    P = random_slicing_partition(10, 3, 1, 0)
    assert len(P.exceptional) == 1 and all(len(c) == 3 for c in P.clusters)
    for key, fam in P.families.items():
        assert len(fam[1].edges) == 9 and not fam[0].edges
    check_partition(P, 1, 3, 0.1, 0.1)
    with pytest.raises(DomainError):
        random_slicing_partition(2, 3, 1)


@pytest.mark.parametrize("seed", [0, 1])
def test_slice_densities_binomial(seed):
    P = random_slicing_partition(4 * 64, 4, 4, seed)
    sd = math.sqrt(64 * 64 * 0.25 * 0.75)
    for fam in P.families.values():
        for g in fam[1:]:
            assert abs(len(g.edges) - 64 * 64 / 4) <= 4 * sd


def test_structure_errors():
    P = complete_slices(3, 2)
    with pytest.raises(StructureError):
        check_partition(P, 1, 4, 0.1, 0.1)
    bad = partition_from_slices(4, [[0, 1], [2, 3]], {(0, 1): [[], [(0, 0)]]}, 1)
    with pytest.raises(StructureError):
        check_partition(bad, 1, 2, 0.1, 0.1)
    overlap = partition_from_slices(4, [[0, 1], [2, 3]], {(0, 1): [[(0, 0)], [(0, 0), (0, 1), (1, 0), (1, 1)]]}, 1)
    with pytest.raises(StructureError):
        check_partition(overlap, 1, 2, 0.1, 0.1)
    with pytest.raises(StructureError):
        check_partition(random_slicing_partition(8, 2, 3, 0), 2, 2, 0.1, 0.1)


def test_check_partition_examples():
    rep = check_partition(complete_slices(2, 3), 1, 2, 0.1, 0.1)
    assert rep.item_iv and rep.item_v and not rep.exceptional_pairs
    heavy = complete_slices(3, 3, p0_edges=[(0, 0), (0, 1), (1, 0)])
    rep = check_partition(heavy, 1, 3, 0.1, 0.1)
    assert not rep.item_v and len(rep.exceptional_pairs) == 3


def test_regular_partition_examples():
    P = complete_slices(3, 3)
    mass, ok = check_regular_partition(Hypergraph3(9), P, 0.1)
    assert mass == 0 and ok
    G = Hypergraph3(9, frozenset([(0, 3, 6), (1, 4, 7)]))
    mass, ok = check_regular_partition(G, P, 1)
    assert ok


def test_planted_single_triad_mass():
    n = 6
    P = complete_slices(3, n)
    half = [(a, n + b, 2 * n + c) for a in range(n // 2) for b in range(n) for c in range(n)]
    G = Hypergraph3(3 * n, frozenset(half))
    mass, ok = check_regular_partition(G, P, 0.1)
    # the single triad is irregular and carries all n^3 triangles; 216 < (1/10) 18^3
    assert mass == n ** 3
    assert ok
    _, tight = check_regular_partition(G, P, Fraction(1, 30))
    assert not tight


def test_all_good_when_complete():
    P = complete_slices(4, 2)
    G = Hypergraph3(8, all_cross_triples(4, 2))
    rep = classify_pairs_triples(G, P, 0.1, 0.1, 0.5, 0.1)
    assert len(rep.good_pairs) == 6 and len(rep.good_triples) == 4
    R = reduced_hypergraph(rep)
    assert R.e == math.comb(4, 3)
    assert all(rep.ell_half.values())


def test_bad_pair_kills_its_triples():
    n = 3
    P = complete_slices(4, n)
    fam = dict(P.families)
    full = [(u, v) for u in range(n) for v in range(n)]
    fam[0, 1] = ([e for e in full[:5]], [e for e in full[5:]])
    fam[0, 1] = tuple(KPartiteGraph.bipartite(n, n, part) for part in fam[0, 1])
    P2 = type(P)(P.vertex_count, P.exceptional, P.clusters, fam, P.ell)
    G = Hypergraph3(4 * n, all_cross_triples(4, n))
    rep = classify_pairs_triples(G, P2, 0.1, 0.1, 0.5, 0.1)
    assert (0, 1) not in rep.good_pairs
    assert rep.good_triples == {(0, 2, 3), (1, 2, 3)}


@pytest.mark.parametrize("seed", [0, 1])
def test_random_instance_report(seed):
    r = random.Random(seed)
    N = 24
    G = Hypergraph3(N, frozenset(t for t in combinations(range(N), 3) if r.random() < 0.5))
    P = random_slicing_partition(G, 4, 2, seed)
    rep = classify_pairs_triples(G, P, 0.5, 0.5, 1.0, 0.3, mode="sampled", budget=50, seed=seed)
    js = rep.to_json()
    assert js["bad_triple_bound_reported"] == pytest.approx(40 * 0.3 * 4 / 1.0)
    assert set(map(tuple, js["good_triples"])) <= set(combinations(range(4), 3))
    for key in rep.good_triples:
        assert {(key[0], key[1]), (key[1], key[2]), (key[0], key[2])} <= rep.good_pairs


def test_reduced_examples():
    P = complete_slices(3, 2)
    rep = classify_pairs_triples(Hypergraph3(6), P, 0.1, 0.1, 0.5, 0.1)
    assert reduced_hypergraph(rep).e == 1
    rep.good_triples = set()
    assert reduced_hypergraph(rep) == Hypergraph3(3)


def test_turan_examples():
    K6 = Hypergraph3(6, frozenset(combinations(range(6), 3)))
    res = turan_clique(K6, 4)
    assert res.clique is not None and is_clique(K6, res.clique)
    assert turan_clique(Hypergraph3(5), 3).clique is None
    R = Hypergraph3(7, frozenset(t for t in combinations(range(7), 3) if 0 not in t))
    res = turan_clique(R, 4)
    assert 0 not in res.clique and is_clique(R, res.clique)
    with pytest.raises(DomainError):
        turan_clique(Hypergraph3(3), 4)


def test_turan_agrees_with_brute_force():
    r = random.Random(3)
    for _ in range(30):
        t = r.randint(4, 8)
        R = Hypergraph3(t, frozenset(x for x in combinations(range(t), 3) if r.random() < 0.6))
        k = r.randint(3, 5)
        if k > t:
            continue
        brute = any(is_clique(R, s) for s in combinations(range(t), k))
        res = turan_clique(R, k)
        assert (res.clique is not None) == brute
        if res.clique is not None:
            assert is_clique(R, res.clique)


def test_defaults_and_config():
    assert default_eps2(2, Fraction(1, 2)) == Fraction(1, 80)
    assert default_r(2, Fraction(1, 2)) == 80
    with pytest.raises(DomainError):
        RamseyConfig(10, k=2, Delta=1)
    assert RamseyConfig(10, T0=2, N0=5, n0=3).C == 12


def test_triad_system_and_colouring():
    n = 4
    P = complete_slices(3, n)
    G = Hypergraph3(3 * n, frozenset((a, n + b, 2 * n + c) for a in range(n) for b in range(n)
                                     for c in range(n) if (a + b + c) % 4 != 0))
    sys_ = select_triad_system(G, P, (0, 1, 2), 1, 0.3, 0.5)
    assert sys_.accepted and sys_.choice == {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    col = colour_clique_by_density(G, P, sys_)
    assert col.colours[0, 1, 2] == RED and col.densities[0, 1, 2] == Fraction(3, 4)
    dens = blue_complement_densities(G, P, sys_)
    assert dens[0, 1, 2] == (Fraction(3, 4), Fraction(1, 4))
    thin = colour_clique_by_density(G, P, sys_, thin=True, seed=1)
    assert thin.thinned is not None
    sparse = Hypergraph3(3 * n, frozenset([(0, n, 2 * n)]))
    assert colour_clique_by_density(sparse, P, sys_).colours[0, 1, 2] == BLUE


def test_greedy_assignment_properties():
    r = random.Random(7)
    for _ in range(50):
        N = r.randint(3, 9)
        H = Hypergraph3(N, frozenset(t for t in combinations(range(N), 3) if r.random() < 0.2))
        col = greedy_assignment(H)
        assert max(col.values(), default=0) < 2 * H.max_degree() + 1 or H.e == 0
        for e in H.hyperedges:
            assert len({col[v] for v in e}) == 3
