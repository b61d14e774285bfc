import math
import random
from fractions import Fraction
from itertools import chain, combinations, product

import pytest
from hypothesis import given, strategies as st

from hyperreg.core import Complex, clique_pattern, close_complex, complete_complex
from hyperreg.counting import (blow_up, blow_up_sandwich, count_copies, count_extensions,
                               count_graph_copies, enumerate_copies, extension_counts, glued_complex,
                               injective_count, is_copy, moment_concentration, partial_complement,
                               predicted_count, predicted_count_per_edge, predicted_extension,
                               second_moment_check)
from hyperreg.errors import DomainError, StructureError
from hyperreg.models import HostParams, random_host

from conftest import brute_count, k3_pattern, random_complex, random_pattern

EDGE = close_complex((1, 1), edges=[((0, 0), (1, 0))])
VERTEX = Complex((1,))


def two_faces(triples=((0, 1, 2), (0, 1, 3))):
    return close_complex((1, 1, 1, 1), [tuple((c, 0) for c in t) for t in triples])


# examples ------------------------------------------------------------------------

def test_count_examples():
    G = random_complex(random.Random(4), (5, 4, 3))
    assert count_copies(VERTEX, G) == 5
    assert count_copies(EDGE, G) == G.graph.edge_count(0, 1)
    host = close_complex((2, 2, 2), [((0, 0), (1, 0), (2, 0)), ((0, 1), (1, 1), (2, 1))],
                         edges=[((a, x), (b, y)) for a, b in combinations(range(3), 2)
                                for x in range(2) for y in range(2)])
    assert count_copies(k3_pattern(), host) == 2
    assert count_graph_copies(k3_pattern(), host.skeleton()) == 8
    assert count_copies(k3_pattern(), host.skeleton()) == 0
    assert count_copies(Complex(()), host) == 1


def test_class_map_errors():
    with pytest.raises(StructureError):
        count_copies(k3_pattern(), complete_complex((2, 2)))
    with pytest.raises(StructureError):
        count_copies(EDGE, complete_complex((2, 2)), class_map=[0])


def test_same_class_pattern_vertices_are_distinct():
    # two isolated pattern vertices in one class: ordered pairs of distinct host vertices
    H = Complex((2,))
    assert count_copies(H, Complex((5,))) == 20
    # class map folding an edge into one class is never embeddable
    assert count_copies(EDGE, complete_complex((3, 3)), class_map=[0, 0]) == 0


def test_injective_count_matches_brute():
    r = random.Random(0)
    for _ in range(200):
        masks = [r.getrandbits(5) for _ in range(r.randint(0, 4))]
        brute = 0
        for img in product(*[[b for b in range(5) if m >> b & 1] for m in masks]):
            brute += len(set(img)) == len(img)
        assert injective_count(masks) == brute


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_backtrack_and_tensor_match_brute_force(seed, k):
    r = random.Random(seed)
    H = random_pattern(r, k, max_size=2)
    G = random_complex(r, [r.randint(1, 4) for _ in range(k)], 0.7, 0.6)
    want = brute_count(H, G)
    assert count_copies(H, G, method="backtrack") == want
    assert count_copies(H, G, method="tensor") == want
    assert count_copies(H, G) <= count_graph_copies(H, G)


@given(st.integers(0, 10**6))
def test_class_map_folding_matches_brute(seed):
    r = random.Random(seed)
    H = random_complex(r, (1, 1, 1, 1), 0.5, 0.5)
    G = random_complex(r, (4, 4, 4), 0.7, 0.6)
    cmap = [0, 1, 2, r.randrange(3)]
    want = brute_count(H, G, cmap)
    assert count_copies(H, G, cmap, method="backtrack") == want
    assert count_copies(H, G, cmap, method="tensor") == want


# frozen by the brute-force oracle in conftest
@pytest.mark.parametrize("seed,e3,k3", [(7, 35, 35), (8, 39, 39)])
def test_pinned_host_counts(seed, e3, k3):
    G = random_host(HostParams(3, 10, 0.5, 0.5, seed))
    assert G.e3 == e3
    assert count_copies(k3_pattern(), G) == k3


def test_pinned_k4_host_counts():
    G = random_host(HostParams(4, 6, 0.6, 0.5, 3))
    assert count_copies(clique_pattern(4), G) == 1
    P = close_complex((2, 1, 1), [((0, 0), (1, 0), (2, 0)), ((0, 1), (1, 0), (2, 0))])
    assert count_copies(P, G) == 10


def test_enumerate_copies_are_copies():
    r = random.Random(2)
    H = random_pattern(r, 3)
    G = random_complex(r, (4, 4, 4), 0.8, 0.7)
    copies = list(enumerate_copies(H, G))
    assert len(copies) == count_copies(H, G)
    assert len({tuple(sorted(c.items())) for c in copies}) == len(copies)
    assert all(is_copy(H, G, c) for c in copies)


# extensions ------------------------------------------------------------------------

def test_extension_examples():
    G = random_complex(random.Random(9), (4, 5), 0.5, 0)
    for u in range(4):
        deg = G.graph.rows[0, 1][u].bit_count()
        assert count_extensions(VERTEX, EDGE, {(0, 0): (0, u)}, G) == deg
    phi = next(enumerate_copies(EDGE, G))
    assert count_extensions(EDGE, EDGE, phi, G) == 1


def test_non_induced_inclusion_rejected():
    H = close_complex((1, 1, 1), edges=[((0, 0), (1, 0))])
    with pytest.raises(DomainError):
        list(extension_counts(H, k3_pattern(), complete_complex((2, 2, 2))))


@given(st.integers(0, 10**6))
def test_extension_sum_rule(seed):
    r = random.Random(seed)
    Hp = random_pattern(r, 3, max_size=2)
    keep = [v for v in Hp.vertices() if r.random() < 0.5]
    H, ren = Hp.induced(keep)
    inc = {w: v for v, w in ren.items()}
    G = random_complex(r, (4, 4, 4), 0.7, 0.6)
    total = sum(x for _, x in extension_counts(H, Hp, G, inclusion=inc))
    assert total == count_copies(Hp, G) == brute_count(Hp, G)


# predictions --------------------------------------------------------------------------

def test_prediction_examples():
    assert predicted_count(k3_pattern(), 30, 0.5, 0.5).value == pytest.approx(1687.5)
    assert predicted_extension(VERTEX, EDGE, 10, 0.5, 0.5).value == pytest.approx(5)
    assert predicted_count(Complex(()), 10, 0.5, 0.5).value == 1
    single = k3_pattern()
    assert predicted_count_per_edge(single, 10, 1, {((0, 0), (1, 0), (2, 0)): 0.3}).value == pytest.approx(300)
    H = two_faces()
    dens = {((0, 0), (1, 0), (2, 0)): 0.2, ((0, 0), (1, 0), (3, 0)): 0.5}
    want = math.exp(4 * math.log(7) + 5 * math.log(0.6) + math.log(0.2) + math.log(0.5))
    assert predicted_count_per_edge(H, 7, 0.6, dens).value == pytest.approx(want)
    same = {t: 0.4 for t in H.triples}
    assert predicted_count_per_edge(H, 7, 0.6, same).value == pytest.approx(predicted_count(H, 7, 0.6, 0.4).value)
    with pytest.raises(DomainError):
        predicted_count_per_edge(H, 7, 0.6, {})
    with pytest.raises(DomainError):
        predicted_count(H, 7, 0, 0.4)


@given(st.integers(0, 10**6))
def test_prediction_multiplicative_over_disjoint_union(seed):
    r = random.Random(seed)
    A = random_pattern(r, 3)
    B = random_pattern(r, 3)
    sizes = A.class_sizes + B.class_sizes
    shift = lambda v: (v[0] + 3, v[1])
    U = Complex(sizes, frozenset(chain(A.edges, ((shift(a), shift(b)) for a, b in B.edges))),
                frozenset(chain(A.triples, (tuple(map(shift, t)) for t in B.triples))))
    args = (11, 0.6, 0.7)
    assert predicted_count(U, *args).value == pytest.approx(
        predicted_count(A, *args).value * predicted_count(B, *args).value)


# identities ----------------------------------------------------------------------------

def test_partial_complement_examples():
    G = complete_complex((3, 3, 3))
    H = k3_pattern()
    assert partial_complement(G, [], H) == G
    assert partial_complement(G, list(H.triples), H).e3 == 0
    with pytest.raises(DomainError):
        H2 = close_complex((2, 1, 1), [((0, 0), (1, 0), (2, 0))])
        partial_complement(G, list(H2.triples), H2)


@given(st.integers(0, 10**6), st.integers(3, 4))
def test_partial_complement_identity(seed, k):
    r = random.Random(seed)
    H = random_complex(r, (1,) * k, 0.8, 0.6)
    G = random_complex(r, [r.randint(1, 5) for _ in range(k)], 0.7, 0.5)
    E = sorted(H.triples)
    total = sum(count_copies(H, partial_complement(G, D, H))
                for s in range(len(E) + 1) for D in combinations(E, s))
    assert total == count_graph_copies(H, G)


def test_blow_up_examples():
    G = random_complex(random.Random(1), (3, 2, 2))
    same, origin = blow_up(G, (1, 1, 1))
    assert same == G and origin == {0: (0, 0), 1: (1, 0), 2: (2, 0)}
    big, origin = blow_up(G, (2, 1, 1))
    assert big.class_sizes == (3, 3, 2, 2)
    assert big.e3 == 2 * G.e3
    with pytest.raises(DomainError):
        blow_up(G, (0, 1, 1))


@given(st.integers(0, 10**6))
def test_blow_up_sandwich(seed):
    r = random.Random(seed)
    H = random_complex(r, [r.randint(1, 3) for _ in range(3)], 0.6, 0.6)
    G = random_complex(r, [r.randint(2, 5) for _ in range(3)], 0.7, 0.6)
    rep = blow_up_sandwich(H, G)
    assert rep.lower == count_copies(H, G)
    assert rep.holds


def test_glued_complex_of_vertex_in_edge_is_path():
    g = glued_complex(VERTEX, EDGE)
    assert g.class_sizes == (1, 2) and g.e2 == 2


@given(st.integers(0, 10**6))
def test_second_moment_vertex_edge_degree_oracle(seed):
    G = random_complex(random.Random(seed), (5, 6), 0.5, 0)
    sm = second_moment_check(VERTEX, EDGE, G)
    degs = [G.graph.rows[0, 1][u].bit_count() for u in range(5)]
    assert sm.s1 == sum(degs) and sm.s2 == sum(d * d for d in degs)
    assert sm.holds


@given(st.integers(0, 10**6))
def test_second_moment_random(seed):
    r = random.Random(seed)
    Hp = random_pattern(r, 3, max_size=2)
    keep = [v for v in Hp.vertices() if r.random() < 0.5]
    H, ren = Hp.induced(keep)
    inc = {w: v for v, w in ren.items()}
    G = random_complex(r, (4, 4, 4), 0.7, 0.6)
    sm = second_moment_check(H, Hp, G, inclusion=inc)
    assert sm.s1 == sm.total
    assert sm.holds


def test_second_moment_identity_case():
    G = random_complex(random.Random(5), (3, 3, 3), 0.8, 0.7)
    sm = second_moment_check(k3_pattern(), k3_pattern(), G)
    assert sm.s1 == sm.s2 == sm.glued == count_copies(k3_pattern(), G)


def test_moment_concentration_examples():
    rep = moment_concentration([4.0] * 10, 4, 0.1, 0.1)
    assert rep.passed and rep.outliers == 0
    rep = moment_concentration([0, 8] * 5, 4, 0.5, 0.1)
    assert rep.premise_first and not rep.premise_second and not rep.passed
    with pytest.raises(DomainError):
        moment_concentration([-1], 1, 0.1, 0.1)


def test_moment_window_boundary_is_exact():
    # 40 * 0.6^2 * 0.5 is 7.199999999999999 in floats; 9 sits exactly on the 25% window edge
    A = predicted_extension(EDGE.skeleton(), k3_pattern(), 40, 0.6, 0.5)
    assert A.exact == Fraction(36, 5)
    rep = moment_concentration([9, Fraction(27, 5), 10, 5], A, 1, 0.25)
    assert rep.outliers == 2
    assert predicted_count(k3_pattern(), 30, 0.5, 0.5).exact == Fraction(3375, 2)
