import random
from itertools import combinations, product

import pytest
from hypothesis import HealthCheck, settings

from hyperreg.core import Complex, close_complex

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_complex(rng: random.Random, sizes, p_edge=0.5, p_tri=0.5) -> Complex:
    """Plain-python random complex, independent of the package generators."""
    verts = [(c, x) for c, s in enumerate(sizes) for x in range(s)]
    edges = {(a, b) for a, b in combinations(verts, 2) if a[0] != b[0] and rng.random() < p_edge}
    triples = []
    for t in combinations(verts, 3):
        if len({v[0] for v in t}) == 3 and all(e in edges for e in combinations(t, 2)) \
                and rng.random() < p_tri:
            triples.append(t)
    return Complex(tuple(sizes), frozenset(edges), frozenset(triples))


def random_pattern(rng: random.Random, k, max_size=2, p_edge=0.6, p_tri=0.6) -> Complex:
    sizes = [rng.randint(0, max_size) for _ in range(k)]
    if sum(sizes) == 0:
        sizes[0] = 1
    return random_complex(rng, sizes, p_edge, p_tri)


def brute_count(H: Complex, G: Complex, class_map=None) -> int:
    """Oracle for |H|_G: try every class-respecting map, keep the injective copies."""
    cmap = list(range(H.k)) if class_map is None else list(class_map)
    hv = H.vertices()
    choices = [[(cmap[v[0]], x) for x in range(G.class_sizes[cmap[v[0]]])] for v in hv]
    total = 0
    for img in product(*choices):
        if len(set(img)) != len(img):
            continue
        phi = dict(zip(hv, img))
        if all(tuple(sorted((phi[a], phi[b]))) in G.edges for a, b in H.edges) and \
                all(tuple(sorted(phi[v] for v in t)) in G.triples for t in H.triples):
            total += 1
    return total


def k3_pattern() -> Complex:
    return close_complex((1, 1, 1), [((0, 0), (1, 0), (2, 0))])


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""
    def record(num: int, ok: bool, detail: str) -> bool:
        line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[num] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
