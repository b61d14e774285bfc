"""Core data types: k-partite graphs, complexes and plain 3-uniform hypergraphs.

Vertices of partite objects are addressed as ``(class_index, local_index)``
pairs.  Adjacency between two classes is stored as one Python ``int`` per
vertex, used as a bit row over the other class; intersections of candidate
sets are therefore single ``&`` operations.
"""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from .errors import ParseError, StructureError

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]
Triple = tuple[Vertex, Vertex, Vertex]

CLASS_SIZE_CAP = int(os.environ.get("HYPERREG_CLASS_CAP", 4096))


def as_fraction(x) -> Fraction:
    """Exact rational for user-facing constants; floats are read by their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a density")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("HYPERREG_THREADS", "1")))
    except ValueError:
        return 1


def _canon_edge(e) -> Edge:
    a, b = e
    a = (int(a[0]), int(a[1]))
    b = (int(b[0]), int(b[1]))
    if a[0] == b[0]:
        raise StructureError(f"edge {a}-{b} lies inside class {a[0]}")
    return (a, b) if a[0] < b[0] else (b, a)


def _canon_triple(t) -> Triple:
    vs = sorted((int(v[0]), int(v[1])) for v in t)
    if len(vs) != 3 or len({v[0] for v in vs}) != 3:
        raise StructureError(f"hyperedge {tuple(vs)} does not meet three distinct classes")
    return tuple(vs)


def _check_vertex(v: Vertex, class_sizes) -> None:
    i, u = v
    if not 0 <= i < len(class_sizes):
        raise StructureError(f"vertex {v}: class {i} out of range")
    if not 0 <= u < class_sizes[i]:
        raise StructureError(f"vertex {v}: index {u} out of range for class of size {class_sizes[i]}")


def _check_sizes(class_sizes) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in class_sizes)
    for s in sizes:
        if s < 0:
            raise StructureError(f"negative class size {s}")
        if s > CLASS_SIZE_CAP:
            raise StructureError(f"class size {s} exceeds cap {CLASS_SIZE_CAP}")
    return sizes


@dataclass(frozen=True)
class KPartiteGraph:
    """A k-partite graph; edges only run between distinct classes."""

    class_sizes: tuple[int, ...]
    edges: frozenset = frozenset()

    def __post_init__(self):
        sizes = _check_sizes(self.class_sizes)
        edges = frozenset(_canon_edge(e) for e in self.edges)
        for a, b in edges:
            _check_vertex(a, sizes)
            _check_vertex(b, sizes)
        object.__setattr__(self, "class_sizes", sizes)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def bipartite(cls, n_a: int, n_b: int, pairs: Iterable[tuple[int, int]] = ()) -> "KPartiteGraph":
        return cls((n_a, n_b), frozenset(((0, u), (1, v)) for u, v in pairs))

    @classmethod
    def complete(cls, class_sizes) -> "KPartiteGraph":
        sizes = tuple(class_sizes)
        edges = [((i, u), (j, v)) for i, j in combinations(range(len(sizes)), 2)
                 for u in range(sizes[i]) for v in range(sizes[j])]
        return cls(sizes, frozenset(edges))

    @property
    def k(self) -> int:
        return len(self.class_sizes)

    @cached_property
    def rows(self) -> dict[tuple[int, int], tuple[int, ...]]:
        """``rows[i, j][u]`` is the bit row of neighbours of ``(i, u)`` inside class ``j``."""
        acc = {(i, j): [0] * self.class_sizes[i]
               for i in range(self.k) for j in range(self.k) if i != j}
        for (i, u), (j, v) in self.edges:
            acc[i, j][u] |= 1 << v
            acc[j, i][v] |= 1 << u
        return {key: tuple(val) for key, val in acc.items()}

    def row(self, i: int, u: int, j: int) -> int:
        return self.rows[i, j][u]

    def has_edge(self, a: Vertex, b: Vertex) -> bool:
        return a[0] != b[0] and bool(self.rows[a[0], b[0]][a[1]] >> b[1] & 1)

    def edge_count(self, i: int, j: int) -> int:
        return sum(r.bit_count() for r in self.rows[i, j])

    def full_mask(self, i: int) -> int:
        return (1 << self.class_sizes[i]) - 1


@dataclass(frozen=True)
class Complex:
    """A k-partite complex: vertex classes, edges ``E2`` and hyperedges ``E3``.

    Construction is strict: every pair inside a hyperedge must already be an
    edge.  Use :func:`close_complex` to add the forced edges instead.
    ``meta`` carries provenance and takes no part in equality.
    """

    class_sizes: tuple[int, ...]
    edges: frozenset = frozenset()
    triples: frozenset = frozenset()
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        sizes = _check_sizes(self.class_sizes)
        edges = frozenset(_canon_edge(e) for e in self.edges)
        triples = frozenset(_canon_triple(t) for t in self.triples)
        for a, b in edges:
            _check_vertex(a, sizes)
            _check_vertex(b, sizes)
        for t in triples:
            for v in t:
                _check_vertex(v, sizes)
            for a, b in combinations(t, 2):
                if (a, b) not in edges:
                    raise StructureError(f"hyperedge {t} is missing its edge {a}-{b}")
        object.__setattr__(self, "class_sizes", sizes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "triples", triples)

    # sizes -----------------------------------------------------------------
    @property
    def k(self) -> int:
        return len(self.class_sizes)

    @property
    def order(self) -> int:
        """|H|, the number of vertices."""
        return sum(self.class_sizes)

    @property
    def e2(self) -> int:
        return len(self.edges)

    @property
    def e3(self) -> int:
        return len(self.triples)

    def vertices(self) -> list[Vertex]:
        return [(i, u) for i, s in enumerate(self.class_sizes) for u in range(s)]

    # adjacency -------------------------------------------------------------
    @cached_property
    def graph(self) -> KPartiteGraph:
        return KPartiteGraph(self.class_sizes, self.edges)

    @property
    def rows(self):
        return self.graph.rows

    @cached_property
    def links(self) -> dict[tuple[Vertex, Vertex, int], int]:
        """``links[a, b, c]``: bit row of vertices ``w`` of class ``c`` with ``{a, b, w}`` a hyperedge.

        Keys have ``a[0] < b[0]``.
        """
        acc: dict = defaultdict(int)
        for a, b, c in self.triples:
            acc[a, b, c[0]] |= 1 << c[1]
            acc[a, c, b[0]] |= 1 << b[1]
            acc[b, c, a[0]] |= 1 << a[1]
        return dict(acc)

    def link(self, a: Vertex, b: Vertex, c: int) -> int:
        if a[0] > b[0]:
            a, b = b, a
        return self.links.get((a, b, c), 0)

    @cached_property
    def _adjacency(self) -> dict[Vertex, frozenset]:
        acc = {v: set() for v in self.vertices()}
        for a, b in self.edges:
            acc[a].add(b)
            acc[b].add(a)
        return {v: frozenset(s) for v, s in acc.items()}

    def neighbours(self, v: Vertex) -> frozenset:
        return self._adjacency[v]

    def has_edge(self, a: Vertex, b: Vertex) -> bool:
        return b in self._adjacency.get(a, ())

    def has_triple(self, a: Vertex, b: Vertex, c: Vertex) -> bool:
        return tuple(sorted((a, b, c))) in self.triples

    def respects(self, pattern: "Complex", class_map=None) -> list[str]:
        """Class pairs/triples where the pattern demands structure the host lacks (empty list: respected)."""
        cmap = tuple(range(pattern.k)) if class_map is None else tuple(class_map)
        host_pairs = {(a[0], b[0]) for a, b in self.edges}
        host_trip = {tuple(v[0] for v in t) for t in self.triples}
        missing = []
        for a, b in sorted(pattern.edges):
            key = tuple(sorted((cmap[a[0]], cmap[b[0]])))
            if key not in host_pairs:
                missing.append(f"no host edge between classes {key[0]} and {key[1]}")
                host_pairs.add(key)
        for t in sorted(pattern.triples):
            key = tuple(sorted(cmap[v[0]] for v in t))
            if key not in host_trip:
                missing.append(f"no host hyperedge on classes {key}")
                host_trip.add(key)
        return missing

    # derived complexes -----------------------------------------------------
    def induced(self, keep: Iterable[Vertex]) -> tuple["Complex", dict[Vertex, Vertex]]:
        """Subcomplex induced on ``keep``; local indices are renumbered per class in order.

        Returns the subcomplex and the map old vertex -> new vertex.
        """
        keep = sorted(set(keep))
        sizes = [0] * self.k
        ren: dict[Vertex, Vertex] = {}
        for v in keep:
            _check_vertex(v, self.class_sizes)
            ren[v] = (v[0], sizes[v[0]])
            sizes[v[0]] += 1
        edges = [(ren[a], ren[b]) for a, b in self.edges if a in ren and b in ren]
        triples = [tuple(ren[v] for v in t) for t in self.triples if all(v in ren for v in t)]
        return Complex(tuple(sizes), frozenset(edges), frozenset(triples)), ren

    def remove(self, drop: Iterable[Vertex]) -> tuple["Complex", dict[Vertex, Vertex]]:
        drop = set(drop)
        return self.induced(v for v in self.vertices() if v not in drop)

    def skeleton(self) -> "Complex":
        """The underlying graph as a complex without hyperedges."""
        return Complex(self.class_sizes, self.edges, frozenset())


@dataclass(frozen=True)
class Hypergraph3:
    """A 3-uniform hypergraph on vertices ``0..vertex_count-1``."""

    vertex_count: int
    hyperedges: frozenset = frozenset()

    def __post_init__(self):
        n = int(self.vertex_count)
        out = set()
        for e in self.hyperedges:
            t = tuple(sorted(int(x) for x in e))
            if len(t) != 3 or len(set(t)) != 3:
                raise StructureError(f"hyperedge {e} needs three distinct vertices")
            if t[0] < 0 or t[2] >= n:
                raise StructureError(f"hyperedge {t} out of range for {n} vertices")
            out.add(t)
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "hyperedges", frozenset(out))

    @property
    def e(self) -> int:
        return len(self.hyperedges)

    def __contains__(self, triple) -> bool:
        return tuple(sorted(triple)) in self.hyperedges

    def degree(self, v: int) -> int:
        return sum(1 for t in self.hyperedges if v in t)

    def max_degree(self) -> int:
        deg = [0] * self.vertex_count
        for t in self.hyperedges:
            for v in t:
                deg[v] += 1
        return max(deg, default=0)

    def complement(self) -> "Hypergraph3":
        """All triples of the vertex set that are not hyperedges."""
        allt = combinations(range(self.vertex_count), 3)
        return Hypergraph3(self.vertex_count, frozenset(t for t in allt if t not in self.hyperedges))


@dataclass(frozen=True)
class DegreeProfile:
    graph_degree: dict
    hypergraph_degree: dict
    complex_degree: dict
    max_degree: int


def close_complex(class_sizes, triples: Iterable = (), edges: Iterable = ()) -> Complex:
    """Build a complex, adding every edge forced by a hyperedge."""
    sizes = _check_sizes(class_sizes)
    tr = frozenset(_canon_triple(t) for t in triples)
    es = set(_canon_edge(e) for e in edges)
    for t in tr:
        es.update(combinations(t, 2))
    return Complex(sizes, frozenset(es), tr)


def complete_complex(class_sizes) -> Complex:
    """All cross-class edges, and every cross-class triangle as a hyperedge."""
    sizes = tuple(class_sizes)
    g = KPartiteGraph.complete(sizes)
    triples = [((i, u), (j, v), (l, w))
               for i, j, l in combinations(range(len(sizes)), 3)
               for u in range(sizes[i]) for v in range(sizes[j]) for w in range(sizes[l])]
    return Complex(sizes, g.edges, frozenset(triples))


def clique_pattern(k: int) -> Complex:
    """K_k^(3) as a complex with one vertex in each of k classes."""
    return complete_complex((1,) * k)


def degree_profile(c: Complex) -> DegreeProfile:
    gdeg = {v: 0 for v in c.vertices()}
    hdeg = dict(gdeg)
    for a, b in c.edges:
        gdeg[a] += 1
        gdeg[b] += 1
    for t in c.triples:
        for v in t:
            hdeg[v] += 1
    cdeg = {v: max(gdeg[v], hdeg[v]) for v in gdeg}
    return DegreeProfile(gdeg, hdeg, cdeg, max(cdeg.values(), default=0))


# file format ---------------------------------------------------------------

def serialize_complex(c: Complex) -> str:
    lines = [f"k {c.k}"]
    lines += [f"class {i} {s}" for i, s in enumerate(c.class_sizes)]
    lines += [f"edge {a[0]} {a[1]} {b[0]} {b[1]}" for a, b in sorted(c.edges)]
    lines += ["tri " + " ".join(f"{v[0]} {v[1]}" for v in t) for t in sorted(c.triples)]
    return "\n".join(lines) + "\n"


def _ints(parts, count, lineno, what):
    if len(parts) != count:
        raise ParseError(f"'{what}' expects {count} integers, got {len(parts)}", lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"non-integer field in '{what}' line", lineno) from None


def parse_complex(text: str) -> Complex:
    """Parse the line-based complex format.  Hyperedges without their edges are rejected."""
    k = None
    sizes: dict[int, int] = {}
    edges: list[tuple[Edge, int]] = []
    triples: list[tuple[Triple, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "k":
            if k is not None:
                raise ParseError("duplicate 'k' line", lineno)
            (k,) = _ints(rest, 1, lineno, "k")
            if k < 0:
                raise ParseError("negative class count", lineno)
        elif head == "class":
            i, s = _ints(rest, 2, lineno, "class")
            if k is None:
                raise ParseError("'class' before 'k'", lineno)
            if not 0 <= i < k:
                raise ParseError(f"class index {i} out of range 0..{k - 1}", lineno)
            if i in sizes:
                raise ParseError(f"class {i} declared twice", lineno)
            if s < 0 or s > CLASS_SIZE_CAP:
                raise ParseError(f"class size {s} out of range", lineno)
            sizes[i] = s
        elif head in ("edge", "tri"):
            n = 4 if head == "edge" else 6
            vals = _ints(rest, n, lineno, head)
            verts = [(vals[2 * q], vals[2 * q + 1]) for q in range(n // 2)]
            for v in verts:
                if v[0] not in sizes:
                    raise ParseError(f"vertex {v} refers to undeclared class {v[0]}", lineno)
                if not 0 <= v[1] < sizes[v[0]]:
                    raise ParseError(f"vertex {v} out of range for class of size {sizes[v[0]]}", lineno)
            try:
                if head == "edge":
                    edges.append((_canon_edge(verts), lineno))
                else:
                    triples.append((_canon_triple(verts), lineno))
            except StructureError as exc:
                raise ParseError(str(exc), lineno) from None
        else:
            raise ParseError(f"unknown record '{head}'", lineno)
    if k is None:
        raise ParseError("missing 'k' line")
    missing = [i for i in range(k) if i not in sizes]
    if missing:
        raise ParseError(f"classes {missing} not declared")
    eset = {e for e, _ in edges}
    for t, lineno in triples:
        for a, b in combinations(t, 2):
            if (a, b) not in eset:
                raise ParseError(f"closure violation: hyperedge {t} lacks edge {a}-{b}", lineno)
    return Complex(tuple(sizes[i] for i in range(k)), frozenset(eset), frozenset(t for t, _ in triples))


def load_complex(path) -> Complex:
    with open(path, encoding="utf-8") as fh:
        return parse_complex(fh.read())


def dump_complex(c: Complex, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_complex(c))


def serialize_hypergraph(h: Hypergraph3) -> str:
    lines = [f"n {h.vertex_count}"] + [f"tri {a} {b} {c}" for a, b, c in sorted(h.hyperedges)]
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str) -> Hypergraph3:
    """Plain 3-graph format: ``n <count>`` then ``tri a b c`` lines."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "n":
            (n,) = _ints(rest, 1, lineno, "n")
        elif head == "tri":
            t = _ints(rest, 3, lineno, "tri")
            if n is None:
                raise ParseError("'tri' before 'n'", lineno)
            if len(set(t)) != 3 or min(t) < 0 or max(t) >= n:
                raise ParseError(f"bad hyperedge {t}", lineno)
            edges.append(t)
        else:
            raise ParseError(f"unknown record '{head}'", lineno)
    if n is None:
        raise ParseError("missing 'n' line")
    return Hypergraph3(n, frozenset(tuple(e) for e in edges))


def hypergraph_as_pattern(h: Hypergraph3, colouring: Mapping[int, int] | None = None,
                          classes: int | None = None) -> tuple[Complex, dict[int, Vertex]]:
    """Turn a 3-graph into a partite complex.

    Without a colouring every vertex gets its own class.  Returns the complex and
    the vertex map ``int -> (class, local)``.
    """
    if colouring is None:
        colouring = {v: v for v in range(h.vertex_count)}
    k = classes if classes is not None else (max(colouring.values(), default=-1) + 1)
    sizes = [0] * k
    vmap = {}
    for v in range(h.vertex_count):
        c = colouring[v]
        vmap[v] = (c, sizes[c])
        sizes[c] += 1
    triples = [tuple(vmap[x] for x in t) for t in h.hyperedges]
    return close_complex(tuple(sizes), triples), vmap
