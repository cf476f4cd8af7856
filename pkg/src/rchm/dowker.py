"""Dowker complex on the P-side of a bipartite graph, and its degree statistics.

A set of P-vertices is a simplex when some P'-vertex (a witness) is adjacent to
all of them; its witness count is the number of such P'-vertices.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bipartite import BipartiteGraph

DEFAULT_MAX_AUTHORS = 20

DEGREE_KINDS = ("Delta0", "Delta1", "Delta0_prime", "coface0", "coface1")


class UnionFind:
    """Disjoint sets over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass
class DowkerComplex:
    max_dim: int
    simplices: list[dict[tuple, int]]
    n_vertices: int = 0
    vertex_marks: np.ndarray | None = None
    vertex_positions: np.ndarray | None = None
    max_witness_arity: int | None = DEFAULT_MAX_AUTHORS
    # neighbor-set sizes of the witnesses that were used, and how many were dropped
    witness_sizes: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    n_excluded_witnesses: int = 0

    def __post_init__(self):
        # canonical iteration order: sorted tuples within each dimension
        self.simplices = [dict(sorted(d.items())) for d in self.simplices]

    def count(self, m: int) -> int:
        return simplex_count(self, m)

    def witness_count(self, simplex) -> int:
        simplex = tuple(sorted(simplex))
        return self.simplices[len(simplex) - 1].get(simplex, 0)

    def __iter__(self):
        for dim_map in self.simplices:
            yield from dim_map.items()

    def total(self) -> int:
        return sum(len(d) for d in self.simplices)

    def write(self, path):
        """``dim,v0,...,vm,witness_count`` lines, by dimension then vertex tuple."""
        with open(path, "w") as fh:
            fh.write("dim,v0,...,vm,witness_count\n")
            for m, dim_map in enumerate(self.simplices):
                for s, c in dim_map.items():
                    fh.write(",".join(map(str, (m, *s, c))) + "\n")

    @classmethod
    def read(cls, path, max_dim: int | None = None) -> "DowkerComplex":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0].strip() != "dim,v0,...,vm,witness_count":
            raise ValueError(f"{path}: missing complex header")
        maps: dict[int, dict] = {}
        n = 0
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            vals = [int(v) for v in line.split(",")]
            m, verts, c = vals[0], tuple(vals[1:-1]), vals[-1]
            if len(verts) != m + 1:
                raise ValueError(f"{path}:{lineno}: dimension {m} with {len(verts)} vertices")
            maps.setdefault(m, {})[verts] = c
            n = max(n, max(verts) + 1)
        top = max(maps) if maps else 0
        top = top if max_dim is None else max_dim
        return cls(top, [maps.get(m, {}) for m in range(top + 1)], n_vertices=n)


def enumerate_simplices(
    graph: BipartiteGraph,
    max_dim: int,
    max_witness_arity: int | None = DEFAULT_MAX_AUTHORS,
    vertex_marks=None,
    vertex_positions=None,
) -> DowkerComplex:
    """Enumerate all simplices of dimension ``<= max_dim`` with their witness counts.

    Each P'-vertex contributes every subset (of size up to ``max_dim + 1``) of its
    neighbor set.  P'-vertices with more than ``max_witness_arity`` neighbors are
    skipped entirely; ``None`` disables the cap.
    """
    if max_dim < 0:
        raise ValueError("max_dim must be non-negative")
    counters = [Counter() for _ in range(max_dim + 1)]
    indptr, indices = graph.indptr, graph.indices
    sizes = np.diff(indptr)
    used = []
    excluded = 0
    for j in np.nonzero(sizes)[0].tolist():
        k = int(sizes[j])
        if max_witness_arity is not None and k > max_witness_arity:
            excluded += 1
            continue
        used.append(k)
        nb = indices[indptr[j] : indptr[j + 1]].tolist()
        counters[0].update((v,) for v in nb)
        for m in range(1, min(max_dim, k - 1) + 1):
            counters[m].update(itertools.combinations(nb, m + 1))
    return DowkerComplex(
        max_dim,
        [dict(c) for c in counters],
        n_vertices=graph.n_p,
        vertex_marks=None if vertex_marks is None else np.asarray(vertex_marks),
        vertex_positions=None if vertex_positions is None else np.asarray(vertex_positions),
        max_witness_arity=max_witness_arity,
        witness_sizes=np.array(used, dtype=np.int64),
        n_excluded_witnesses=excluded,
    )


def simplex_degree(graph: BipartiteGraph, vertex_tuple) -> int:
    """Number of P'-vertices adjacent to every vertex of ``vertex_tuple`` (no cap)."""
    verts = tuple(vertex_tuple)
    if not verts:
        raise ValueError("simplex must be non-empty")
    by_p = graph.by_p
    common = by_p.neighbors(verts[0])
    for v in verts[1:]:
        common = np.intersect1d(common, by_p.neighbors(v), assume_unique=True)
        if common.size == 0:
            return 0
    return int(common.size)


def center(complex_: DowkerComplex, simplex) -> float:
    """Position of the minimal-mark vertex; ties go to the smaller raw coordinate."""
    if complex_.vertex_marks is None or complex_.vertex_positions is None:
        raise ValueError("complex carries no vertex marks/positions")
    simplex = tuple(sorted(simplex))
    if complex_.witness_count(simplex) == 0:
        raise KeyError(f"{simplex} is not a stored simplex")
    marks = complex_.vertex_marks
    pos = complex_.vertex_positions
    best = min(simplex, key=lambda v: (marks[v], pos[v]))
    return float(pos[best])


def simplex_count(complex_: DowkerComplex, m: int) -> int:
    if m > complex_.max_dim:
        raise ValueError(f"complex enumerated only up to dimension {complex_.max_dim}")
    return len(complex_.simplices[m])


@dataclass
class DegreeHistogram:
    kind: str
    counts: dict[int, int]

    @classmethod
    def from_values(cls, kind: str, values) -> "DegreeHistogram":
        vals = np.asarray(values, dtype=np.int64)
        vals = vals[vals > 0]
        uniq, freq = np.unique(vals, return_counts=True)
        return cls(kind, dict(zip(uniq.tolist(), freq.tolist())))

    def values(self) -> np.ndarray:
        """Expand back to one value per member of the population."""
        if not self.counts:
            return np.empty(0, np.int64)
        v = np.array(list(self.counts.keys()))
        f = np.array(list(self.counts.values()))
        return np.repeat(v, f)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write("value,count\n")
            for v in sorted(self.counts):
                fh.write(f"{v},{self.counts[v]}\n")


def degree_values(obj, kind: str) -> np.ndarray:
    """Raw positive degree values of the requested kind.

    ``Delta0``/``Delta1`` are witness counts of vertices/edges, ``Delta0_prime`` the
    neighbor counts of P'-vertices, ``coface0`` the number of edges at each vertex
    and ``coface1`` the number of triangles at each edge.  A bipartite graph is
    accepted for ``Delta0`` and ``Delta0_prime``.
    """
    if kind not in DEGREE_KINDS:
        raise ValueError(f"unknown degree kind {kind!r}; choose from {DEGREE_KINDS}")
    if isinstance(obj, BipartiteGraph):
        if kind == "Delta0":
            vals = obj.p_degrees()
        elif kind == "Delta0_prime":
            vals = obj.p_prime_degrees()
        else:
            raise ValueError(f"{kind} needs a DowkerComplex")
        return vals[vals > 0]
    cx: DowkerComplex = obj
    if kind == "Delta0":
        return np.fromiter(cx.simplices[0].values(), dtype=np.int64, count=len(cx.simplices[0]))
    if kind == "Delta0_prime":
        return cx.witness_sizes.copy()
    need = {"Delta1": 1, "coface0": 1, "coface1": 2}[kind]
    if cx.max_dim < need:
        raise ValueError(f"{kind} needs the complex enumerated to dimension {need}")
    if kind == "Delta1":
        return np.fromiter(cx.simplices[1].values(), dtype=np.int64, count=len(cx.simplices[1]))
    if kind == "coface0":
        c = Counter()
        for a, b in cx.simplices[1]:
            c[a] += 1
            c[b] += 1
        return np.array([c[v] for (v,) in cx.simplices[0] if c[v] > 0], dtype=np.int64)
    c = Counter()
    for a, b, d in cx.simplices[2]:
        c[(a, b)] += 1
        c[(a, d)] += 1
        c[(b, d)] += 1
    return np.array([c[e] for e in cx.simplices[1] if c[e] > 0], dtype=np.int64)


def degree_histogram(obj, kind: str) -> DegreeHistogram:
    return DegreeHistogram.from_values(kind, degree_values(obj, kind))


def connected_components(obj, max_witness_arity: int | None = None) -> tuple[int, int]:
    """``(component_count, largest_size)`` of the 1-skeleton over non-isolated P-vertices."""
    if isinstance(obj, BipartiteGraph):
        uf = UnionFind(obj.n_p)
        present = np.zeros(obj.n_p, dtype=bool)
        sizes = obj.p_prime_degrees()
        for j in np.nonzero(sizes)[0].tolist():
            if max_witness_arity is not None and sizes[j] > max_witness_arity:
                continue
            nb = obj.neighbors(j).tolist()
            present[nb] = True
            first = nb[0]
            for v in nb[1:]:
                uf.union(first, v)
        verts = np.nonzero(present)[0].tolist()
    else:
        cx: DowkerComplex = obj
        verts = [v for (v,) in cx.simplices[0]]
        uf = UnionFind(max(verts) + 1 if verts else 0)
        if cx.max_dim >= 1:
            for a, b in cx.simplices[1]:
                uf.union(a, b)
    if not verts:
        return 0, 0
    roots = Counter(uf.find(v) for v in verts)
    return len(roots), max(roots.values())
