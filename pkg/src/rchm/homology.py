"""Betti numbers and witness-count persistence of Dowker complexes over GF(2)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bipartite import BipartiteGraph
from .dowker import DowkerComplex, connected_components, enumerate_simplices


@dataclass
class BoundaryMatrix:
    """Sparse boundary map from ``dim``-simplices to ``(dim - 1)``-simplices.

    ``columns[j]`` lists the row indices of the faces of ``col_simplices[j]``.
    """

    dim: int
    columns: list[list[int]]
    row_simplices: list[tuple]
    col_simplices: list[tuple]

    @property
    def shape(self):
        return len(self.row_simplices), len(self.col_simplices)

    def to_dense(self):
        mat = np.zeros(self.shape, dtype=np.uint8)
        for j, col in enumerate(self.columns):
            mat[col, j] = 1
        return mat


def _faces(simplex):
    return [simplex[:i] + simplex[i + 1 :] for i in range(len(simplex))]


def boundary_matrix(complex_: DowkerComplex, dim: int) -> BoundaryMatrix:
    if dim < 1 or dim > complex_.max_dim:
        raise ValueError(f"boundary of dimension {dim} unavailable (max_dim={complex_.max_dim})")
    rows = list(complex_.simplices[dim - 1])
    cols = list(complex_.simplices[dim])
    index = {s: i for i, s in enumerate(rows)}
    columns = [sorted(index[f] for f in _faces(s)) for s in cols]
    return BoundaryMatrix(dim, columns, rows, cols)


def reduce_columns(columns, skip=()):
    """Standard left-to-right column reduction over GF(2).

    Returns ``{low_row: column_index}`` for the nonzero reduced columns.  Columns
    whose index is in ``skip`` are treated as already zero (clearing).
    """
    pivots: dict[int, int] = {}
    reduced: dict[int, set] = {}
    for j, col in enumerate(columns):
        if j in skip or not col:
            continue
        cur = set(col)
        low = max(cur)
        while low in pivots:
            cur ^= reduced[pivots[low]]
            if not cur:
                break
            low = max(cur)
        if cur:
            pivots[low] = j
            reduced[j] = cur
    return pivots


def rank_gf2(matrix: BoundaryMatrix, skip=()) -> int:
    return len(reduce_columns(matrix.columns, skip))


def boundary_ranks(complex_: DowkerComplex, top: int) -> dict[int, int]:
    """Ranks of the boundary maps of dimension ``2..top``, highest first with clearing.

    A row that is the pivot of a reduced ``∂_{d+1}`` column indexes a
    ``d``-simplex whose own ``∂_d`` column is known to reduce to zero.
    """
    ranks: dict[int, int] = {}
    cleared: set[int] = set()
    for d in range(top, 1, -1):
        bm = boundary_matrix(complex_, d)
        pivots = reduce_columns(bm.columns, skip=cleared)
        ranks[d] = len(pivots)
        cleared = set(pivots)
    return ranks


def betti0_union_find(complex_: DowkerComplex) -> int:
    return connected_components(complex_)[0]


def betti_numbers(complex_: DowkerComplex, max_dim: int = 1) -> list[int]:
    """Betti numbers ``b_0..b_max_dim``; needs simplices up to ``max_dim + 1``.

    ``b_m = #simplices_m - rank ∂_m - rank ∂_{m+1}``.  The rank of ``∂_1`` comes from
    the union-find component count.
    """
    if complex_.max_dim < max_dim + 1:
        raise ValueError(
            f"complex enumerated to dimension {complex_.max_dim}; "
            f"Betti numbers up to {max_dim} need dimension {max_dim + 1}"
        )
    n = [len(complex_.simplices[m]) for m in range(max_dim + 2)]
    b0 = betti0_union_find(complex_)
    ranks = {0: 0, 1: n[0] - b0}
    ranks.update(boundary_ranks(complex_, max_dim + 1))
    return [n[m] - ranks[m] - ranks[m + 1] for m in range(max_dim + 1)]


def betti_numbers_by_rank(complex_: DowkerComplex, max_dim: int = 1) -> list[int]:
    """Same as :func:`betti_numbers` but with every rank (including ``∂_1``) by reduction."""
    if complex_.max_dim < max_dim + 1:
        raise ValueError("complex too shallow for the requested Betti numbers")
    n = [len(complex_.simplices[m]) for m in range(max_dim + 2)]
    ranks = {0: 0}
    for d in range(1, max_dim + 2):
        ranks[d] = rank_gf2(boundary_matrix(complex_, d))
    return [n[m] - ranks[m] - ranks[m + 1] for m in range(max_dim + 1)]


@dataclass(frozen=True)
class PersistencePair:
    dimension: int
    birth: float
    death: float


@dataclass
class Filtration:
    """Simplices in entering order with their filtration values (witness counts).

    Entering order is decreasing witness count, then increasing dimension, then
    vertex tuple, so every prefix is a subcomplex.
    """

    simplices: list[tuple]
    values: list[int]
    max_dim: int

    def __len__(self):
        return len(self.simplices)


def filtered_complex(obj, max_dim: int = 1, max_witness_arity=20) -> Filtration:
    """Witness-count filtration of a complex (or of a bipartite graph, enumerated here).

    Simplices up to ``max_dim + 1`` are included so ``max_dim`` classes can die.
    """
    if isinstance(obj, BipartiteGraph):
        obj = enumerate_simplices(obj, max_dim + 1, max_witness_arity)
    top = min(obj.max_dim, max_dim + 1)
    entries = [
        (-c, m, s) for m in range(top + 1) for s, c in obj.simplices[m].items()
    ]
    entries.sort()
    return Filtration([e[2] for e in entries], [-e[0] for e in entries], max_dim)


def persistence_diagram(filt: Filtration, max_dim: int | None = None) -> list[PersistencePair]:
    """Persistence pairs in witness-count units.

    ``birth`` is the count at which a class appears, ``death`` the (lower) count at
    which it is filled in, so ``death <= birth``.  Classes alive at the end of the
    filtration get ``death = 0``.  Zero-length pairs are kept.
    """
    max_dim = filt.max_dim if max_dim is None else max_dim
    index = {s: i for i, s in enumerate(filt.simplices)}
    dims = [len(s) - 1 for s in filt.simplices]
    top = max(dims) if dims else 0
    by_dim: dict[int, list[int]] = {}
    for i, d in enumerate(dims):
        by_dim.setdefault(d, []).append(i)

    paired_birth: dict[int, int] = {}  # creator index -> destroyer index
    negative: set[int] = set()
    cleared: set[int] = set()
    for d in range(top, 0, -1):
        cols = by_dim.get(d, [])
        columns = [[index[f] for f in _faces(filt.simplices[i])] for i in cols]
        skip = {k for k, i in enumerate(cols) if i in cleared}
        pivots = reduce_columns(columns, skip)
        next_cleared = set()
        for low, k in pivots.items():
            paired_birth[low] = cols[k]
            negative.add(cols[k])
            next_cleared.add(low)
        cleared = next_cleared

    pairs = []
    for i, s in enumerate(filt.simplices):
        d = dims[i]
        if d > max_dim or i in negative:
            continue
        birth = filt.values[i]
        if i in paired_birth:
            pairs.append(PersistencePair(d, birth, filt.values[paired_birth[i]]))
        else:
            pairs.append(PersistencePair(d, birth, 0))
    pairs.sort(key=lambda p: (p.dimension, -p.birth, -p.death))
    return pairs


def essential_counts(pairs, max_dim: int) -> list[int]:
    out = [0] * (max_dim + 1)
    for p in pairs:
        if p.death == 0 and p.dimension <= max_dim:
            out[p.dimension] += 1
    return out


def write_diagram(pairs, path):
    """``birth,death,dimension`` lines."""
    with open(path, "w") as fh:
        fh.write("birth,death,dimension\n")
        for p in pairs:
            fh.write(f"{_num(p.birth)},{_num(p.death)},{p.dimension}\n")


def read_diagram(path) -> list[PersistencePair]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "birth,death,dimension":
        raise ValueError(f"{path}: missing diagram header")
    out = []
    for line in lines[1:]:
        if line.strip():
            b, d, m = line.split(",")
            out.append(PersistencePair(int(m), float(b), float(d)))
    return out


def _num(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return str(int(v)) if float(v).is_integer() else repr(float(v))
