"""Bipartite incidence graph between P-points (authors) and P'-points (documents)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .model import score, torus_distance
from .sampler import NetworkInstance

_CHUNK = 4_000_000  # max candidate pairs evaluated in one vectorized step
_SAFETY = 1e-9  # relative slack on the rectangle short-circuits


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """P'-major adjacency in CSR form.

    ``indices[indptr[j]:indptr[j + 1]]`` are the sorted P-indices adjacent to
    P'-vertex ``j``.
    """

    n_p: int
    n_p_prime: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_edges(cls, p_idx, pp_idx, n_p: int, n_p_prime: int) -> "BipartiteGraph":
        p_idx = np.asarray(p_idx, dtype=np.int64)
        pp_idx = np.asarray(pp_idx, dtype=np.int64)
        if p_idx.size:
            if p_idx.min() < 0 or p_idx.max() >= n_p or pp_idx.min() < 0 or pp_idx.max() >= n_p_prime:
                raise ValueError("edge index out of range")
            order = np.lexsort((p_idx, pp_idx))
            p_idx, pp_idx = p_idx[order], pp_idx[order]
            keep = np.ones(p_idx.size, dtype=bool)
            keep[1:] = (p_idx[1:] != p_idx[:-1]) | (pp_idx[1:] != pp_idx[:-1])
            p_idx, pp_idx = p_idx[keep], pp_idx[keep]
        counts = np.bincount(pp_idx, minlength=n_p_prime)
        indptr = np.zeros(n_p_prime + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(int(n_p), int(n_p_prime), indptr, p_idx)

    @property
    def n_edges(self) -> int:
        return int(self.indices.size)

    def neighbors(self, j: int) -> np.ndarray:
        return self.indices[self.indptr[j] : self.indptr[j + 1]]

    @property
    def witnesses(self) -> list[np.ndarray]:
        return [self.neighbors(j) for j in range(self.n_p_prime)]

    def p_prime_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def p_degrees(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n_p)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """``(p_index, p_prime_index)`` arrays, P'-major order."""
        pp = np.repeat(np.arange(self.n_p_prime), self.p_prime_degrees())
        return self.indices.copy(), pp

    @cached_property
    def by_p(self) -> "BipartiteGraph":
        """P-major view (the transpose), built once."""
        return self.transpose()

    def transpose(self) -> "BipartiteGraph":
        """Swap the sides: P' becomes the indexed-by side."""
        p, pp = self.edges()
        return BipartiteGraph.from_edges(pp, p, self.n_p_prime, self.n_p)

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self.n_p == other.n_p
            and self.n_p_prime == other.n_p_prime
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def edge_set(self) -> set[tuple[int, int]]:
        p, pp = self.edges()
        return set(zip(p.tolist(), pp.tolist()))

    def write_edge_list(self, path):
        """Canonical ``p_index,p_prime_index`` file sorted lexicographically."""
        p, pp = self.edges()
        order = np.lexsort((pp, p))
        with open(path, "w") as fh:
            fh.write("p_index,p_prime_index\n")
            for a, b in zip(p[order].tolist(), pp[order].tolist()):
                fh.write(f"{a},{b}\n")

    @classmethod
    def read_edge_list(cls, path, n_p: int | None = None, n_p_prime: int | None = None):
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0].strip() != "p_index,p_prime_index":
            raise ValueError(f"{path}: missing 'p_index,p_prime_index' header")
        rows = [ln.split(",") for ln in lines[1:] if ln.strip()]
        p = np.array([int(r[0]) for r in rows], dtype=np.int64)
        pp = np.array([int(r[1]) for r in rows], dtype=np.int64)
        if n_p is None:
            n_p = int(p.max()) + 1 if p.size else 0
        if n_p_prime is None:
            n_p_prime = int(pp.max()) + 1 if pp.size else 0
        return cls.from_edges(p, pp, n_p, n_p_prime)


def _match_all(px, pu, zx, zw, params, p_ids=None, pp_ids=None):
    """Pointwise test of every (P, P') combination; returns matching index pairs."""
    n, k = len(px), len(zx)
    if n == 0 or k == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    p_ids = np.arange(n) if p_ids is None else p_ids
    pp_ids = np.arange(k) if pp_ids is None else pp_ids
    rows = max(1, _CHUNK // n)
    out_p, out_pp = [], []
    pu_g = np.power(pu, params.gamma)
    for start in range(0, k, rows):
        sl = slice(start, start + rows)
        d = torus_distance(zx[sl, None], px[None, :], params.torus_length)
        s = d * pu_g[None, :] * np.power(zw[sl], params.gamma_prime)[:, None]
        jj, ii = np.nonzero(s <= params.beta)
        out_p.append(p_ids[ii])
        out_pp.append(pp_ids[jj + start])
    return np.concatenate(out_p), np.concatenate(out_pp)


def build_naive(instance: NetworkInstance) -> BipartiteGraph:
    """Reference builder: test every P/P' pair."""
    prm = instance.params
    p, pp = instance.p, instance.p_prime
    pi, ppi = _match_all(p.positions, p.marks, pp.positions, pp.marks, prm)
    return BipartiteGraph.from_edges(pi, ppi, len(p), len(pp))


@dataclass
class RectanglePartition:
    """Mark strata for one side, each cut into equal-width position cells.

    Stratum ``k`` holds marks in ``(lows[k], highs[k]]``; marks at or below
    ``lows[-1]`` form the giant stratum and are handled pointwise.
    """

    lows: np.ndarray
    highs: np.ndarray
    cell_widths: np.ndarray
    n_cells: np.ndarray
    # per stratum: point indices sorted by cell, and CSR offsets into them
    order: list[np.ndarray] = field(default_factory=list)
    starts: list[np.ndarray] = field(default_factory=list)
    giant: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    @property
    def layers(self):
        return list(zip(self.lows.tolist(), self.highs.tolist(), self.cell_widths.tolist()))

    def cells(self, k: int) -> dict[int, np.ndarray]:
        st, od = self.starts[k], self.order[k]
        return {
            c: od[st[c] : st[c + 1]] for c in range(self.n_cells[k]) if st[c + 1] > st[c]
        }


def partition(positions, marks, exponent, base_width, length, ratio=0.5, max_strata=64):
    """Stratify marks on a geometric ladder ``1, ratio, ratio^2, ...``.

    Cell width in stratum ``k`` is ``base_width * low_k**-exponent`` clipped to the
    torus; the ladder stops once a stratum's cells would cover the whole torus.
    """
    highs, lows, widths, ncells = [], [], [], []
    hi = 1.0
    while len(highs) < max_strata:
        lo = hi * ratio
        w = base_width * lo**-exponent
        if w >= length:
            break
        n = max(1, int(length // w))
        highs.append(hi)
        lows.append(lo)
        widths.append(length / n)
        ncells.append(n)
        hi = lo
    part = RectanglePartition(
        np.array(lows), np.array(highs), np.array(widths), np.array(ncells, dtype=np.int64)
    )
    floor = lows[-1] if lows else 1.0
    part.giant = np.nonzero(marks <= floor)[0]
    if not lows:
        return part
    # stratum index: k such that lows[k] < mark <= highs[k]
    asc = np.array(lows[::-1])
    k_of = len(lows) - np.searchsorted(asc, marks, side="left")
    for k in range(len(lows)):
        idx = np.nonzero(k_of == k)[0]
        cell = np.minimum((positions[idx] // widths[k]).astype(np.int64), ncells[k] - 1)
        o = np.argsort(cell, kind="stable")
        counts = np.bincount(cell, minlength=ncells[k])
        st = np.zeros(ncells[k] + 1, dtype=np.int64)
        np.cumsum(counts, out=st[1:])
        part.order.append(idx[o])
        part.starts.append(st)
    return part


def _arc_distance_bounds(lo, hi, length):
    """Min and max torus distance over the difference arc ``[lo, hi]``."""
    f_lo = torus_distance(lo, 0.0, length)
    f_hi = torus_distance(hi, 0.0, length)
    # arc contains a multiple of L (zero distance) or an odd multiple of L/2
    has_zero = np.floor(hi / length) > np.floor(lo / length) - (np.mod(lo, length) == 0)
    shifted_lo, shifted_hi = lo - length / 2, hi - length / 2
    has_half = np.floor(shifted_hi / length) > np.floor(shifted_lo / length) - (
        np.mod(shifted_lo, length) == 0
    )
    dmin = np.where(has_zero, 0.0, np.minimum(f_lo, f_hi))
    dmax = np.where(has_half, length / 2, np.maximum(f_lo, f_hi))
    return dmin, dmax


def _expand_pairs(a_start, a_count, b_start, b_count):
    """Cartesian products of index blocks, one block pair per entry."""
    sizes = a_count * b_count
    total = int(sizes.sum())
    if total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    blk = np.repeat(np.arange(sizes.size), sizes)
    first = np.cumsum(sizes) - sizes
    off = np.arange(total) - first[blk]
    bc = b_count[blk]
    return a_start[blk] + off // bc, b_start[blk] + off % bc


@dataclass
class BuildStats:
    cell_pairs_accepted: int = 0
    cell_pairs_rejected: int = 0
    cell_pairs_checked: int = 0
    pointwise_checks: int = 0


def build_stratified(
    instance: NetworkInstance, ratio: float = 0.5, width_factor: float = 0.5, stats: BuildStats | None = None
) -> BipartiteGraph:
    """Rectangle-partition builder; produces exactly the same edges as :func:`build_naive`.

    For a pair of cells the pessimal corner (largest distance, largest marks)
    connecting accepts every point pair, the optimal corner (smallest distance,
    smallest marks) failing rejects every point pair, anything else is checked
    point by point.
    """
    prm = instance.params
    if not prm.finite:
        raise ValueError("build_stratified needs a finite torus")
    stats = stats if stats is not None else BuildStats()
    L, beta, g, gp = prm.torus_length, prm.beta, prm.gamma, prm.gamma_prime
    P, Q = instance.p, instance.p_prime
    base = width_factor * beta
    part_p = partition(P.positions, P.marks, g, base, L, ratio)
    part_q = partition(Q.positions, Q.marks, gp, base, L, ratio)

    out_p, out_q = [], []

    # giant P-points against every P'-point, giant P'-points against the remaining P
    gp_ids = part_p.giant
    if gp_ids.size and len(Q):
        a, b = _match_all(P.positions[gp_ids], P.marks[gp_ids], Q.positions, Q.marks, prm, p_ids=gp_ids)
        stats.pointwise_checks += gp_ids.size * len(Q)
        out_p.append(a)
        out_q.append(b)
    gq_ids = part_q.giant
    if gq_ids.size:
        rest = np.setdiff1d(np.arange(len(P)), gp_ids, assume_unique=True)
        if rest.size:
            a, b = _match_all(
                P.positions[rest], P.marks[rest], Q.positions[gq_ids], Q.marks[gq_ids], prm,
                p_ids=rest, pp_ids=gq_ids,
            )
            stats.pointwise_checks += rest.size * gq_ids.size
            out_p.append(a)
            out_q.append(b)

    for t in range(len(part_q.lows)):
        st_t, od_t = part_q.starts[t], part_q.order[t]
        cnt_t = np.diff(st_t)
        J = np.nonzero(cnt_t)[0]
        if J.size == 0:
            continue
        ct = part_q.cell_widths[t]
        lo_t, hi_t = part_q.lows[t], part_q.highs[t]
        for s in range(len(part_p.lows)):
            st_s, od_s = part_p.starts[s], part_p.order[s]
            cnt_s = np.diff(st_s)
            n_s = part_p.n_cells[s]
            if not cnt_s.any():
                continue
            cs = part_p.cell_widths[s]
            r_opt = beta * part_p.lows[s] ** -g * lo_t**-gp
            r_pes = beta * part_p.highs[s] ** -g * hi_t**-gp
            first = np.floor((J * ct - r_opt) / cs).astype(np.int64) - 1
            last = np.floor(((J + 1) * ct + r_opt) / cs).astype(np.int64) + 1
            span = np.minimum(last - first + 1, n_s)
            first = np.where(last - first + 1 >= n_s, 0, first)
            jj = np.repeat(J, span)
            ii = np.repeat(first, span) + (np.arange(span.sum()) - np.repeat(np.cumsum(span) - span, span))
            ii = np.mod(ii, n_s)
            nz = cnt_s[ii] > 0
            ii, jj = ii[nz], jj[nz]
            if ii.size == 0:
                continue
            pad = 1e-12 * L
            # difference arc x - z for x in cell i and z in cell j
            dlo = ii * cs - (jj + 1) * ct - pad
            dhi = (ii + 1) * cs - jj * ct + pad
            dmin, dmax = _arc_distance_bounds(dlo, dhi, L)
            hi_fac = part_p.highs[s] ** g * hi_t**gp
            lo_fac = part_p.lows[s] ** g * lo_t**gp
            accept = dmax * hi_fac <= beta * (1 - _SAFETY)
            reject = dmin * lo_fac > beta * (1 + _SAFETY)
            check = ~(accept | reject)
            stats.cell_pairs_accepted += int(accept.sum())
            stats.cell_pairs_rejected += int(reject.sum())
            stats.cell_pairs_checked += int(check.sum())
            if accept.any():
                ia, ja = ii[accept], jj[accept]
                a, b = _expand_pairs(st_s[ia], cnt_s[ia], st_t[ja], cnt_t[ja])
                out_p.append(od_s[a])
                out_q.append(od_t[b])
            if check.any():
                ic, jc = ii[check], jj[check]
                cum = np.cumsum(cnt_s[ic] * cnt_t[jc])
                lo_b = 0
                # chunk block pairs so the expanded candidates stay bounded
                while lo_b < ic.size:
                    done = cum[lo_b - 1] if lo_b else 0
                    hi_b = max(int(np.searchsorted(cum, done + _CHUNK, side="right")), lo_b + 1)
                    sel = slice(lo_b, hi_b)
                    a, b = _expand_pairs(st_s[ic[sel]], cnt_s[ic[sel]], st_t[jc[sel]], cnt_t[jc[sel]])
                    pa, qb = od_s[a], od_t[b]
                    stats.pointwise_checks += pa.size
                    ok = score(P.positions[pa], P.marks[pa], Q.positions[qb], Q.marks[qb], prm) <= beta
                    out_p.append(pa[ok])
                    out_q.append(qb[ok])
                    lo_b = hi_b

    if out_p:
        all_p, all_q = np.concatenate(out_p), np.concatenate(out_q)
    else:
        all_p = all_q = np.empty(0, np.int64)
    return BipartiteGraph.from_edges(all_p, all_q, len(P), len(Q))


def build_graph(instance: NetworkInstance, method: str = "stratified") -> BipartiteGraph:
    if method == "naive":
        return build_naive(instance)
    if method == "stratified":
        return build_stratified(instance)
    raise ValueError(f"unknown build method {method!r}")
