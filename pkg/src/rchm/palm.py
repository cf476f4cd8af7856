"""Direct simulation of the environment of a typical P-vertex on the real line.

The root sits at position 0 with mark ``u``.  Its witnesses are the P'-points of
``B((0, u)) = {(z, w): |z| <= beta u^-gamma w^-gamma'}`` and its coauthors are the
P-points of the union of the witnesses' neighborhoods.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .model import MarkedPoint, ModelParams, singleton_neighborhood_measure
from .sampler import NetworkInstance, PointSet, RngStream, uniform_marks

SELECTION_MODES = ("uniform", "pooled")


def _generator(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def _line(params: ModelParams) -> ModelParams:
    return params if not params.finite else ModelParams(
        params.gamma, params.gamma_prime, params.beta, params.lam, params.lam_prime, math.inf
    )


def _witnesses(u, n, params, gen):
    # marks with density proportional to v^-gamma' on (0, 1], then uniform positions
    v = uniform_marks(gen, n) ** (1.0 / (1.0 - params.gamma_prime))
    half = params.beta * u ** -params.gamma * v ** -params.gamma_prime
    y = (2.0 * gen.random(n) - 1.0) * half
    return y, v


def sample_witness_in_root_neighborhood(u: float, params: ModelParams, rng) -> MarkedPoint:
    """One point drawn uniformly (Lebesgue) from the neighborhood of the root ``(0, u)``."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"root mark must lie in (0, 1], got {u}")
    y, v = _witnesses(u, 1, params, _generator(rng))
    return MarkedPoint(float(y[0]), float(v[0]))


def coverage(x, w, y, v, params: ModelParams) -> np.ndarray:
    """Number of witness neighborhoods ``N(y_i, v_i)`` containing each P-point ``(x, w)``."""
    x = np.asarray(x, dtype=float)[:, None]
    w = np.asarray(w, dtype=float)[:, None]
    reach = params.beta * w ** -params.gamma * np.asarray(v, dtype=float)[None, :] ** -params.gamma_prime
    return np.count_nonzero(np.abs(x - np.asarray(y, dtype=float)[None, :]) <= reach, axis=1)


def sample_union(y, v, params: ModelParams, gen: np.random.Generator):
    """Poisson(lam) points on the union of the neighborhoods ``N(y_i, v_i)``.

    Each neighborhood is sampled on its own and a point is then kept with
    probability one over the number of neighborhoods covering it, so overlaps
    carry intensity ``lam`` rather than a multiple of it.
    """
    g, gp, beta, lam = params.gamma, params.gamma_prime, params.beta, params.lam
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    if v.size == 0 or lam == 0.0:
        return np.empty(0), np.empty(0), np.empty(0, dtype=np.int64)
    sizes = 2.0 * beta * v ** -gp / (1.0 - g)
    counts = gen.poisson(lam * sizes)
    total = int(counts.sum())
    owner = np.repeat(np.arange(v.size), counts)
    w = uniform_marks(gen, total) ** (1.0 / (1.0 - g))
    half = beta * w ** -g * v[owner] ** -gp
    x = y[owner] + (2.0 * gen.random(total) - 1.0) * half
    cover = coverage(x, w, y, v, params)
    keep = gen.random(total) * cover < 1.0
    return x[keep], w[keep], cover[keep]


@dataclass
class PalmSample:
    """Environment of the root ``(0, u)``.

    ``simplices_at_root`` maps a tuple of coauthor indices (root omitted) to its
    witness count; only coauthors whose mark exceeds the root's take part.
    """

    root: MarkedPoint
    witnesses: PointSet
    coauthors: PointSet
    coauthor_coverage: np.ndarray
    simplices_at_root: dict[tuple, int] = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.witnesses)

    def simplex_degrees(self, m: int) -> np.ndarray:
        if m == 0:
            return np.array([self.degree], dtype=np.int64)
        return np.array(
            [c for s, c in self.simplices_at_root.items() if len(s) == m], dtype=np.int64
        )

    def to_instance(self, params: ModelParams) -> NetworkInstance:
        """Root plus coauthors as P, witnesses as P', on the line."""
        p = PointSet(
            np.concatenate([[self.root.position], self.coauthors.positions]),
            np.concatenate([[self.root.mark], self.coauthors.marks]),
        )
        return NetworkInstance(_line(params), p, self.witnesses)


def _root_higher(x, w, u):
    # the root is the minimal-mark vertex; equal marks go to the left-most point
    return (w > u) | ((w == u) & (x > 0.0))


def _root_simplices(m, x, w, y, v, u, params):
    out: dict[tuple, int] = {}
    if m < 1 or x.size == 0:
        return out
    eligible = np.nonzero(_root_higher(x, w, u))[0]
    if eligible.size == 0:
        return out
    xs, ws = x[eligible, None], w[eligible, None]
    reach = params.beta * ws ** -params.gamma * v[None, :] ** -params.gamma_prime
    inside = np.abs(xs - y[None, :]) <= reach
    if m == 1:
        deg = inside.sum(axis=1)
        return {(int(i),): int(d) for i, d in zip(eligible, deg) if d > 0}
    counter: Counter = Counter()
    for j in range(v.size):
        members = eligible[inside[:, j]].tolist()
        for k in range(1, min(m, len(members)) + 1):
            counter.update(combinations(members, k))
    return dict(counter)


def sample_palm_environment(
    m: int, params: ModelParams, rng, u: float | None = None
) -> PalmSample:
    """Root, witnesses, coauthors and the simplices at the root up to dimension ``m``.

    The root mark is Uniform(0, 1] unless ``u`` is given.  Coauthors are only
    generated when ``m >= 1``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if (m + 1) * params.gamma_prime >= 1.0:
        raise ValueError(f"need gamma_prime < 1/(m+1), got {params.gamma_prime} with m={m}")
    gen = _generator(rng)
    line = _line(params)
    if u is None:
        u = float(uniform_marks(gen, 1)[0])
    elif not 0.0 < u <= 1.0:
        raise ValueError(f"root mark must lie in (0, 1], got {u}")
    n = int(gen.poisson(params.lam_prime * singleton_neighborhood_measure(u, line)))
    y, v = _witnesses(u, n, params, gen)
    if m >= 1:
        x, w, cover = sample_union(y, v, params, gen)
    else:
        x, w, cover = np.empty(0), np.empty(0), np.empty(0, dtype=np.int64)
    return PalmSample(
        MarkedPoint(0.0, u),
        PointSet(y, v),
        PointSet(x, w),
        cover,
        _root_simplices(m, x, w, y, v, u, params),
    )


def typical_degree_samples(
    m: int, n_samples: int, params: ModelParams, rng, selection: str = "uniform"
) -> np.ndarray:
    """I.i.d. draws of the degree of a typical ``m``-simplex, ``m`` in {0, 1}.

    For ``m = 0`` this is the witness count of the root.  For ``m = 1`` each draw
    comes from a fresh environment: ``selection="uniform"`` picks one root edge
    uniformly (environments without one are redrawn), ``"pooled"`` keeps every
    root edge of each environment, which weights environments by their number of
    root edges.
    """
    if m not in (0, 1):
        raise ValueError("only m = 0 and m = 1 are supported")
    if selection not in SELECTION_MODES:
        raise ValueError(f"selection must be one of {SELECTION_MODES}")
    if n_samples < 0:
        raise ValueError("n_samples must be non-negative")
    if (m + 1) * params.gamma_prime >= 1.0:
        raise ValueError(f"need gamma_prime < 1/(m+1), got {params.gamma_prime} with m={m}")
    gen = _generator(rng)
    if m == 0:
        u = uniform_marks(gen, n_samples)
        mean = params.lam_prime * 2.0 * params.beta * u ** -params.gamma / (1.0 - params.gamma_prime)
        return gen.poisson(mean).astype(np.int64)
    out: list[int] = []
    while len(out) < n_samples:
        env = sample_palm_environment(1, params, gen)
        deg = env.simplex_degrees(1)
        if deg.size == 0:
            continue
        if selection == "uniform":
            out.append(int(deg[gen.integers(deg.size)]))
        else:
            out.extend(deg.tolist())
    return np.array(out[:n_samples], dtype=np.int64)


def prime_side_params(params: ModelParams) -> ModelParams:
    """Parameters under which Palm sampling describes a typical P'-vertex instead."""
    return params.swapped()


def write_degree_samples(samples, path):
    """One integer per line."""
    Path(path).write_text("".join(f"{int(s)}\n" for s in samples))


def read_degree_samples(path) -> np.ndarray:
    text = Path(path).read_text().split()
    return np.array([int(t) for t in text], dtype=np.int64)
