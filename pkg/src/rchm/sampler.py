"""Seeded generation of the two marked Poisson processes."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import MarkedPoint, ModelParams


@dataclass(frozen=True)
class RngStream:
    """One independent random stream per ``(seed, stream_id)`` pair.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    the generator for replication ``k`` does not depend on how many other
    replications run or in which order.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, k: int) -> "RngStream":
        # deterministic sub-stream; the id space is split so children never alias parents
        return RngStream(self.seed, (self.stream_id + 1) * 1_000_003 + k)


def uniform_marks(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform(0, 1] marks, drawn as ``1 - U`` with ``U`` on [0, 1) so 0 never occurs."""
    return 1.0 - rng.random(n)


@dataclass(frozen=True)
class PointSet:
    """Columnar marked point set (positions and marks as float arrays)."""

    positions: np.ndarray
    marks: np.ndarray

    def __len__(self):
        return len(self.positions)

    def points(self) -> list[MarkedPoint]:
        return [MarkedPoint(float(x), float(u)) for x, u in zip(self.positions, self.marks)]

    @classmethod
    def empty(cls) -> "PointSet":
        return cls(np.empty(0), np.empty(0))


def sample_ppp(intensity: float, length: float, rng: np.random.Generator) -> PointSet:
    """Homogeneous marked Poisson process on ``[0, length)`` with uniform marks."""
    if intensity < 0:
        raise ValueError("intensity must be non-negative")
    if not (length > 0 and math.isfinite(length)):
        raise ValueError("length must be positive and finite")
    n = int(rng.poisson(intensity * length)) if intensity > 0 else 0
    positions = rng.random(n) * length
    marks = uniform_marks(rng, n)
    return PointSet(positions, marks)


@dataclass(frozen=True)
class NetworkInstance:
    params: ModelParams
    p: PointSet
    p_prime: PointSet

    @property
    def p_vertices(self) -> list[MarkedPoint]:
        return self.p.points()

    @property
    def p_prime_vertices(self) -> list[MarkedPoint]:
        return self.p_prime.points()

    def write(self, path, params_path=None):
        """Write ``side,position,mark`` rows; params JSON goes next to it."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            fh.write(format_instance(self))
        params_path = Path(params_path) if params_path else path.with_suffix(".params.json")
        params_path.write_text(self.params.to_json() + "\n")
        return path, params_path

    @classmethod
    def read(cls, path, params_path=None) -> "NetworkInstance":
        path = Path(path)
        params_path = Path(params_path) if params_path else path.with_suffix(".params.json")
        params = ModelParams.from_json(params_path.read_text())
        return parse_instance(path.read_text(), params)


def format_instance(instance: NetworkInstance) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["side", "position", "mark"])
    for side, ps in (("P", instance.p), ("Pprime", instance.p_prime)):
        for x, u in zip(ps.positions, ps.marks):
            w.writerow([side, repr(float(x)), repr(float(u))])
    return buf.getvalue()


def parse_instance(text: str, params: ModelParams) -> NetworkInstance:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header != ["side", "position", "mark"]:
        raise ValueError(f"bad instance header: {header}")
    cols = {"P": ([], []), "Pprime": ([], [])}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 3 or row[0] not in cols:
            raise ValueError(f"malformed instance row at line {lineno}: {row}")
        cols[row[0]][0].append(float(row[1]))
        cols[row[0]][1].append(float(row[2]))
    p = PointSet(np.array(cols["P"][0]), np.array(cols["P"][1]))
    pp = PointSet(np.array(cols["Pprime"][0]), np.array(cols["Pprime"][1]))
    return NetworkInstance(params, p, pp)


def sample_network(params: ModelParams, rng: RngStream | np.random.Generator) -> NetworkInstance:
    """Draw independent P and P' processes on the finite torus."""
    if not params.finite:
        raise ValueError("sample_network needs a finite torus_length")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    p = sample_ppp(params.lam, params.torus_length, gen)
    pp = sample_ppp(params.lam_prime, params.torus_length, gen)
    return NetworkInstance(params, p, pp)
