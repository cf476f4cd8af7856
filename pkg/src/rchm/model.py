"""Model parameters, the connection rule and closed-form expectations.

Points live on a one-dimensional torus of circumference ``torus_length`` (or on
the real line when it is ``inf``) and carry a mark in (0, 1].  A P-point
``(x, u)`` and a P'-point ``(z, w)`` connect when

    dist(x, z) * u**gamma * w**gamma_prime <= beta.

Everything below is a pure function of immutable inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy import integrate

from .special import upper_incomplete_gamma


@dataclass(frozen=True)
class ModelParams:
    gamma: float
    gamma_prime: float
    beta: float
    lam: float
    lam_prime: float
    torus_length: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0 and 0.0 < self.gamma_prime < 1.0):
            raise ValueError(
                f"gamma and gamma_prime must lie in (0, 1), got {self.gamma}, {self.gamma_prime}"
            )
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (self.lam >= 0.0 and self.lam_prime >= 0.0):
            raise ValueError("intensities must be non-negative")
        if not self.torus_length > 0.0:
            raise ValueError(f"torus_length must be positive, got {self.torus_length}")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.torus_length)

    def swapped(self) -> "ModelParams":
        """Exchange the roles of P and P' (gammas and intensities)."""
        return replace(
            self,
            gamma=self.gamma_prime,
            gamma_prime=self.gamma,
            lam=self.lam_prime,
            lam_prime=self.lam,
        )

    def with_beta(self, beta: float) -> "ModelParams":
        return replace(self, beta=beta)

    def to_dict(self) -> dict:
        d = asdict(self)
        out = {
            "gamma": d["gamma"],
            "gamma_prime": d["gamma_prime"],
            "beta": d["beta"],
            "lambda": d["lam"],
            "lambda_prime": d["lam_prime"],
            "torus_length": d["torus_length"] if self.finite else "inf",
        }
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        missing = {"gamma", "gamma_prime", "beta", "lambda", "lambda_prime"} - set(d)
        if missing:
            raise ValueError(f"missing parameter keys: {sorted(missing)}")
        length = d.get("torus_length", 1.0)
        if isinstance(length, str):
            if length.strip().lower() not in ("inf", "infinity"):
                raise ValueError(f"torus_length must be a number or 'inf', got {length!r}")
            length = math.inf
        return cls(
            gamma=float(d["gamma"]),
            gamma_prime=float(d["gamma_prime"]),
            beta=float(d["beta"]),
            lam=float(d["lambda"]),
            lam_prime=float(d["lambda_prime"]),
            torus_length=float(length),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ModelParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MarkedPoint:
    position: float
    mark: float

    def __post_init__(self):
        if not (0.0 < self.mark <= 1.0):
            raise ValueError(f"mark must lie in (0, 1], got {self.mark}")


def torus_distance(x, z, length=math.inf):
    """Periodic distance on a circle of circumference ``length``; plain ``|x - z|`` if infinite.

    Works elementwise on arrays.
    """
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(z, dtype=float))
    if math.isfinite(length):
        d = np.mod(d, length)
        d = np.minimum(d, length - d)
    return d if d.ndim else float(d)


def score(x, u, z, w, params: ModelParams):
    """Vectorized connection score for P-coordinates ``(x, u)`` and P'-coordinates ``(z, w)``."""
    d = torus_distance(x, z, params.torus_length)
    return d * np.power(u, params.gamma) * np.power(w, params.gamma_prime)


def connection_score(p: MarkedPoint, p_prime: MarkedPoint, params: ModelParams) -> float:
    return float(score(p.position, p.mark, p_prime.position, p_prime.mark, params))


def connects(p: MarkedPoint, p_prime: MarkedPoint, params: ModelParams) -> bool:
    return connection_score(p, p_prime, params) <= params.beta


def singleton_neighborhood_measure(u: float, params: ModelParams) -> float:
    """Lebesgue measure of the neighborhood of the P-point ``(0, u)``.

    On the line this is ``2 beta u^-gamma / (1 - gamma')``.  On a finite torus the
    position-interval width ``2 beta u^-gamma w^-gamma'`` cannot exceed the torus
    length, so the clipped width is integrated over ``w`` numerically.
    """
    if not u > 0.0:
        raise ValueError(f"mark must be positive, got {u}")
    g, gp, beta = params.gamma, params.gamma_prime, params.beta
    if not params.finite:
        return 2.0 * beta * u**-g / (1.0 - gp)
    length = params.torus_length
    scale = 2.0 * beta * u**-g
    # widths saturate at the torus length for w below w_star
    w_star = min(1.0, (scale / length) ** (1.0 / gp))
    clipped = length * w_star
    if w_star >= 1.0:
        return clipped
    tail, _ = integrate.quad(
        lambda w: scale * w**-gp, w_star, 1.0, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return clipped + tail


def simplex_neighborhood_integral(m: int, u: float, params: ModelParams) -> float:
    """Integral over ``m`` free P-points of the joint neighborhood measure with ``(0, u)``.

    Closed form ``u^-gamma (2 beta)^(m+1) / ((1 - (m+1) gamma') (1 - gamma)^m)``, finite
    only when ``gamma' < 1/(m+1)``.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if not u > 0.0:
        raise ValueError(f"mark must be positive, got {u}")
    g, gp, beta = params.gamma, params.gamma_prime, params.beta
    if (m + 1) * gp >= 1.0:
        raise ValueError(
            f"integral diverges: (m + 1) * gamma_prime = {(m + 1) * gp} >= 1"
        )
    return u**-g / (1.0 - (m + 1) * gp) * (2.0 * beta) ** (m + 1) / (1.0 - g) ** m


def expected_typical_degree(params: ModelParams) -> float:
    """Mean number of P'-neighbors of a typical P-point, ``2 beta lam' / ((1-gamma)(1-gamma'))``."""
    return (
        2.0
        * params.beta
        * params.lam_prime
        / ((1.0 - params.gamma) * (1.0 - params.gamma_prime))
    )


def beta_for_mean_degree(target: float, params: ModelParams) -> float:
    """Invert :func:`expected_typical_degree` for ``beta``."""
    if not target > 0.0:
        raise ValueError("target degree must be positive")
    if not params.lam_prime > 0.0:
        raise ValueError("lam_prime must be positive to tune beta")
    return target * (1.0 - params.gamma) * (1.0 - params.gamma_prime) / (2.0 * params.lam_prime)


def expected_edge_count(params: ModelParams) -> float:
    """Expected number of bipartite edges; per unit length when the torus is infinite."""
    density = (
        2.0
        * params.beta
        * params.lam
        * params.lam_prime
        / ((1.0 - params.gamma) * (1.0 - params.gamma_prime))
    )
    return density * params.torus_length if params.finite else density


def _nonisolated_fraction(gamma, gamma_other, beta, lam_other):
    # 1 - int_0^1 exp(-c u^-gamma) du with c = 2 beta lam_other / (1 - gamma_other)
    c = 2.0 * beta * lam_other / (1.0 - gamma_other)
    if c == 0.0:
        return 0.0
    inv = 1.0 / gamma
    # c^(1/gamma) Gamma(-1/gamma, c) / gamma, evaluated in logs to survive large c
    gval = upper_incomplete_gamma(-inv, c)
    if gval == 0.0:
        return 1.0
    return 1.0 - inv * math.exp(inv * math.log(c) + math.log(gval))


def expected_nonisolated_counts(params: ModelParams) -> tuple[float, float]:
    """Expected numbers of P- and P'-points with at least one neighbor.

    Uses the upper incomplete gamma closed form; scaled by the torus length when
    finite (per unit length otherwise).
    """
    g, gp, beta = params.gamma, params.gamma_prime, params.beta
    scale = params.torus_length if params.finite else 1.0
    n_p = params.lam * _nonisolated_fraction(g, gp, beta, params.lam_prime)
    n_pp = params.lam_prime * _nonisolated_fraction(gp, g, beta, params.lam)
    return n_p * scale, n_pp * scale


def theoretical_degree_exponents(m: int, gamma: float) -> tuple[float, float]:
    """Tail exponents of the typical m-simplex degree.

    Returns ``(ccdf_slope, pdf_exponent)`` with ``ccdf_slope = m - (m+1)/gamma`` and
    ``pdf_exponent = 1 - ccdf_slope``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    slope = m - (m + 1) / gamma
    return slope, 1.0 - slope


def pairwise_intersection_bound(u: float, v: float, y: float, params: ModelParams) -> float:
    """Upper bound on the joint-neighborhood measure of ``(0, u)`` and ``(y, v)``, ``u <= v``."""
    if u > v:
        raise ValueError(f"require u <= v, got u={u}, v={v}")
    if y == 0.0:
        raise ValueError("y must be non-zero")
    g, gp, beta = params.gamma, params.gamma_prime, params.beta
    s = min((2.0 * beta * u**-g / abs(y)) ** (1.0 / gp), 1.0)
    return 2.0 * beta / (1.0 - gp) * v**-g * s ** (1.0 - gp)
