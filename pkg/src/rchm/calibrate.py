"""Fit (beta, lambda, lambda') to observed author, document and incidence counts.

Eliminating ``beta`` through the edge equation ``E = 2 beta lam lam' / ((1-g)(1-g'))``
turns the author equation into a function of ``lam`` alone and the document
equation into a function of ``lam'`` alone:

    n_authors   = lam  * q(g,  (1-g)  E / lam)
    n_documents = lam' * q(g', (1-g') E / lam')

where ``q(g, c) = 1 - int_0^1 exp(-c u^-g) du`` is the non-isolated fraction at
mean degree ``c / (1-g)``.  Each side is increasing in its intensity with limits
0 and ``E``, so a solution exists exactly when ``E > max(n_authors, n_documents)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

from scipy import optimize

from .model import ModelParams, expected_edge_count, expected_nonisolated_counts
from .special import upper_incomplete_gamma

__all__ = [
    "CalibrationError",
    "DataSummary",
    "GammaEstimate",
    "InfeasibleSummaryError",
    "calibrate",
    "forward_summary",
    "gamma_from_exponent",
    "upper_incomplete_gamma",
]


class InfeasibleSummaryError(ValueError):
    pass


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class DataSummary:
    n_authors: float
    n_documents: float
    n_incidences: float
    gamma: float
    gamma_prime: float

    def __post_init__(self):
        if not (self.n_authors > 0 and self.n_documents > 0 and self.n_incidences > 0):
            raise ValueError("counts must be positive")
        if not (0 < self.gamma < 1 and 0 < self.gamma_prime < 1):
            raise ValueError("gamma and gamma_prime must lie in (0, 1)")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "DataSummary":
        keys = ("n_authors", "n_documents", "n_incidences", "gamma", "gamma_prime")
        missing = [k for k in keys if k not in d]
        if missing:
            raise ValueError(f"missing summary keys: {missing}")
        return cls(*(float(d[k]) for k in keys))

    @classmethod
    def from_json(cls, text: str) -> "DataSummary":
        return cls.from_dict(json.loads(text))


def forward_summary(params: ModelParams) -> DataSummary:
    """Expected counts implied by ``params`` on the unit torus."""
    unit = ModelParams(params.gamma, params.gamma_prime, params.beta, params.lam, params.lam_prime)
    n_a, n_d = expected_nonisolated_counts(unit)
    return DataSummary(n_a, n_d, expected_edge_count(unit), params.gamma, params.gamma_prime)


def _nonisolated(lam, gamma, edges):
    # lam * q(gamma, (1 - gamma) E / lam), via the incomplete gamma closed form
    c = (1.0 - gamma) * edges / lam
    inv = 1.0 / gamma
    gval = upper_incomplete_gamma(-inv, c)
    if gval == 0.0:
        return lam
    return lam * (1.0 - inv * math.exp(inv * math.log(c) + math.log(gval)))


def _solve_intensity(target, gamma, edges, rtol):
    def f(log_lam):
        return _nonisolated(math.exp(log_lam), gamma, edges) / target - 1.0

    lo = math.log(target)
    # at lam = target every vertex would have to be non-isolated; within rounding of
    # that, any larger lam fits as well
    if f(lo) >= -1e-12:
        raise CalibrationError(
            f"count {target} is saturated (every vertex non-isolated); intensity not identifiable"
        )
    hi = lo + 1.0
    while f(hi) < 0.0:
        hi += 1.0
        if hi - lo > 60.0:
            raise CalibrationError(f"could not bracket intensity for target {target}")
    root, info = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=rtol, maxiter=500, full_output=True)
    if not info.converged:
        raise CalibrationError(f"intensity solve did not converge: {info.flag}")
    return math.exp(root)


def calibrate(summary: DataSummary, tol: float = 1e-8) -> ModelParams:
    """Solve the three expectation equations for ``(beta, lam, lam')`` on the unit torus.

    Raises :class:`InfeasibleSummaryError` when the incidence count does not
    exceed both vertex counts, and :class:`CalibrationError` if the solved
    parameters leave a relative residual above ``tol``.
    """
    g, gp, edges = summary.gamma, summary.gamma_prime, summary.n_incidences
    if not edges > max(summary.n_authors, summary.n_documents):
        raise InfeasibleSummaryError(
            f"n_incidences={edges} must exceed both n_authors={summary.n_authors} and "
            f"n_documents={summary.n_documents}: every non-isolated vertex needs an incidence"
        )
    lam = _solve_intensity(summary.n_authors, g, edges, 1e-14)
    lam_p = _solve_intensity(summary.n_documents, gp, edges, 1e-14)
    beta = edges * (1.0 - g) * (1.0 - gp) / (2.0 * lam * lam_p)
    params = ModelParams(g, gp, beta, lam, lam_p, 1.0)
    fwd = forward_summary(params)
    residuals = {
        "n_authors": fwd.n_authors / summary.n_authors - 1.0,
        "n_documents": fwd.n_documents / summary.n_documents - 1.0,
        "n_incidences": fwd.n_incidences / summary.n_incidences - 1.0,
    }
    if max(abs(r) for r in residuals.values()) > tol:
        raise CalibrationError(f"relative residuals above {tol}: {residuals}")
    return params


class GammaEstimate(NamedTuple):
    gamma: float
    in_range: bool


def gamma_from_exponent(pdf_exponent: float, m: int = 0) -> GammaEstimate:
    """Invert the tail law ``pdf_exponent = 1 + (m+1)/gamma - m``."""
    if not pdf_exponent > 1.0:
        raise ValueError(f"pdf exponent must exceed 1, got {pdf_exponent}")
    gamma = (m + 1) / (pdf_exponent - 1.0 + m)
    return GammaEstimate(gamma, 0.0 < gamma < 1.0)
