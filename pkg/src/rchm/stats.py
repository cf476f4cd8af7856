"""Power-law tails, alpha-stable laws with fixed index, and normality diagnostics."""

from __future__ import annotations

import functools
import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, interpolate, optimize, special
from scipy import stats as sps


class TailTooSmallError(ValueError):
    pass


class DegenerateSampleError(ValueError):
    pass


class StableIntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PowerLawFit:
    x_min: float
    exponent: float
    n_tail: int
    discrete: bool = False

    @property
    def standard_error(self) -> float:
        return (self.exponent - 1.0) / math.sqrt(self.n_tail)

    def to_dict(self):
        return asdict(self)


def fit_power_law(samples, x_min: float = 10, discrete: bool = False) -> PowerLawFit:
    """Maximum-likelihood pdf exponent of the tail ``{x >= x_min}``.

    The continuous estimate is ``1 + n / sum(log(x / x_min))``.  With
    ``discrete=True`` the samples are treated as integers with pmf proportional
    to ``k^-a`` for ``k >= x_min`` and the likelihood (normalized by the Hurwitz
    zeta function) is maximized numerically.
    """
    x = np.asarray(samples, dtype=float)
    if not x_min > 0:
        raise ValueError("x_min must be positive")
    tail = x[x >= x_min]
    n = tail.size
    if n < 2:
        raise TailTooSmallError(f"need at least 2 samples >= x_min={x_min}, got {n}")
    log_sum = float(np.log(tail / x_min).sum())
    if log_sum <= 0.0:
        raise TailTooSmallError(f"all {n} tail samples equal x_min={x_min}; exponent unbounded")
    alpha = 1.0 + n / log_sum
    if not discrete:
        return PowerLawFit(float(x_min), alpha, n, False)
    total = float(np.log(tail).sum())

    def nll(a):
        return n * math.log(special.zeta(a, x_min)) + a * total

    # the continuous estimate overshoots the discrete one, so it bounds the search
    hi = max(alpha, 1.5) * 2.0 + 1.0
    res = optimize.minimize_scalar(nll, bounds=(1.0 + 1e-9, hi), method="bounded",
                                   options={"xatol": 1e-10})
    return PowerLawFit(float(x_min), float(res.x), n, True)


@dataclass(frozen=True)
class StableFit:
    alpha: float
    skew: float
    location: float
    scale: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not -1.0 <= self.skew <= 1.0:
            raise ValueError(f"skew must lie in [-1, 1], got {self.skew}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["alpha"]), float(d["skew"]), float(d["location"]), float(d["scale"]))


# Standardized laws (location 0, scale 1) in the S1 parameterization with
# characteristic function exp(-|t|^a (1 - i b sign(t) tan(pi a / 2))).

_TAIL_SWITCH = 60.0


def _check_alpha(alpha):
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == 1.0:
        raise ValueError("alpha = 1 is not supported")


def _tan(alpha):
    return 0.0 if alpha == 2.0 else math.tan(math.pi * alpha / 2.0)


def _inversion(z, alpha, skew, kind):
    tau = skew * _tan(alpha)
    t_max = 40.0 ** (1.0 / alpha)
    if kind == "cdf":
        def f(t):
            return math.exp(-t**alpha) * math.sin(tau * t**alpha - z * t) / t
    else:
        def f(t):
            return math.exp(-t**alpha) * math.cos(tau * t**alpha - z * t)
    # one breakpoint per half period keeps quad on top of the oscillation
    n_break = int(abs(z) * t_max / math.pi)
    points = np.linspace(0.0, t_max, n_break + 2)[1:-1] if n_break else None
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, 0.0, t_max, points=points, limit=max(200, 4 * (n_break + 2)),
                                      epsabs=1e-11, epsrel=1e-10)
        except integrate.IntegrationWarning as exc:
            raise StableIntegrationError(
                f"stable {kind} quadrature failed at z={z}, alpha={alpha}, skew={skew}: {exc}"
            ) from exc
    if err > 1e-8:
        raise StableIntegrationError(
            f"stable {kind} quadrature error estimate {err:.3g} at z={z}, alpha={alpha}, skew={skew}"
        )
    return 0.5 - val / math.pi if kind == "cdf" else val / math.pi


def _series_terms(alpha, skew, n_terms=12):
    # large-x expansion: coefficients of x^(-k alpha) in 1 - F(x), x -> +inf
    phi = math.atan(skew * _tan(alpha))
    rho = 1.0 / math.cos(phi)
    theta = 2.0 * phi / (math.pi * alpha)
    out = []
    for k in range(1, n_terms + 1):
        c = (-1) ** (k + 1) * math.exp(math.lgamma(k * alpha) - math.lgamma(k + 1))
        out.append(c * rho**k * math.sin(k * math.pi * alpha * (1.0 + theta) / 2.0) / math.pi)
    return out


def _upper_tail(z, alpha, skew, density):
    # asymptotic series, truncated at its smallest term
    total, last = 0.0, math.inf
    for k, c in enumerate(_series_terms(alpha, skew), start=1):
        term = c * z ** (-k * alpha)
        if density:
            term *= k * alpha / z
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        if last < 1e-17:
            break
    return total


def standard_stable_cdf(z: float, alpha: float, skew: float) -> float:
    _check_alpha(alpha)
    if alpha == 2.0:
        return float(sps.norm.cdf(z, scale=math.sqrt(2.0)))
    if z > _TAIL_SWITCH:
        return 1.0 - _upper_tail(z, alpha, skew, False)
    if z < -_TAIL_SWITCH:
        return _upper_tail(-z, alpha, -skew, False)
    return min(1.0, max(0.0, _inversion(z, alpha, skew, "cdf")))


def standard_stable_pdf(z: float, alpha: float, skew: float) -> float:
    _check_alpha(alpha)
    if alpha == 2.0:
        return float(sps.norm.pdf(z, scale=math.sqrt(2.0)))
    if z > _TAIL_SWITCH:
        return _upper_tail(z, alpha, skew, True)
    if z < -_TAIL_SWITCH:
        return _upper_tail(-z, alpha, -skew, True)
    return max(0.0, _inversion(z, alpha, skew, "pdf"))


def stable_cdf(x, fit: StableFit):
    """CDF of the fitted law, by numerical inversion of the characteristic function.

    Far tails (beyond 60 scale units) use the asymptotic power series instead.
    Scalar or array input.
    """
    z = (np.asarray(x, dtype=float) - fit.location) / fit.scale
    out = np.vectorize(lambda v: standard_stable_cdf(float(v), fit.alpha, fit.skew))(z)
    return float(out) if out.ndim == 0 else out


def stable_pdf(x, fit: StableFit):
    z = (np.asarray(x, dtype=float) - fit.location) / fit.scale
    out = np.vectorize(lambda v: standard_stable_pdf(float(v), fit.alpha, fit.skew))(z)
    out = out / fit.scale
    return float(out) if out.ndim == 0 else out


def stable_p_value(observed: float, fit: StableFit) -> float:
    """Two-sided tail probability ``2 min(F, 1 - F)`` of ``observed``."""
    f = stable_cdf(observed, fit)
    return float(min(1.0, 2.0 * min(f, 1.0 - f)))


def stable_rvs(fit: StableFit, size, rng: np.random.Generator) -> np.ndarray:
    return sps.levy_stable.rvs(fit.alpha, fit.skew, loc=fit.location, scale=fit.scale,
                               size=size, random_state=rng)


@functools.lru_cache(maxsize=32)
def _log_pdf_table(alpha: float, skew: float):
    # interpolant of the standardized log-density on an asinh-spaced grid
    s = np.linspace(math.asinh(-_TAIL_SWITCH), math.asinh(_TAIL_SWITCH), 801)
    z = np.sinh(s)
    pdf = np.array([standard_stable_pdf(float(v), alpha, skew) for v in z])
    floor = 1e-12
    logpdf = np.log(np.maximum(pdf, floor))
    return interpolate.CubicSpline(s, logpdf), z


def _standard_logpdf(z, alpha, skew):
    spline, _ = _log_pdf_table(alpha, skew)
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    inside = np.abs(z) <= _TAIL_SWITCH
    out[inside] = spline(np.arcsinh(z[inside]))
    for i in np.nonzero(~inside)[0]:
        v = z[i]
        p = _upper_tail(v, alpha, skew, True) if v > 0 else _upper_tail(-v, alpha, -skew, True)
        out[i] = math.log(max(p, 1e-300))
    return out


def _standard_quantiles(alpha, skew, probs):
    out = []
    for p in probs:
        out.append(optimize.brentq(lambda z: standard_stable_cdf(z, alpha, skew) - p, -50, 50,
                                   xtol=1e-10))
    return np.array(out)


def fit_stable(samples, alpha_fixed: float, skew_fixed: float, refine: bool = True) -> StableFit:
    """Location and scale of a stable law with fixed index and skew.

    Starts from quartile matching against the standardized law and refines by
    maximum likelihood on a tabulated log-density.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 30:
        raise ValueError(f"need at least 30 samples, got {x.size}")
    _check_alpha(alpha_fixed)
    q = np.percentile(x, [25, 50, 75])
    spread = q[2] - q[0]
    if not spread > 0:
        spread = float(np.std(x))
        if not spread > 0:
            raise DegenerateSampleError("samples have zero spread")
    zq = _standard_quantiles(alpha_fixed, skew_fixed, (0.25, 0.5, 0.75))
    scale0 = spread / (zq[2] - zq[0])
    loc0 = q[1] - scale0 * zq[1]
    if not refine:
        return StableFit(alpha_fixed, skew_fixed, float(loc0), float(scale0))

    def nll(theta):
        loc = loc0 + theta[0] * scale0
        scale = scale0 * math.exp(theta[1])
        z = (x - loc) / scale
        return -(_standard_logpdf(z, alpha_fixed, skew_fixed).sum() - x.size * math.log(scale))

    res = optimize.minimize(nll, np.zeros(2), method="Nelder-Mead",
                            options={"xatol": 1e-7, "fatol": 1e-9, "maxiter": 2000})
    loc = loc0 + res.x[0] * scale0
    scale = scale0 * math.exp(res.x[1])
    return StableFit(alpha_fixed, skew_fixed, float(loc), float(scale))


@dataclass
class Diagnostics:
    n: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    normal_mean: float
    normal_std: float
    degenerate: bool
    qq: np.ndarray  # columns: theoretical, empirical

    def to_dict(self):
        d = asdict(self)
        d.pop("qq")
        return d

    def write_qq(self, path):
        with open(path, "w") as fh:
            fh.write("theoretical,empirical\n")
            for t, e in self.qq:
                fh.write(f"{float(t)!r},{float(e)!r}\n")


def distribution_diagnostics(samples) -> Diagnostics:
    """Moments, a normal fit and Q-Q pairs (fitted-normal quantiles vs sorted sample)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 1:
        raise ValueError("no samples")
    mean = float(x.mean())
    var = float(x.var(ddof=1)) if n > 1 else 0.0
    degenerate = n < 10 or not var > 0
    if var > 0 and n > 2:
        skew = float(sps.skew(x))
        kurt = float(sps.kurtosis(x))
    else:
        skew = kurt = 0.0
    std = math.sqrt(var)
    probs = (np.arange(1, n + 1) - 0.5) / n
    theoretical = mean + std * sps.norm.ppf(probs)
    return Diagnostics(n, mean, var, skew, kurt, mean, std, degenerate,
                       np.column_stack([theoretical, x]))


def five_number_summary(samples) -> dict:
    x = np.asarray(samples, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return {"min": None, "q1": None, "median": None, "q3": None, "max": None, "n": 0}
    q = np.percentile(x, [0, 25, 50, 75, 100])
    return {"min": q[0], "q1": q[1], "median": q[2], "q3": q[3], "max": q[4], "n": int(x.size)}
