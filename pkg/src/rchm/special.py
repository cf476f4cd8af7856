"""Upper incomplete gamma function for arbitrary real first argument.

``scipy.special.gammaincc`` is regularized and only defined for ``a > 0``;
the non-isolated vertex counts need ``Gamma(a, x)`` at ``a = -1/gamma`` which is
negative and usually non-integer.
"""

import math

from scipy.special import zeta

_EULER = 0.5772156649015329
_TINY = 1e-300
_EPS = 1e-16
_MAX_ITER = 10_000


def _continued_fraction(a, x):
    # Lentz evaluation of the Legendre continued fraction; converges for x > 0 and
    # any real a, fast once x exceeds ~1.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"continued fraction for Gamma({a}, {x}) did not converge")
    return math.exp(-x + a * math.log(x)) * h


def _lower_series(a, x):
    # gamma(a, x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n)), valid for a > 0
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x))


# (-1)^k zeta(k) / k for the Taylor series of lgamma(1 + a) about 0
_LGAMMA1P = [(-1) ** k * float(zeta(k)) / k for k in range(2, 64)]


def _lgamma1p(a):
    """``lgamma(1 + a)`` without rounding ``1 + a`` first."""
    if abs(a) >= 0.5:
        return math.lgamma(1.0 + a)
    total = 0.0
    power = a
    for c in _LGAMMA1P:
        power *= a
        total += c * power
    return -_EULER * a + total


def _small_order(a, x):
    # Gamma(a) - x^a/a = (Gamma(1+a) - x^a)/a is written with expm1 so the two
    # 1/a poles cancel analytically; the remaining alternating sum is
    # -x^a sum_{n>=1} (-x)^n / (n! (a+n)).  a = 0 gives E1(x).
    log_x = math.log(x)
    if a == 0.0:
        head = -_EULER - log_x
    else:
        head = (math.expm1(_lgamma1p(a)) - math.expm1(a * log_x)) / a
    total = 0.0
    term = 1.0
    for n in range(1, _MAX_ITER):
        term *= -x / n
        contrib = term / (a + n)
        total += contrib
        if abs(contrib) < _EPS * max(abs(total), 1e-300):
            break
    return head - math.exp(a * log_x) * total


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Return ``Gamma(a, x) = int_x^inf t^(a-1) e^-t dt`` for real ``a`` and ``x > 0``.

    Large ``x`` uses the continued fraction.  Otherwise orders in [-1/2, 1) use
    the series with the poles of ``Gamma(a)`` and ``x^a / a`` cancelled by hand,
    and lower orders apply ``Gamma(a, x) = (Gamma(a + 1, x) - x^a e^-x) / a``
    downward from there.
    """
    a = float(a)
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"upper_incomplete_gamma requires x > 0, got {x}")
    if math.isinf(x):
        return 0.0
    if x > 1.0 and x > a + 1.0:
        return _continued_fraction(a, x)
    if a >= 1.0:
        if x > a + 1.0:
            return _continued_fraction(a, x)
        return math.gamma(a) - _lower_series(a, x)
    if a >= -0.5:
        return _small_order(a, x)
    # shift up to a0 = a + k in [-0.5, 0.5), then walk back down
    k = math.ceil(-a - 0.5)
    g = _small_order(a + k, x)
    log_x = math.log(x)
    for j in range(1, k + 1):
        s = a + (k - j)
        g = (g - math.exp(s * log_x - x)) / s
    return g
