"""Student t distribution via the regularized incomplete beta function.

The continued fraction follows the modified Lentz algorithm. Two-tailed
probabilities use the identity

    P(|T| >= |t|) = I_x(df/2, 1/2),   x = df / (df + t^2)

which avoids the cancellation in ``1 - cdf`` for large ``|t|``.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq

from .errors import ValidationError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValidationError("betainc requires a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"betainc requires 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the continued fraction converges fast only below the mean of the distribution
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _check_df(df: float) -> None:
    if not df >= 1:
        raise ValidationError(f"degrees of freedom must be >= 1, got {df}")


def two_tailed_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    _check_df(df)
    if math.isnan(t):
        raise ValidationError("t is NaN")
    if math.isinf(t):
        return 0.0
    if t == 0:
        return 1.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * two_tailed_p(t, df)
    return 1.0 - tail if t > 0 else tail


def t_critical(quantile: float, df: float) -> float:
    """Inverse CDF: the ``t`` with ``t_cdf(t, df) == quantile``."""
    _check_df(df)
    if not 0.0 < quantile < 1.0:
        raise ValidationError(f"quantile must be in (0, 1), got {quantile}")
    if quantile == 0.5:
        return 0.0
    if quantile < 0.5:
        return -t_critical(1.0 - quantile, df)
    hi = 1.0
    while t_cdf(hi, df) < quantile:
        hi *= 2.0
    return brentq(lambda x: t_cdf(x, df) - quantile, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
