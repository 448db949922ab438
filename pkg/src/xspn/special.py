"""Numerical primitives: stable log-sum-exp, log binomials, chi-square tails.

The chi-square tail is computed from scratch via the regularized upper
incomplete gamma function (power series below the a+1 crossover, Lentz
continued fraction above), so inference and testing carry no dependency
on a statistics library.
"""

from __future__ import annotations

import math

import numpy as np

_EPS = 1e-15
_MAX_ITER = 800
_FPMIN = 1e-300


def logsumexp(a: np.ndarray, axis: int | None = None) -> np.ndarray | float:
    """log(sum(exp(a))) with max-subtraction; tolerates -inf entries."""
    a = np.asarray(a, dtype=np.float64)
    amax = np.max(a, axis=axis, keepdims=True) if a.size else np.float64(-np.inf)
    amax = np.where(np.isfinite(amax), amax, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - amax), axis=axis, keepdims=True)) + amax
    if axis is None:
        return float(out)
    return np.squeeze(out, axis=axis)


_log_fact_cache = np.zeros(1)


def log_factorials(n: int) -> np.ndarray:
    """Array of ln(k!) for k = 0..n, grown lazily and cached."""
    global _log_fact_cache
    if n >= len(_log_fact_cache):
        hi = max(n + 1, 2 * len(_log_fact_cache))
        ext = np.array([math.lgamma(k + 1.0) for k in range(len(_log_fact_cache), hi)])
        _log_fact_cache = np.concatenate([_log_fact_cache, ext])
    return _log_fact_cache[: n + 1]


def log_binomial(n: int, k) -> np.ndarray | float:
    """ln C(n, k); -inf outside 0 <= k <= n.  k may be an integer array."""
    lf = log_factorials(n)
    k_arr = np.asarray(k)
    valid = (k_arr >= 0) & (k_arr <= n)
    kc = np.clip(k_arr, 0, n)
    out = np.where(valid, lf[n] - lf[kc] - lf[n - kc], -np.inf)
    if np.isscalar(k) or k_arr.ndim == 0:
        return float(out)
    return out


def _gamma_p_series(a: float, x: float) -> float:
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q_contfrac(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a)."""
    if a <= 0.0:
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return min(1.0, max(0.0, 1.0 - _gamma_p_series(a, x)))
    return min(1.0, max(0.0, _gamma_q_contfrac(a, x)))


def chi2_sf(x: float, df: int | float) -> float:
    """Upper-tail probability of the chi-square distribution with df degrees of freedom."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return regularized_gamma_q(df / 2.0, x / 2.0)
