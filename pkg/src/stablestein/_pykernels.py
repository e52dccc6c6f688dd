"""Reference implementation of the partial-sum kernel in numpy.

Uniforms come from a counter-based generator: the k-th uniform of draw j in
sum i uses counter (i*n + j)*U + k, mixed with a 64-bit key by the splitmix64
finalizer.  Any block of sums can therefore be produced independently of how
work is split between threads.
"""
from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

PARETO, TWOPOWER, TRIG, LOGTAIL, SLOWVARY = range(5)
UNIFORMS = (2, 3, 2, 2, 4)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0 ** -53
_CHUNK = 1 << 20


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Uniforms in (0, 1) for counters start, ..., start + count - 1."""
    with np.errstate(over="ignore"):
        c = np.arange(start + 1, start + count + 1, dtype=np.uint64)
        z = np.uint64(key) + c * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


def _log_amp_and_slope(family, params, w):
    """log(2 T(e^w)) and its derivative in w for the trig and logtail tails."""
    alpha, A, c2 = params[0], params[2], params[3]
    x = np.exp(w)
    if family == TRIG:
        s, co = np.sin(x), np.cos(x)
        amp = A + c2 * s / x
        damp = c2 * (co / x - s / (x * x))
    else:
        amp = A + c2 / w
        damp = -c2 / (w * w * x)
    log_t = math.log(2.0) - alpha * w + np.log(amp)
    slope = -alpha + x * damp / amp
    return log_t, slope


def _invert(family, params, u):
    """Solve 2 T(x) = u for x >= cutoff by bracketed Newton in w = log x."""
    alpha, A = params[0], params[2]
    log_u = np.log(u)
    lo = np.full(u.shape, 0.0 if family == TRIG else 1.0)
    w = np.maximum(lo, (math.log(2.0 * A) - log_u) / alpha)
    # one fixed-point step with the perturbed amplitude at the Pareto guess
    f, _s = _log_amp_and_slope(family, params, w)
    w = np.maximum(lo, w + (f - log_u) / alpha)
    hi = w + 1.0
    for _ in range(200):
        f_hi, _s = _log_amp_and_slope(family, params, hi)
        grow = f_hi - log_u > 0
        if not grow.any():
            break
        hi = np.where(grow, lo + 2.0 * (hi - lo), hi)
    active = np.ones(u.shape, dtype=bool)
    for _ in range(100):
        f, slope = _log_amp_and_slope(family, params, w)
        f = f - log_u
        lo = np.where(active & (f > 0), w, lo)
        hi = np.where(active & (f <= 0), w, hi)
        step = f / slope
        newton = w - step
        small = np.abs(step) <= 1e-9 * np.maximum(1.0, np.abs(w))
        inside = (newton >= lo) & (newton <= hi)
        w_new = np.where(small | inside, newton, 0.5 * (lo + hi))
        w = np.where(active, w_new, w)
        active &= ~small
        if not active.any():
            break
    return np.exp(w)


def transform(family: int, params, u: np.ndarray) -> np.ndarray:
    """Draws from uniforms of shape (count, U)."""
    alpha, beta = params[0], params[1] if len(params) > 1 else 0.0
    if family == SLOWVARY:
        neg = u[:, 0] < 0.5
        exp_part = np.where(u[:, 1] < alpha / (1.0 + alpha),
                            -np.log(u[:, 2]), -np.log(u[:, 2]) - np.log(u[:, 3]))
        x = np.exp(1.0 + exp_part * (1.0 / alpha))
        return np.where(neg, -x, x)
    neg = u[:, 0] < 0.5 * (1.0 - beta)
    if family == PARETO:
        x = np.exp(-np.log(u[:, 1]) * (1.0 / alpha))
    elif family == TWOPOWER:
        A, alpha_t = params[2], params[3]
        inv = np.where(u[:, 1] < 2.0 * A, 1.0 / alpha, 1.0 / alpha_t)
        x = np.exp(-np.log(u[:, 2]) * inv)
    else:
        x = _invert(family, params, u[:, 1])
    return np.where(neg, -x, x)


def partial_sums(family: int, params, n: int, n_sums: int, key: int,
                 center: float, scale: float, first: int = 0) -> np.ndarray:
    """Normalized sums (sum_j (X_j - center)) / scale for sums first .. first + n_sums - 1."""
    params = np.asarray(params, dtype=float)
    U = UNIFORMS[family]
    out = np.empty(n_sums)
    if n > _CHUNK:
        for s in range(n_sums):
            base = (first + s) * n * U
            total = 0.0
            for j0 in range(0, n, _CHUNK):
                k = min(_CHUNK, n - j0)
                u = uniforms(key, base + j0 * U, k * U).reshape(k, U)
                total += float(np.sum(transform(family, params, u) - center))
            out[s] = total / scale
        return out
    per_block = max(1, _CHUNK // max(n, 1))
    for s0 in range(0, n_sums, per_block):
        m = min(per_block, n_sums - s0)
        u = uniforms(key, (first + s0) * n * U, m * n * U).reshape(m * n, U)
        x = transform(family, params, u).reshape(m, n) - center
        out[s0:s0 + m] = np.sum(x, axis=1) / scale
    return out
