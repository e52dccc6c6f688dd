"""One-dimensional quadrature kernels.

Adaptive Gauss-Kronrod (7, 15) bisection vectorised over panels, with

* power-law substitution for declared integrable endpoint singularities,
* the map x = a + t/(1 - t) for semi-infinite ranges, optionally truncated by
  a caller-declared decay envelope,
* half-period panel summation accelerated by Wynn's epsilon algorithm for
  oscillatory tails (``oscillation_mode="fourier"``).

Integrands are vectorised callables: ``f(x)`` receives a 1-D float array and
returns either an array of the same shape or an array of shape ``(m, len(x))``
(a vector-valued integrand, integrated component-wise).  Complex values are
allowed.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EnvelopeViolated, InvalidInterval, NonConvergent, NonFiniteEvaluation, ParameterError

__all__ = [
    "QuadConfig",
    "QuadResult",
    "OscillatoryResult",
    "Envelope",
    "integrate",
    "integrate_semi_infinite",
    "integrate_oscillatory",
    "integrate_power_tail",
    "wynn_epsilon",
]

# Kronrod 15-point abscissae on [0, 1] (descending) and weights; the Gauss
# 7-point rule uses the odd-indexed abscissae and the centre.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_wg_half = np.zeros(8)
_wg_half[1::2] = _WG
GAUSS_WEIGHTS = np.concatenate([_wg_half[:-1], _wg_half[::-1]])

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    oscillation_mode: str = "plain"

    def __post_init__(self):
        if not (self.rel_tol > 0):
            raise ParameterError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not (self.abs_tol >= 0):
            raise ParameterError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ParameterError(f"max_subdivisions must be an integer >= 1, got {self.max_subdivisions}")
        if self.oscillation_mode not in ("plain", "fourier"):
            raise ParameterError(f"oscillation_mode must be 'plain' or 'fourier', got {self.oscillation_mode!r}")

    def replace(self, **changes) -> "QuadConfig":
        return dataclasses.replace(self, **changes)


DEFAULT_CONFIG = QuadConfig()


@dataclass(frozen=True)
class QuadResult:
    """Integral value (scalar or array for vector integrands) and error bound."""

    value: float | complex | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int

    def __post_init__(self):
        if np.any(np.asarray(self.error_estimate) < 0):
            raise ValueError("error_estimate must be nonnegative")
        if self.evaluations < 1:
            raise ValueError("evaluations must be >= 1")


@dataclass(frozen=True)
class OscillatoryResult:
    """Cosine (real) and sine (imaginary) parts of a Fourier-type integral."""

    real: QuadResult
    imag: QuadResult

    @property
    def value(self) -> complex:
        return complex(self.real.value) + 1j * complex(self.imag.value)


@dataclass(frozen=True)
class Envelope:
    """Declared decay bound |f(x)| <= scale * x**(-exponent) for x >= start."""

    scale: float
    exponent: float
    start: float = 1.0

    def __post_init__(self):
        if not (self.scale >= 0 and self.exponent > 1 and self.start > 0):
            raise ParameterError("envelope needs scale >= 0, exponent > 1, start > 0")

    def tail(self, x: float) -> float:
        """Bound on the integral of |f| over (x, inf)."""
        return self.scale * x ** (1.0 - self.exponent) / (self.exponent - 1.0)

    def cutoff(self, target: float) -> float:
        """Smallest x >= start with tail(x) <= target."""
        if self.scale == 0:
            return self.start
        x = (self.scale / ((self.exponent - 1.0) * target)) ** (1.0 / (self.exponent - 1.0))
        return max(x, self.start)


# ---------------------------------------------------------------------------
# adaptive core


def _eval_panels(f, lo, hi):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = (c[:, None] + h[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    if fx.shape == x.shape:
        fx = fx[None, :]
    elif fx.ndim >= 1 and fx.shape[-1] == x.size:
        fx = fx.reshape(-1, x.size)
    else:
        raise ParameterError(f"integrand returned shape {fx.shape} for {x.size} abscissae")
    if not np.all(np.isfinite(fx)):
        bad = x[~np.all(np.isfinite(fx), axis=0)]
        raise NonFiniteEvaluation(f"integrand not finite at x={bad[:3].tolist()}")
    fx = fx.reshape(fx.shape[0], lo.size, NODES.size)
    kron = (fx @ KRONROD_WEIGHTS) * h
    gauss = (fx @ GAUSS_WEIGHTS) * h
    resabs = (np.abs(fx) @ KRONROD_WEIGHTS) * np.abs(h)
    err = np.maximum(np.abs(kron - gauss), 50.0 * _EPS * resabs)
    return kron, err


def _adaptive(f, edges, rel_tol, abs_tol, max_subdivisions):
    """Globally adaptive bisection over the initial panels given by ``edges``.

    Returns (value, error, evaluations, per-initial-panel values, per-panel errors).
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    parent = np.arange(lo.size)
    kron, err = _eval_panels(f, lo, hi)
    evals = NODES.size * lo.size
    while True:
        total = kron.sum(axis=1)
        err_total = err.sum(axis=1)
        tol = np.maximum(rel_tol * np.abs(total), abs_tol)
        if np.all(err_total <= tol):
            break
        score = (err / np.maximum(tol, _TINY)[:, None]).max(axis=0)
        width_ok = (hi - lo) > 64 * _EPS * np.maximum(np.maximum(np.abs(lo), np.abs(hi)), _TINY)
        score_split = np.where(width_ok, score, 0.0)
        budget = max_subdivisions - lo.size
        if budget <= 0 or not np.any(score_split > 0):
            partial = _pack(total, err_total, evals)
            reason = "subdivision budget exhausted" if budget <= 0 else "panels at roundoff width"
            raise NonConvergent(
                f"quadrature did not converge ({reason}): error {np.max(err_total):.3e} > tol {np.min(tol):.3e}",
                result=partial,
            )
        order = np.argsort(-score_split, kind="stable")
        remaining = score.sum() - np.cumsum(score_split[order])
        hit = np.nonzero(remaining <= 0.5)[0]
        nsplit = hit[0] + 1 if hit.size else int(np.count_nonzero(score_split > 0))
        nsplit = max(1, min(nsplit, budget, int(np.count_nonzero(score_split > 0))))
        chosen = order[:nsplit]
        keep = np.ones(lo.size, dtype=bool)
        keep[chosen] = False
        mid = 0.5 * (lo[chosen] + hi[chosen])
        new_lo = np.concatenate([lo[chosen], mid])
        new_hi = np.concatenate([mid, hi[chosen]])
        new_parent = np.concatenate([parent[chosen], parent[chosen]])
        k_new, e_new = _eval_panels(f, new_lo, new_hi)
        evals += NODES.size * new_lo.size
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        parent = np.concatenate([parent[keep], new_parent])
        kron = np.concatenate([kron[:, keep], k_new], axis=1)
        err = np.concatenate([err[:, keep], e_new], axis=1)
    nseg = edges.size - 1
    seg = np.zeros((kron.shape[0], nseg), dtype=kron.dtype)
    seg_err = np.zeros((kron.shape[0], nseg))
    np.add.at(seg.T, parent, kron.T)
    np.add.at(seg_err.T, parent, err.T)
    return total, err_total, evals, seg, seg_err


def _pack(value, err, evals, scalar=None):
    value = np.asarray(value)
    err = np.asarray(err)
    if value.shape == (1,) and scalar is not False:
        return QuadResult(value[0].item(), float(err[0]), int(evals))
    return QuadResult(value, err, int(evals))


def _scalar_output(f, probe):
    out = np.asarray(f(np.atleast_1d(np.asarray(probe, dtype=float))))
    return out.ndim == 1


def _check_cfg(cfg):
    return DEFAULT_CONFIG if cfg is None else cfg


def _as_pair(singularity):
    if singularity is None:
        return 0.0, 0.0
    if np.isscalar(singularity):
        return float(singularity), 0.0
    left, right = singularity
    return float(left), float(right)


# relative distance to a singular endpoint below which the mapped integrand is frozen
_ENDPOINT_FLOOR = 1e-100


def _power_map(f, origin, length, power, direction):
    """Integrand in u in [0,1] for x = origin + direction*length*u**power.

    With the exact singularity exponent the mapped integrand has a finite
    limit at u = 0, but for large powers the distance to the endpoint
    underflows (or drops below the spacing of doubles near ``origin``) long
    before u does.  Below that distance the value is held constant.
    """
    floor = max(_ENDPOINT_FLOOR, 64.0 * _EPS * abs(origin) / length)
    u_min = floor ** (1.0 / power)

    def g(u):
        u = np.maximum(u, u_min)
        upm1 = u ** (power - 1.0)
        x = origin + direction * length * u * upm1
        return np.asarray(f(x)) * (length * power * upm1)

    return g


def _finite(f, a, b, cfg, sing_left, sing_right, breakpoints, is_scalar):
    length = b - a
    inner = sorted(x for x in (breakpoints or ()) if a < x < b)
    if sing_left > 0 and sing_right > 0:
        mid = inner[len(inner) // 2] if inner else 0.5 * (a + b)
        r1 = _finite(f, a, mid, cfg, sing_left, 0.0, [x for x in inner if x < mid], False)
        r2 = _finite(f, mid, b, cfg, 0.0, sing_right, [x for x in inner if x > mid], False)
        return _pack(np.asarray(r1.value) + r2.value, np.asarray(r1.error_estimate) + r2.error_estimate,
                     r1.evaluations + r2.evaluations, scalar=is_scalar)
    for s in (sing_left, sing_right):
        if not (0 <= s < 1):
            raise ParameterError(f"singularity exponent must lie in [0, 1), got {s}")
    if sing_left > 0:
        p = 1.0 / (1.0 - sing_left)
        g = _power_map(f, a, length, p, +1.0)
        knots = [((x - a) / length) ** (1.0 / p) for x in inner]
    elif sing_right > 0:
        p = 1.0 / (1.0 - sing_right)
        g = _power_map(f, b, length, p, -1.0)
        knots = sorted(((b - x) / length) ** (1.0 / p) for x in inner)
    else:
        g = f
        knots = None
    if knots is None:
        edges = np.array([a] + inner + [b], dtype=float)
    else:
        edges = np.array([0.0] + knots + [1.0], dtype=float)
    val, err, ev, _, _ = _adaptive(g, edges, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    return _pack(val, err, ev, scalar=is_scalar)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadConfig | None = None,
    *,
    singularity: float | tuple[float, float] | None = None,
    breakpoints: Sequence[float] | None = None,
    envelope: Envelope | None = None,
    period: float | None = None,
) -> QuadResult:
    """Integrate ``f`` over (a, b).

    ``singularity`` is an exponent s in [0, 1) (or a (left, right) pair) such
    that |f| grows like |x - endpoint|**(-s); the corresponding endpoint is
    treated with the substitution x = a + (b - a) u**(1/(1-s)).  Infinite
    limits are delegated to :func:`integrate_semi_infinite`.

    Near a singular endpoint e != 0 the distance x - e is only known to
    about ulp(e); integrands that need it accurately should be written in
    the distance itself, with the singularity placed at 0.
    """
    cfg = _check_cfg(cfg)
    a = float(a)
    b = float(b)
    if math.isnan(a) or math.isnan(b) or not a < b:
        raise InvalidInterval(f"need a < b, got a={a}, b={b}")
    sl, sr = _as_pair(singularity)
    if math.isinf(a) and math.isinf(b):
        mid = 0.0
        r1 = integrate_semi_infinite(lambda x: f(-x), -mid, cfg, envelope=envelope, period=period)
        r2 = integrate_semi_infinite(f, mid, cfg, envelope=envelope, period=period)
        return _pack(np.asarray(r1.value) + r2.value, np.asarray(r1.error_estimate) + r2.error_estimate,
                     r1.evaluations + r2.evaluations, scalar=np.ndim(r1.value) == 0)
    if math.isinf(b):
        return integrate_semi_infinite(f, a, cfg, singularity=sl, envelope=envelope, period=period,
                                       breakpoints=breakpoints)
    if math.isinf(a):
        return integrate_semi_infinite(lambda x: f(-x), -b, cfg, singularity=sr, envelope=envelope,
                                       period=period, breakpoints=[-x for x in (breakpoints or ())])
    is_scalar = _scalar_output(f, 0.5 * (a + b))
    return _finite(f, a, b, cfg, sl, sr, breakpoints, is_scalar)


# ---------------------------------------------------------------------------
# semi-infinite ranges


def _check_envelope(f, envelope: Envelope, a: float):
    start = max(envelope.start, a)
    x = start * 2.0 ** np.arange(0, 48, 1.5)
    fx = np.abs(np.asarray(f(x)))
    if fx.ndim == 2:
        fx = fx.max(axis=0)
    bound = envelope.scale * x ** (-envelope.exponent)
    bad = fx > bound * (1 + 1e-6) + 1e-300
    if np.any(bad):
        i = int(np.argmax(bad))
        raise EnvelopeViolated(f"|f({x[i]:.4g})| = {fx[i]:.4g} exceeds declared envelope {bound[i]:.4g}")


def wynn_epsilon(partial_sums: Sequence) -> tuple:
    """Limit of a sequence by Wynn's epsilon algorithm.

    Returns ``(estimate, error_estimate)``; the estimate is taken from the even
    column whose last two diagonal entries agree best.
    """
    s = np.asarray(partial_sums)
    n = s.size
    if n == 0:
        raise ParameterError("empty sequence")
    if n < 3:
        return s[-1], (abs(s[-1] - s[-2]) if n == 2 else math.inf)
    best = s[-1]
    best_err = abs(s[-1] - s[-2]) + abs(s[-2] - s[-3])
    if best_err == 0:
        return best, 0.0
    prev = np.zeros(n + 1, dtype=s.dtype)
    cur = s.astype(s.dtype, copy=True)
    last_even = cur
    k = 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while cur.size > 1:
            diff = cur[1:] - cur[:-1]
            if np.any(diff == 0):
                break
            nxt = prev[1:cur.size] + 1.0 / diff
            if not np.all(np.isfinite(nxt)):
                break
            prev, cur = cur, nxt
            k += 1
            if k % 2 == 0 and cur.size >= 2:
                est = cur[-1]
                err = abs(cur[-1] - cur[-2]) + abs(est - last_even[-1])
                if err < best_err:
                    best, best_err = est, err
                last_even = cur
    return best, float(best_err + 10 * _EPS * abs(best))


def levin_u(partial_sums: Sequence, terms: Sequence, max_order: int = 16) -> tuple:
    """Levin u-transform (beta = 1) anchored at the first term of the sequence.

    Orders up to ``max_order`` are formed from the leading entries; the
    estimate is the highest order and the error estimate is twice the largest
    change over the last three orders.
    """
    s = np.asarray(partial_sums)
    t = np.asarray(terms)
    kmax = min(max_order, s.size - 1)
    if kmax < 4:
        return s[-1], math.inf
    omega = (np.arange(s.size, dtype=float) + 1.0) * t
    if np.any(omega[:kmax + 1] == 0):
        return s[-1], float(abs(s[-1] - s[-2]))
    est = []
    for k in range(1, kmax + 1):
        j = np.arange(k + 1)
        c = (-1.0) ** j * np.array([math.comb(k, int(q)) for q in j], dtype=float)
        c = c * ((j + 1.0) / (k + 1.0)) ** (k - 1)
        est.append(np.sum(c * s[j] / omega[j]) / np.sum(c / omega[j]))
    est = np.array(est)
    err = 2.0 * float(np.max(np.abs(np.diff(est[-4:]))))
    return est[-1], err + 10 * _EPS * abs(est[-1])


def _levin_tail(f, a, cfg, half, k_start, running, err_panels, evals, periods=24):
    """Whole-period panels from a + k_start*half, summed by the Levin u-transform."""
    edges = a + half * np.arange(k_start, k_start + 2 * periods + 1, 2, dtype=float)
    abs_b = max(cfg.abs_tol, 0.1 * cfg.rel_tol * float(np.max(np.abs(running))))
    _, _, ev, seg, seg_err = _adaptive(f, edges, cfg.rel_tol, abs_b, cfg.max_subdivisions)
    evals += ev
    est = np.empty(seg.shape[0], dtype=np.result_type(seg.dtype, running.dtype))
    lerr = np.empty(seg.shape[0])
    for c in range(seg.shape[0]):
        est[c], lerr[c] = levin_u(np.cumsum(seg[c]), seg[c])
    value = running + est
    err = lerr + err_panels + seg_err.sum(axis=1)
    tol = np.maximum(cfg.rel_tol * np.abs(value), cfg.abs_tol)
    if np.any(err > 100 * tol):
        raise NonConvergent(
            f"non-oscillatory tail: Levin extrapolation error {np.max(err):.3e} exceeds tolerance",
            result=_pack(value, err, evals),
        )
    return value, err, evals


def _alternates(seg):
    signs = np.sign(seg)
    flips = np.mean(signs[:, 1:] * signs[:, :-1] < 0, axis=1)
    return bool(np.all((flips >= 0.8) | (np.max(np.abs(seg), axis=1) == 0)))


def _fourier_tail(f, a, cfg, half, sing, comps_dtype, max_panels=4096, batch=32):
    """Sum of half-period panel integrals from a, accelerated by Wynn epsilon."""
    sums: list[np.ndarray] = []
    running = None
    err_panels = None
    evals = 0
    k0 = 0
    window = 60
    if sing > 0:
        first = _finite(f, a, a + half, cfg, sing, 0.0, None, False)
        running = np.atleast_1d(np.asarray(first.value)).astype(comps_dtype)
        err_panels = np.atleast_1d(np.asarray(first.error_estimate, dtype=float))
        sums.append(running.copy())
        evals += first.evaluations
        k0 = 1
    while True:
        edges = a + half * np.arange(k0, k0 + batch + 1, dtype=float)
        scale = 0.0 if running is None else float(np.max(np.abs(running)))
        abs_b = max(cfg.abs_tol, 0.1 * cfg.rel_tol * scale)
        _, err, ev, seg, seg_err = _adaptive(f, edges, cfg.rel_tol, abs_b, cfg.max_subdivisions)
        evals += ev
        if running is None:
            running = np.zeros(seg.shape[0], dtype=np.result_type(seg.dtype, comps_dtype))
            err_panels = np.zeros(seg.shape[0])
        csum = running[:, None] + np.cumsum(seg, axis=1)
        sums.extend(csum.T)
        running = csum[:, -1].copy()
        err_panels = err_panels + seg_err.sum(axis=1)
        k0 += batch
        ok = _alternates(seg.real) and (not np.iscomplexobj(seg) or _alternates(seg.imag))
        if not ok:
            # The terms are not sign-alternating, so a non-oscillatory part
            # dominates and epsilon acceleration is unreliable; sum whole
            # periods instead and extrapolate with the Levin u-transform.
            return _levin_tail(f, a, cfg, half, k0, running, err_panels, evals)
        seq = np.array(sums[-window:])
        est = np.empty(seq.shape[1], dtype=seq.dtype)
        werr = np.empty(seq.shape[1])
        for c in range(seq.shape[1]):
            est[c], werr[c] = wynn_epsilon(seq[:, c])
        tol = np.maximum(cfg.rel_tol * np.abs(est), cfg.abs_tol)
        tiny_terms = np.max(np.abs(seg), axis=1) <= 1e-3 * tol
        if np.all((werr <= tol) | tiny_terms):
            err_total = np.where(tiny_terms & (werr > tol), 0.0, werr) + err_panels
            est = np.where(tiny_terms & (werr > tol), running, est)
            return est, err_total, evals
        if k0 >= max_panels:
            raise NonConvergent(
                f"oscillatory tail not converged after {k0} half-periods (error {np.max(werr):.3e})",
                result=_pack(est, werr + err_panels, evals),
            )


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    cfg: QuadConfig | None = None,
    *,
    singularity: float = 0.0,
    envelope: Envelope | None = None,
    period: float | None = None,
    breakpoints: Sequence[float] | None = None,
) -> QuadResult:
    """Integrate ``f`` over (a, inf).

    Plain mode maps (a + 1, inf) onto [0, 1) by x = a + 1 + t/(1 - t); when a
    decay envelope is declared the range is truncated where the envelope's
    tail drops below abs_tol/10 and that tail bound is added to the error.
    Fourier mode (``cfg.oscillation_mode == "fourier"`` and a ``period``)
    integrates half-period panels and accelerates their partial sums.
    """
    cfg = _check_cfg(cfg)
    a = float(a)
    if not math.isfinite(a):
        raise InvalidInterval(f"lower limit must be finite, got {a}")
    if envelope is not None:
        _check_envelope(f, envelope, a)
    is_scalar = _scalar_output(f, a + 1.0)
    probe = np.asarray(f(np.array([a + 1.0])))
    dtype = np.result_type(probe.dtype, float)

    if cfg.oscillation_mode == "fourier":
        if period is None or not period > 0:
            raise ParameterError("fourier mode needs a positive period")
        val, err, ev = _fourier_tail(f, a, cfg, 0.5 * period, singularity, dtype)
        return _pack(val, err, ev, scalar=is_scalar)

    head_end = a + 1.0
    head = _finite(f, a, head_end, cfg, singularity, 0.0,
                   [x for x in (breakpoints or ()) if a < x < head_end], False)
    tail_bound = 0.0
    t_max = 1.0
    if envelope is not None:
        target = 0.1 * (cfg.abs_tol if cfg.abs_tol > 0 else cfg.rel_tol * 1e-3)
        x_cut = max(envelope.cutoff(target), head_end)
        span = x_cut - head_end
        if span < 1e15:
            t_max = span / (1.0 + span)
            tail_bound = envelope.tail(x_cut)

    def mapped(t):
        one_minus = 1.0 - t
        return np.asarray(f(head_end + t / one_minus)) / (one_minus * one_minus)

    knots = sorted({(x - head_end) / (1.0 + x - head_end) for x in (breakpoints or ()) if x > head_end})
    knots = [k for k in knots if 0 < k < t_max]
    if t_max <= 0:
        val, err, ev = np.asarray(head.value), np.asarray(head.error_estimate), head.evaluations
        return _pack(np.atleast_1d(val), np.atleast_1d(err) + tail_bound, ev, scalar=is_scalar)
    edges = np.array([0.0] + knots + [t_max])
    val, err, ev, _, _ = _adaptive(mapped, edges, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    total = np.atleast_1d(np.asarray(head.value)) + val
    total_err = np.atleast_1d(np.asarray(head.error_estimate)) + err + tail_bound
    return _pack(total, total_err, head.evaluations + ev, scalar=is_scalar)


def integrate_power_tail(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    decay: float,
    cfg: QuadConfig | None = None,
) -> QuadResult:
    """Integrate ``f`` over (a, inf) when f(x) behaves like x**(-decay), decay > 1.

    The substitution x = a * tau**(-1/(decay - 1)) turns the leading power into
    a constant on tau in (0, 1], so slowly decaying tails (decay close to 1)
    do not produce an endpoint singularity in the mapped integrand.
    """
    cfg = _check_cfg(cfg)
    a = float(a)
    if not (a > 0 and math.isfinite(a)):
        raise InvalidInterval(f"power tail needs a finite a > 0, got {a}")
    if not decay > 1:
        raise ParameterError(f"decay must exceed 1, got {decay}")
    q = 1.0 / (decay - 1.0)

    def mapped(tau):
        x = a * tau ** (-q)
        out = np.asarray(f(x)) * (a * q) * tau ** (-q - 1.0)
        return np.where(tau > 0, out, 0.0) if out.ndim == 1 else out

    return integrate(mapped, 0.0, 1.0, cfg)


def integrate_oscillatory(
    g: Callable[[np.ndarray], np.ndarray],
    lam: float,
    cfg: QuadConfig | None = None,
    *,
    envelope: Envelope | None = None,
) -> OscillatoryResult:
    """Cosine and sine parts of the integral of g(t) exp(i lam t) over the real line.

    For lam != 0 both half-lines are summed over half-periods pi/|lam|; for
    lam == 0 the plain semi-infinite rule is used on each half-line.
    """
    cfg = _check_cfg(cfg)
    lam = float(lam)
    if lam == 0.0:
        plain = cfg.replace(oscillation_mode="plain")
        r_pos = integrate_semi_infinite(g, 0.0, plain, envelope=envelope)
        r_neg = integrate_semi_infinite(lambda t: g(-t), 0.0, plain, envelope=envelope)
        real = QuadResult(r_pos.value + r_neg.value, r_pos.error_estimate + r_neg.error_estimate,
                          r_pos.evaluations + r_neg.evaluations)
        return OscillatoryResult(real, QuadResult(0.0, 0.0, 1))
    if envelope is not None:
        _check_envelope(g, envelope, 0.0)
        _check_envelope(lambda t: g(-t), envelope, 0.0)
    period = 2.0 * math.pi / abs(lam)
    fourier = cfg.replace(oscillation_mode="fourier")

    def cos_part(t):
        return (np.asarray(g(t)) + np.asarray(g(-t))) * np.cos(lam * t)

    def sin_part(t):
        return (np.asarray(g(t)) - np.asarray(g(-t))) * np.sin(lam * t)

    return OscillatoryResult(
        integrate_semi_infinite(cos_part, 0.0, fourier, period=period),
        integrate_semi_infinite(sin_part, 0.0, fourier, period=period),
    )
