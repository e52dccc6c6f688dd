"""The fractional Stein operator for S_alpha(1, beta) and the Stein-equation solution.

Three equivalent forms of the operator are evaluated independently:

* ``op_definition``: d_alpha int (phi(x+u) - phi(x) - u phi'(x)) w(u) / (2|u|^(1+alpha)) du,
* ``op_representation_1``: (d_alpha/alpha) int_0^inf [(1+beta)(phi'(x+u) - phi'(x))
  - (1-beta)(phi'(x-u) - phi'(x))] / (2 u^alpha) du,
* ``op_representation_scaled``: the same integral written in the variable u/a.

with w(u) = (1+beta) on u > 0 and (1-beta) on u < 0.  Near u = 0 the
differences are rewritten as averages of phi'' (Gauss-Legendre in the
mean-value parameter) so no cancellation occurs; beyond the split the linear
asymptote or the period of the test function is used to treat the tail.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quad
from .errors import (
    InvalidTestFunction,
    LipschitzBoundMissing,
    NonPositiveScale,
    ParameterError,
)
from .stable import DensityTable, StableParams, d_alpha

OP_CFG = quad.QuadConfig(rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=4000)
_FOURIER = "fourier"

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)
_GL_S = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS
_GL_W_TAYLOR = _GL_W * (1.0 - _GL_S)

_PROBE = np.linspace(-50.0, 50.0, 1000)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A C^2 function with declared sup bounds on phi' and phi''.

    Exactly one tail description is used by the operator quadrature:
    ``period`` for periodic functions, or ``asymptotes = (s_minus, c_minus,
    s_plus, c_plus)`` meaning phi(x) - (s x + c) -> 0 as x -> -inf / +inf.
    Without either, tails are integrated as they come (fine for decaying phi').
    """

    __test__ = False  # not a pytest class

    phi: Callable
    phi_prime: Callable
    phi_second: Callable
    sup_phi_prime: float
    sup_phi_second: float
    period: float | None = None
    asymptotes: tuple | None = None
    name: str = "phi"

    def __post_init__(self):
        for label in ("sup_phi_prime", "sup_phi_second"):
            v = getattr(self, label)
            if v is None or not (float(v) >= 0 and math.isfinite(float(v))):
                raise InvalidTestFunction(f"{label} must be a finite nonnegative number, got {v!r}")
        if self.period is not None and not self.period > 0:
            raise InvalidTestFunction(f"period must be positive, got {self.period}")
        d1 = np.abs(np.asarray(self.phi_prime(_PROBE), dtype=float))
        d2 = np.abs(np.asarray(self.phi_second(_PROBE), dtype=float))
        slack = 1e-9
        if np.any(~np.isfinite(d1)) or np.max(d1) > self.sup_phi_prime * (1 + slack) + slack:
            raise InvalidTestFunction(
                f"{self.name}: declared sup|phi'| = {self.sup_phi_prime} is below the probed {np.max(d1):.6g}")
        if np.any(~np.isfinite(d2)) or np.max(d2) > self.sup_phi_second * (1 + slack) + slack:
            raise InvalidTestFunction(
                f"{self.name}: declared sup|phi''| = {self.sup_phi_second} is below the probed {np.max(d2):.6g}")

    def scaled(self, c: float) -> "TestFunction":
        c = float(c)
        asym = None if self.asymptotes is None else tuple(c * v for v in self.asymptotes)
        return TestFunction(lambda x: c * self.phi(x), lambda x: c * self.phi_prime(x),
                            lambda x: c * self.phi_second(x), abs(c) * self.sup_phi_prime,
                            abs(c) * self.sup_phi_second, self.period, asym, f"{c}*{self.name}")

    def shifted(self, const: float) -> "TestFunction":
        """phi + const (the operator ignores constants)."""
        asym = None
        if self.asymptotes is not None:
            sm, cm, sp, cp = self.asymptotes
            asym = (sm, cm + const, sp, cp + const)
        return TestFunction(lambda x: self.phi(x) + const, self.phi_prime, self.phi_second,
                            self.sup_phi_prime, self.sup_phi_second, self.period, asym,
                            f"{self.name}+{const}")

    def reflected(self) -> "TestFunction":
        """x -> phi(-x)."""
        asym = None
        if self.asymptotes is not None:
            sm, cm, sp, cp = self.asymptotes
            asym = (-sp, cp, -sm, cm)
        return TestFunction(lambda x: self.phi(-np.asarray(x)), lambda x: -self.phi_prime(-np.asarray(x)),
                            lambda x: self.phi_second(-np.asarray(x)), self.sup_phi_prime,
                            self.sup_phi_second, self.period, asym, f"{self.name}(-x)")


def combine(c1: float, f1: TestFunction, c2: float, f2: TestFunction) -> TestFunction:
    """c1 f1 + c2 f2; both must share a tail description (same period or both asymptotic)."""
    if f1.period is not None or f2.period is not None:
        if f1.period != f2.period:
            raise InvalidTestFunction("combined test functions must share the same period")
        asym = None
    elif f1.asymptotes is not None and f2.asymptotes is not None:
        asym = tuple(c1 * u + c2 * v for u, v in zip(f1.asymptotes, f2.asymptotes))
    else:
        asym = None
    return TestFunction(
        lambda x: c1 * f1.phi(x) + c2 * f2.phi(x),
        lambda x: c1 * f1.phi_prime(x) + c2 * f2.phi_prime(x),
        lambda x: c1 * f1.phi_second(x) + c2 * f2.phi_second(x),
        abs(c1) * f1.sup_phi_prime + abs(c2) * f2.sup_phi_prime,
        abs(c1) * f1.sup_phi_second + abs(c2) * f2.sup_phi_second,
        f1.period, asym, f"{c1}*{f1.name}+{c2}*{f2.name}")


def sine() -> TestFunction:
    return TestFunction(np.sin, np.cos, lambda x: -np.sin(x), 1.0, 1.0, period=2 * math.pi, name="sin")


def cosine() -> TestFunction:
    return TestFunction(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), 1.0, 1.0,
                        period=2 * math.pi, name="cos")


def gaussian_bump() -> TestFunction:
    def phi(x):
        return np.exp(-0.5 * np.asarray(x) ** 2)

    def d1(x):
        x = np.asarray(x)
        return -x * np.exp(-0.5 * x**2)

    def d2(x):
        x = np.asarray(x)
        return (x**2 - 1.0) * np.exp(-0.5 * x**2)

    return TestFunction(phi, d1, d2, math.exp(-0.5), 1.0, asymptotes=(0.0, 0.0, 0.0, 0.0), name="bump")


def smoothed_ramp() -> TestFunction:
    """log cosh x: phi' = tanh, phi'' = sech^2, asymptotic to |x| - log 2."""
    def phi(x):
        x = np.abs(np.asarray(x, dtype=float))
        return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)

    def d2(x):
        return 1.0 / np.cosh(np.asarray(x, dtype=float)) ** 2

    ln2 = math.log(2.0)
    return TestFunction(phi, np.tanh, d2, 1.0, 1.0, asymptotes=(-1.0, -ln2, 1.0, -ln2), name="ramp")


def affine(slope: float, intercept: float) -> TestFunction:
    def phi(x):
        return slope * np.asarray(x, dtype=float) + intercept

    def d1(x):
        return np.full(np.shape(x), float(slope))

    def d2(x):
        return np.zeros(np.shape(x))

    return TestFunction(phi, d1, d2, abs(slope), 0.0,
                        asymptotes=(slope, intercept, slope, intercept), name="affine")


# ---------------------------------------------------------------------------
# operator


def _weights(params: StableParams):
    return 1.0 + params.beta, 1.0 - params.beta


def _tail_cfg(cfg, periodic):
    return cfg.replace(oscillation_mode=_FOURIER) if periodic else cfg.replace(oscillation_mode="plain")


def _first_order_half(f: TestFunction, x: float, side: int, a: float, alpha: float, cfg):
    """int_0^inf (phi'(x + side a u) - phi'(x)) / u^alpha du and its error estimate."""
    d0 = float(f.phi_prime(np.array([x]))[0])
    delta = min(1.0, 1.0 / a)
    upper = 1.0 / a

    def near(u):
        pts = x + side * a * np.multiply.outer(_GL_S, u)
        return side * a * (_GL_W @ f.phi_second(pts)) * u ** (1.0 - alpha)

    res = quad.integrate(near, 0.0, delta, cfg, singularity=alpha - 1.0)
    value, err = res.value, res.error_estimate
    if upper > delta:
        mid = quad.integrate(lambda u: (f.phi_prime(x + side * a * u) - d0) / u**alpha, delta, upper, cfg)
        value += mid.value
        err += mid.error_estimate
    tail_const = upper ** (1.0 - alpha) / (alpha - 1.0)
    if f.period is not None:
        tail = quad.integrate_semi_infinite(lambda u: f.phi_prime(x + side * a * u) / u**alpha, upper,
                                            _tail_cfg(cfg, True), period=f.period / a)
        value += tail.value - d0 * tail_const
    elif f.asymptotes is not None:
        s = f.asymptotes[2] if side > 0 else f.asymptotes[0]
        tail = quad.integrate_semi_infinite(lambda u: (f.phi_prime(x + side * a * u) - s) / u**alpha,
                                            upper, _tail_cfg(cfg, False))
        value += tail.value + (s - d0) * tail_const
    else:
        tail = quad.integrate_semi_infinite(lambda u: (f.phi_prime(x + side * a * u) - d0) / u**alpha,
                                            upper, _tail_cfg(cfg, False))
        value += tail.value
    return value, err + tail.error_estimate


def _second_order_half(f: TestFunction, x: float, side: int, alpha: float, cfg):
    """int_0^inf (phi(x + side u) - phi(x) - side u phi'(x)) / u^(1+alpha) du."""
    p0 = float(f.phi(np.array([x]))[0])
    d0 = float(f.phi_prime(np.array([x]))[0])

    def near(u):
        pts = x + side * np.multiply.outer(_GL_S, u)
        return (_GL_W_TAYLOR @ f.phi_second(pts)) * u ** (1.0 - alpha)

    res = quad.integrate(near, 0.0, 1.0, cfg, singularity=alpha - 1.0)
    value, err = res.value, res.error_estimate
    if f.period is not None:
        tail = quad.integrate_semi_infinite(lambda u: f.phi(x + side * u) / u ** (1.0 + alpha), 1.0,
                                            _tail_cfg(cfg, True), period=f.period)
        value += tail.value - p0 / alpha - side * d0 / (alpha - 1.0)
    elif f.asymptotes is not None:
        if side > 0:
            s, c = f.asymptotes[2], f.asymptotes[3]
        else:
            s, c = f.asymptotes[0], f.asymptotes[1]
        tail = quad.integrate_semi_infinite(
            lambda u: (f.phi(x + side * u) - s * (x + side * u) - c) / u ** (1.0 + alpha), 1.0,
            _tail_cfg(cfg, False))
        value += tail.value + (s * x + c - p0) / alpha + side * (s - d0) / (alpha - 1.0)
    else:
        tail = quad.integrate_semi_infinite(
            lambda u: (f.phi(x + side * u) - p0 - side * u * d0) / u ** (1.0 + alpha), 1.0,
            _tail_cfg(cfg, False))
        value += tail.value
    return value, err + tail.error_estimate


def _definition(phi, params, x, cfg):
    alpha = params.alpha
    wp, wm = _weights(params)
    d = d_alpha(alpha)
    val, err = 0.0, 0.0
    for side, w in ((1, wp), (-1, wm)):
        if w == 0:
            continue
        v, e = _second_order_half(phi, float(x), side, alpha, cfg)
        val += w * v
        err += w * e
    return 0.5 * d * val, 0.5 * d * err


def _scaled(phi, params, x, a, cfg):
    alpha = params.alpha
    wp, wm = _weights(params)
    d = d_alpha(alpha)
    val, err = 0.0, 0.0
    for side, w in ((1, wp), (-1, -wm)):
        if w == 0:
            continue
        v, e = _first_order_half(phi, float(x), side, a, alpha, cfg)
        val += w * v
        err += abs(w) * e
    factor = a ** (1.0 - alpha) * d / (2.0 * alpha)
    return factor * val, factor * err


def op_definition(phi: TestFunction, params: StableParams, x: float, cfg: quad.QuadConfig | None = None) -> float:
    """The operator from its defining singular integral."""
    return _definition(phi, params, x, cfg or OP_CFG)[0]


def op_representation_1(phi: TestFunction, params: StableParams, x: float,
                        cfg: quad.QuadConfig | None = None) -> float:
    """The operator as a half-line integral of first differences of phi'."""
    return _scaled(phi, params, x, 1.0, cfg or OP_CFG)[0]


def op_representation_scaled(phi: TestFunction, params: StableParams, x: float, a: float,
                             cfg: quad.QuadConfig | None = None) -> float:
    """The operator written with the dilated increment phi'(x + a u); independent of a > 0."""
    a = float(a)
    if not (a > 0 and math.isfinite(a)):
        raise NonPositiveScale(f"scale a must be positive, got {a}")
    return _scaled(phi, params, x, a, cfg or OP_CFG)[0]


# ---------------------------------------------------------------------------
# Hoelder certificate


@dataclass(frozen=True)
class HolderCertificate:
    lhs: float
    rhs: float
    lhs_error: float
    passed: bool


def holder_constant(params: StableParams, sup_phi_second: float) -> float:
    a = params.alpha
    return 4.0 * d_alpha(a) * sup_phi_second / (a * (2.0 - a) * (a - 1.0))


def holder_certificate(phi: TestFunction, params: StableParams, x: float, y: float,
                       cfg: quad.QuadConfig | None = None) -> HolderCertificate:
    """Both sides of |L phi(x) - L phi(y)| <= C ||phi''|| |x - y|^(2 - alpha)."""
    if x == y:
        raise ParameterError("holder_certificate needs x != y")
    cfg = cfg or OP_CFG
    vx, ex = _scaled(phi, params, x, 1.0, cfg)
    vy, ey = _scaled(phi, params, y, 1.0, cfg)
    lhs = abs(vx - vy)
    rhs = holder_constant(params, phi.sup_phi_second) * abs(x - y) ** (2.0 - params.alpha)
    # pass if the inequality holds up to the quadrature error of the left side
    return HolderCertificate(lhs, rhs, ex + ey, lhs <= rhs + ex + ey)


# ---------------------------------------------------------------------------
# h_lambda solution


@functools.lru_cache(maxsize=64)
def fractional_kernel(alpha: float) -> complex:
    """K = int_0^inf (e^{iv} - 1) v^-alpha dv by quadrature."""
    cfg = quad.QuadConfig(rel_tol=1e-12, abs_tol=1e-14, max_subdivisions=4000)

    def head(v):
        return (np.expm1(1j * v)) / v**alpha

    h = quad.integrate(head, 0.0, 1.0, cfg, singularity=alpha - 1.0)
    t = quad.integrate_semi_infinite(lambda v: np.exp(1j * v) / v**alpha, 1.0,
                                     cfg.replace(oscillation_mode=_FOURIER), period=2 * math.pi)
    return complex(h.value + t.value - 1.0 / (alpha - 1.0))


@dataclass(frozen=True)
class SteinSolutionHLambda:
    """phi_{h_lambda} for h_lambda' = exp(i lambda x), target S_alpha(1, beta)."""

    lam: float
    params: StableParams

    def __post_init__(self):
        lam = float(self.lam)
        if lam == 0 or not math.isfinite(lam):
            raise ParameterError(f"lambda must be a nonzero finite number, got {self.lam}")
        if self.params.sigma != 1.0:
            raise ParameterError("the Stein solution is built for sigma = 1")
        object.__setattr__(self, "lam", lam)

    @property
    def skew_factor(self) -> complex:
        return 1.0 - 1j * self.params.beta * math.copysign(1.0, self.lam) * self.params.tan_half

    def _kernel(self, s, x):
        a = self.params.alpha
        lam = self.lam
        return np.exp(1j * lam * np.multiply.outer(x, s)
                      - abs(lam) ** a * (1.0 - s**a) * self.skew_factor)

    def _s_integral(self, x, weight, cfg):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        res = quad.integrate(lambda s: self._kernel(s, x) * weight(s), 0.0, 1.0, cfg)
        return np.asarray(res.value), np.asarray(res.error_estimate)

    def deriv(self, x, cfg: quad.QuadConfig | None = None):
        """phi'_{h_lambda}(x) = -alpha int_0^1 exp(i lam s x - |lam|^alpha (1 - s^alpha) c) ds."""
        a = self.params.alpha
        v, _ = self._s_integral(x, lambda s: np.ones_like(s), cfg or OP_CFG)
        out = -a * v
        return out if np.ndim(x) else complex(out[0])

    def deriv2(self, x, cfg: quad.QuadConfig | None = None):
        a = self.params.alpha
        v, _ = self._s_integral(x, lambda s: 1j * self.lam * s, cfg or OP_CFG)
        out = -a * v
        return out if np.ndim(x) else complex(out[0])

    def h_centered(self, x):
        """h_lambda(x) - mu(h_lambda)."""
        a = self.params.alpha
        x = np.asarray(x, dtype=float)
        out = (np.exp(1j * self.lam * x) - np.exp(-abs(self.lam) ** a * self.skew_factor)) / (1j * self.lam)
        return out if out.ndim else complex(out)

    def operator(self, x, cfg: quad.QuadConfig | None = None):
        """L phi_{h_lambda}(x), exchanging the u- and s-integrals.

        phi'(x+u) - phi'(x) = -alpha int_0^1 E(s)(e^{i lam s u} - 1) ds, and
        int_0^inf (e^{i lam s u} - 1) u^-alpha du = (|lam| s)^(alpha-1) K(sign lam), so
        L phi(x) = -(d/2)|lam|^(alpha-1) M int_0^1 E(s) s^(alpha-1) ds with
        M = (1+beta) K(sign) - (1-beta) K(-sign).
        """
        a = self.params.alpha
        b = self.params.beta
        k = fractional_kernel(a)
        if self.lam < 0:
            k = k.conjugate()
        m = (1.0 + b) * k - (1.0 - b) * k.conjugate()
        v, _ = self._s_integral(x, lambda s: s ** (a - 1.0), cfg or OP_CFG)
        out = -0.5 * d_alpha(a) * abs(self.lam) ** (a - 1.0) * m * v
        return out if np.ndim(x) else complex(out[0])

    def operator_direct(self, x: float, cutoff: float = 200.0, cfg: quad.QuadConfig | None = None) -> complex:
        """L phi_{h_lambda}(x) by the first-difference integral with phi' evaluated numerically.

        The u-range is truncated at ``cutoff``; the constant -phi'(x) part of the
        tail is added exactly, the oscillating part is dropped (it is
        O(cutoff^-alpha / |lambda|)).  Slow; used only as a cross-check.
        """
        cfg = cfg or quad.QuadConfig(rel_tol=1e-8, abs_tol=1e-10, max_subdivisions=4000)
        a = self.params.alpha
        wp, wm = _weights(self.params)
        d0 = self.deriv(float(x))
        total = 0.0 + 0.0j
        for side, w in ((1, wp), (-1, -wm)):
            if w == 0:
                continue

            def near(u, side=side):
                pts = x + side * np.multiply.outer(_GL_S, u)
                d2 = self.deriv2(pts.ravel()).reshape(pts.shape)
                return side * (_GL_W @ d2) * u ** (1.0 - a)

            def far(u, side=side):
                return (self.deriv(x + side * np.asarray(u)) - d0) / u**a

            near_v = quad.integrate(near, 0.0, 1.0, cfg, singularity=a - 1.0).value
            far_v = quad.integrate(far, 1.0, cutoff, cfg).value
            tail = -d0 * cutoff ** (1.0 - a) / (a - 1.0)
            total += w * (near_v + far_v + tail)
        return complex(d_alpha(a) / (2.0 * a) * total)


def stein_solution_deriv_hlambda(s: SteinSolutionHLambda, x):
    return s.deriv(x)


def stein_residual(s: SteinSolutionHLambda, x, cfg: quad.QuadConfig | None = None):
    """L phi(x) - (x/alpha) phi'(x) - (h(x) - mu(h)); zero up to quadrature error."""
    x_arr = np.asarray(x, dtype=float)
    out = s.operator(x_arr, cfg) - x_arr / s.params.alpha * s.deriv(x_arr, cfg) - s.h_centered(x_arr)
    return out if np.ndim(out) else complex(out)


# ---------------------------------------------------------------------------
# generic Lipschitz h


@dataclass(frozen=True)
class _Expectation:
    """E h(sigma Z + m) through h' and the tail functions of Z."""

    h: Callable
    h_prime: Callable
    period: float | None
    table: DensityTable
    cfg: quad.QuadConfig

    def __call__(self, sigma: float, m: float) -> tuple[float, float]:
        if sigma == 0.0:
            return float(self.h(np.array([m]))[0]), 0.0
        tab = self.table
        if self.period is not None:
            tcfg = _tail_cfg(self.cfg, True)
            per = self.period / sigma
            up = quad.integrate_semi_infinite(lambda z: self.h_prime(m + sigma * z) * tab.sf(z), 0.0,
                                              tcfg, period=per)
            lo = quad.integrate_semi_infinite(lambda z: self.h_prime(m - sigma * z) * tab.cdf(-z), 0.0,
                                              tcfg, period=per)
            up_v, lo_v = up.value, lo.value
            err = up.error_estimate + lo.error_estimate
        else:
            amp_left, amp_right = tab.tail_closure
            up_v, e1 = self._side(lambda z: self.h_prime(m + sigma * z), tab.sf, tab.tail_cut[1], amp_right)
            lo_v, e2 = self._side(lambda z: self.h_prime(m - sigma * z), lambda z: tab.cdf(-z),
                                  -tab.tail_cut[0], amp_left)
            err = e1 + e2
        value = float(self.h(np.array([m]))[0]) + sigma * (up_v - lo_v)
        return value, sigma * err

    def _side(self, hp, tail_fn, cut, amp):
        """int_0^inf hp(z) tail_fn(z) dz with tail_fn = amp z^-alpha beyond the cut.

        Beyond the cut z = cut tau^(-1/(alpha-1)) makes the integrand
        amp cut^(1-alpha)/(alpha-1) hp(z(tau)) on tau in (0, 1], which is bounded.
        """
        alpha = self.table.params.alpha
        knots = [2.0**k for k in range(-4, 64) if 2.0**k < cut]
        head = quad.integrate(lambda z: hp(z) * tail_fn(z), 0.0, cut, self.cfg, breakpoints=knots)
        if amp == 0.0:
            return head.value, head.error_estimate
        q = 1.0 / (alpha - 1.0)
        const = amp * cut ** (1.0 - alpha) / (alpha - 1.0)
        tail = quad.integrate(lambda tau: const * hp(cut * tau ** (-q)), 0.0, 1.0, self.cfg)
        return head.value + tail.value, head.error_estimate + tail.error_estimate


def _numeric_derivative(h):
    def d(y):
        y = np.asarray(y, dtype=float)
        step = 1e-6 * (1.0 + np.abs(y))
        return (h(y + step) - h(y - step)) / (2.0 * step)
    return d


def stein_solution_generic(h: Callable, table: DensityTable, x: float, *, lipschitz: float | None = None,
                           h_prime: Callable | None = None, period: float | None = None,
                           cfg: quad.QuadConfig | None = None) -> float:
    """phi_h(x) = -int_0^inf (E h(s_t Z + e^{-t/alpha} x) - mu(h)) dt, s_t = (1 - e^{-t})^(1/alpha).

    The inner expectations are written as h(m) + int h' * (tail function of
    Z) so heavy tails converge; ``period`` marks periodic h' (oscillatory
    tails are then summed by half-periods).  The t-range is truncated at
    T = alpha log(alpha L (|x| + E|Z| + 1) / abs_tol), beyond which the
    integrand is below L(|x| e^{-t/alpha} + E|Z| e^{-t}) and the neglected
    part is below abs_tol.
    """
    if lipschitz is None:
        raise LipschitzBoundMissing("stein_solution_generic needs the Lipschitz constant of h")
    if table.params.sigma != 1.0:
        raise ParameterError("stein_solution_generic needs a sigma = 1 table")
    cfg = cfg or quad.QuadConfig(rel_tol=1e-8, abs_tol=1e-9, max_subdivisions=4000)
    inner_cfg = cfg.replace(rel_tol=cfg.rel_tol * 0.1, abs_tol=cfg.abs_tol * 0.1)
    alpha = table.params.alpha
    lip = float(lipschitz)
    if lip == 0.0:
        return 0.0
    ex = _Expectation(h, h_prime or _numeric_derivative(h), period, table, inner_cfg)
    mu, _ = ex(1.0, 0.0)
    mean_abs = table.mean_abs()
    T = alpha * math.log(max(alpha * lip * (abs(x) + mean_abs + 1.0) / cfg.abs_tol, math.e))

    def g(t):
        out = np.empty_like(t)
        for k, tk in enumerate(t):
            sig = (-math.expm1(-tk)) ** (1.0 / alpha)
            out[k] = ex(sig, math.exp(-tk / alpha) * x)[0] - mu
        return out

    res = quad.integrate(g, 0.0, T, cfg)
    return -float(res.value)


def solution_derivative_bounds(params: StableParams, sup_h_prime: float = 1.0) -> tuple[float, float]:
    """(alpha ||h'||, eta ||h'||): the sup bounds on phi_h' and phi_h''."""
    from .stable import eta
    return params.alpha * sup_h_prime, eta(params.standard()) * sup_h_prime
