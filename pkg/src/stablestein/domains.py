"""Entry laws in the domain of normal attraction of a stable law.

A law is described by its tail amplitude: for |x| >= c (the cutoff, 1 or e)

    P(X > x)  = (1 + beta) (A + eps(x)) / x**alpha,
    P(X <= -x) = (1 - beta) (A + eps(-x)) / x**alpha,

and no mass lies in (-c, c).  The families are

* ``pareto``   eps = 0 beyond the cutoff,
* ``twopower`` A x**-alpha + A2 x**-alpha2 with A + A2 = 1/2,
* ``trig``     x**-alpha (A + B sin x / x) with A + B sin 1 = 1/2,
* ``logtail``  x**-alpha (A + D / log x) for x >= e with A + D = e**alpha / 2,
* ``custom``   a user-supplied eps,

plus ``slowvary``: the symmetric law with density proportional to
log|x| / |x|**(alpha + 1) on |x| >= e, which is attracted only after a
logarithmic correction of the normalization.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import quad
from .errors import (
    InvalidFamilyParams,
    InversionFailure,
    NoConvergence,
    ParameterError,
    UnknownFamily,
)
from .stable import StableParams, d_alpha, sigma_from_A

__all__ = [
    "FAMILIES",
    "NormalAttractionLaw",
    "SlowVaryLaw",
    "Moments",
    "make_example",
    "custom_law",
    "law_from_spec",
    "law_spec",
    "cdf",
    "tail_upper",
    "tail_lower",
    "sample",
    "draws_from_uniforms",
    "moments",
    "gamma_n_solve",
    "epsilon_integral",
    "epsilon_sup",
]

FAMILIES = ("pareto", "twopower", "trig", "logtail", "custom", "slowvary")
_ALIASES = {"example1": "pareto", "example2": "twopower", "example3": "trig",
            "example4": "logtail", "example5": "slowvary", "trigtail": "trig"}

MOMENT_CFG = quad.QuadConfig(rel_tol=1e-10, abs_tol=1e-13, max_subdivisions=20000)
_FOURIER_CFG = MOMENT_CFG.replace(oscillation_mode="fourier")
# audit tolerances: relative slack on |eps| <= K |x|**-gamma, and on the
# tail-mass balance at the cutoff
_AUDIT_REL = 1e-9
_MASS_TOL = 1e-10


def _probe_grid(cutoff: float) -> np.ndarray:
    near = np.linspace(cutoff, cutoff + 200.0, 200001)
    far = np.geomspace(cutoff + 200.0, 1e9, 20001)
    return np.concatenate([near, far[1:]])


# ---------------------------------------------------------------------------
# eps of each family as a value-comparable callable


@dataclass(frozen=True)
class _FamilyEpsilon:
    tag: str
    alpha: float
    params: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        p = dict(self.params)
        A = p["A"]
        if self.tag == "pareto":
            return np.where(ax < 1.0, -A, 0.0)
        if self.tag == "twopower":
            with np.errstate(divide="ignore", over="ignore"):
                outer = p["A_tilde"] * ax ** (self.alpha - p["alpha_tilde"])
            return np.where(ax < 1.0, -A, outer)
        if self.tag == "trig":
            with np.errstate(divide="ignore", invalid="ignore"):
                outer = p["B"] * np.sin(ax) / ax
            return np.where(ax < 1.0, -A, outer)
        if self.tag == "logtail":
            with np.errstate(divide="ignore", invalid="ignore"):
                outer = p["D"] / np.log(ax)
            return np.where(ax < math.e, -A, outer)
        raise UnknownFamily(self.tag)


@dataclass(frozen=True)
class NormalAttractionLaw:
    """Law whose tails are (1 +- beta)(A + eps(x))/|x|**alpha beyond ``cutoff``.

    ``K`` and ``gamma`` bound the perturbation: |eps(x)| <= K / |x|**gamma.
    Construction runs the eps-bound and CDF audits.
    """

    alpha: float
    A: float
    beta: float
    epsilon: Callable
    K: float
    gamma: float
    family_tag: str
    cutoff: float = 1.0
    family_params: tuple = ()
    ultimately_monotone: bool = False

    def __post_init__(self):
        target = StableParams(self.alpha, 1.0, self.beta)
        object.__setattr__(self, "alpha", target.alpha)
        object.__setattr__(self, "beta", target.beta)
        for name in ("A", "K", "gamma", "cutoff"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.A > 0 and math.isfinite(self.A)):
            raise InvalidFamilyParams(f"A must be positive, got {self.A}")
        if not self.K >= 0:
            raise InvalidFamilyParams(f"K must be >= 0, got {self.K}")
        if not self.gamma >= 0:
            raise InvalidFamilyParams(f"gamma must be >= 0, got {self.gamma}")
        if not self.cutoff > 0:
            raise InvalidFamilyParams(f"cutoff must be positive, got {self.cutoff}")
        if self.family_tag not in FAMILIES[:-1]:
            raise UnknownFamily(f"unknown family {self.family_tag!r}")
        _audit(self)

    # -- derived quantities
    @property
    def params(self) -> dict:
        return dict(self.family_params)

    @property
    def target(self) -> StableParams:
        return StableParams(self.alpha, 1.0, self.beta)

    @property
    def sigma(self) -> float:
        """Scale such that n**(-1/alpha)(S_n - n EX)/sigma -> S_alpha(1, beta)."""
        return sigma_from_A(self.alpha, self.A)

    @property
    def period(self) -> float | None:
        return 2.0 * math.pi if self.family_tag == "trig" else None

    def eps(self, x):
        out = np.asarray(self.epsilon(np.asarray(x, dtype=float)), dtype=float)
        return np.broadcast_to(out, np.shape(x)).copy() if out.shape != np.shape(x) else out

    # -- tails beyond the cutoff; side=+1 is P(X > x), side=-1 is P(X <= -x)
    def amplitude(self, x, side: int = 1, part: str = "all"):
        """(A + eps(side*x)) / x**alpha for x >= cutoff, or one additive part of it.

        ``part="smooth"`` drops the oscillating term of the trig family,
        ``part="osc"`` keeps only that term.
        """
        x = np.asarray(x, dtype=float)
        if self.family_tag == "trig" and part != "all":
            B = self.params["B"]
            if part == "smooth":
                return self.A * x ** -self.alpha
            return B * np.sin(x) * x ** (-self.alpha - 1.0)
        if part == "osc":
            return np.zeros_like(x)
        return (self.A + self.eps(side * x)) * x ** -self.alpha

    def amplitude_density(self, x, side: int = 1):
        """-d/dx of :meth:`amplitude` (the tail density up to the factor 1 +- beta)."""
        x = np.asarray(x, dtype=float)
        a = self.alpha
        p = self.params
        tag = self.family_tag
        if tag == "pareto":
            return a * self.A * x ** (-a - 1.0)
        if tag == "twopower":
            at = p["alpha_tilde"]
            return a * self.A * x ** (-a - 1.0) + at * p["A_tilde"] * x ** (-at - 1.0)
        if tag == "trig":
            B = p["B"]
            return (a * self.A * x ** (-a - 1.0)
                    - B * (np.cos(x) * x ** (-a - 1.0) - (a + 1.0) * np.sin(x) * x ** (-a - 2.0)))
        if tag == "logtail":
            lg = np.log(x)
            return a * x ** (-a - 1.0) * (self.A + p["D"] / lg) + p["D"] * x ** (-a - 1.0) / lg ** 2
        h = 1e-6 * np.maximum(x, 1.0)
        lo = np.maximum(x - h, self.cutoff)
        return -(self.amplitude(x + h, side) - self.amplitude(lo, side)) / (x + h - lo)

    @property
    def tail_decay(self) -> float:
        return self.alpha

    def spec(self) -> dict:
        return law_spec(self)


@dataclass(frozen=True)
class SlowVaryLaw:
    """Symmetric law with density c log|x| / |x|**(alpha+1) on |x| >= e.

    c = alpha**2 e**alpha / (2 (1 + alpha)); the tail P(X > x) equals
    e**alpha x**-alpha (alpha log x + 1) / (2 (1 + alpha)).
    """

    alpha: float
    normalization_constant: float = field(init=False)
    family_tag: str = field(init=False, default="slowvary")

    def __post_init__(self):
        a = StableParams(self.alpha).alpha
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "normalization_constant", a * a * math.exp(a) / (2.0 * (1.0 + a)))
        mass = 2.0 * quad.integrate_power_tail(self.density, math.e, a + 1.0, MOMENT_CFG).value
        if abs(mass - 1.0) > 1e-8:
            raise InvalidFamilyParams(f"density integrates to {mass}, not 1")

    beta = 0.0
    cutoff = math.e
    ultimately_monotone = False
    period = None

    @property
    def params(self) -> dict:
        return {}

    @property
    def target(self) -> StableParams:
        return StableParams(self.alpha, 1.0, 0.0)

    @property
    def sigma(self) -> float:
        a = self.alpha
        return (a * a * math.exp(a) / ((1.0 + a) * d_alpha(a))) ** (1.0 / a)

    @property
    def tail_decay(self) -> float:
        return self.alpha

    def density(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            val = self.normalization_constant * np.log(ax) * ax ** (-self.alpha - 1.0)
        return np.where(ax >= math.e, val, 0.0)

    def amplitude(self, x, side: int = 1, part: str = "all"):
        x = np.asarray(x, dtype=float)
        if part == "osc":
            return np.zeros_like(x)
        a = self.alpha
        return math.exp(a) * x ** -a * (a * np.log(x) + 1.0) / (2.0 * (1.0 + a))

    def amplitude_density(self, x, side: int = 1):
        return self.density(x)

    def spec(self) -> dict:
        return law_spec(self)


Law = NormalAttractionLaw | SlowVaryLaw


# ---------------------------------------------------------------------------
# audits


def _audit(law: NormalAttractionLaw) -> None:
    c = law.cutoff
    probe = np.concatenate([np.geomspace(1e-6, c, 2001), _probe_grid(c)[1:]])
    bound = law.K * probe ** -law.gamma
    for side in (1.0, -1.0):
        e = np.abs(law.eps(side * probe))
        bad = e > bound * (1.0 + _AUDIT_REL) + 1e-14
        if np.any(bad):
            x = probe[np.argmax(bad)]
            raise InvalidFamilyParams(
                f"|eps({side * x:g})| = {law.eps(np.array([side * x]))[0]:.6g} exceeds K/|x|^gamma = "
                f"{law.K * x ** -law.gamma:.6g}")

    grid = _probe_grid(c)
    for side, weight in ((1, 1.0 + law.beta), (-1, 1.0 - law.beta)):
        if weight == 0.0:
            continue
        t = law.amplitude(grid, side)
        if np.any(~np.isfinite(t)) or np.any(t <= 0):
            raise InvalidFamilyParams("tail amplitude A + eps must stay positive beyond the cutoff")
        rises = np.diff(t) > 1e-13 * t[1:]
        if np.any(rises):
            x = grid[1:][np.argmax(rises)]
            raise InvalidFamilyParams(f"distribution function decreases near x = {side * x:.6g}")
    upper = (1.0 + law.beta) * law.amplitude(np.array([c]), 1)[0]
    lower = (1.0 - law.beta) * law.amplitude(np.array([c]), -1)[0]
    if abs(upper + lower - 1.0) > _MASS_TOL:
        raise InvalidFamilyParams(
            f"tail masses at the cutoff sum to {upper + lower:.12g}; the distribution function "
            "would jump inside the cutoff")

    levels = []
    for k in (2, 4, 6):
        x = 10.0 ** k + np.linspace(0.0, 10.0, 201)
        levels.append(max(np.max(np.abs(law.eps(x))), np.max(np.abs(law.eps(-x)))))
    if not (levels[0] >= levels[1] >= levels[2] and (levels[2] == 0.0 or levels[2] < levels[0])):
        raise InvalidFamilyParams(f"eps does not decay at infinity (probe levels {levels})")


# ---------------------------------------------------------------------------
# constructors


def _family(tag, alpha, beta, A, K, gamma, cutoff, params, monotone):
    params = tuple(sorted({"A": A, **params}.items()))
    eps = _FamilyEpsilon(tag, float(alpha), params)
    return NormalAttractionLaw(alpha, A, beta, eps, K, gamma, tag, cutoff, params, monotone)


def make_example(tag: str, **params) -> Law:
    """Build one of the example families.

    ``pareto(alpha, beta)``; ``twopower(alpha, beta, alpha_tilde, A_tilde=0.25)``;
    ``trig(alpha, beta, B=0.1)``; ``logtail(alpha, beta, D=0.5)``;
    ``slowvary(alpha)``.  The remaining amplitude (A) is fixed by the
    family's normalization at the cutoff.
    """
    tag = _ALIASES.get(str(tag).lower(), str(tag).lower())
    if tag not in FAMILIES or tag == "custom":
        raise UnknownFamily(f"unknown family {tag!r}; expected one of {FAMILIES}")
    params = dict(params)
    if "alpha" not in params:
        raise InvalidFamilyParams("alpha is required")
    alpha = StableParams(params.pop("alpha")).alpha
    if tag == "slowvary":
        if float(params.pop("beta", 0.0)) != 0.0:
            raise InvalidFamilyParams("the slowly varying example is symmetric (beta = 0)")
        _no_extra(tag, params)
        return SlowVaryLaw(alpha)
    beta = float(params.pop("beta", 0.0))

    if tag == "pareto":
        _no_extra(tag, params)
        return _family(tag, alpha, beta, 0.5, 0.5, 0.0, 1.0, {}, True)
    if tag == "twopower":
        if "alpha_tilde" not in params:
            raise InvalidFamilyParams("twopower needs alpha_tilde")
        at = float(params.pop("alpha_tilde"))
        a2 = float(params.pop("A_tilde", 0.25))
        _no_extra(tag, params)
        if not at > alpha:
            raise InvalidFamilyParams(f"alpha_tilde must exceed alpha, got {at} <= {alpha}")
        if not 0 < a2 < 0.5:
            raise InvalidFamilyParams(f"A_tilde must lie in (0, 1/2), got {a2}")
        A = 0.5 - a2
        return _family(tag, alpha, beta, A, max(A, a2), at - alpha, 1.0,
                       {"alpha_tilde": at, "A_tilde": a2}, True)
    if tag == "trig":
        B = float(params.pop("B", 0.1))
        _no_extra(tag, params)
        A = 0.5 - B * math.sin(1.0)
        if not A > 0:
            raise InvalidFamilyParams(f"B = {B} leaves A = 1/2 - B sin 1 <= 0")
        return _family(tag, alpha, beta, A, max(A, abs(B)), 1.0, 1.0, {"B": B}, False)
    # logtail
    D = float(params.pop("D", 0.5))
    _no_extra(tag, params)
    A = 0.5 * math.exp(alpha) - D
    if not (D > 0 and A > 0):
        raise InvalidFamilyParams(f"logtail needs 0 < D < e^alpha/2, got D = {D}")
    return _family(tag, alpha, beta, A, max(A, D), 0.0, math.e, {"D": D}, True)


def _no_extra(tag, params):
    if params:
        raise InvalidFamilyParams(f"unexpected parameters for {tag}: {sorted(params)}")


def custom_law(alpha: float, A: float, beta: float, epsilon: Callable, K: float, gamma: float,
               cutoff: float = 1.0, ultimately_monotone: bool = False) -> NormalAttractionLaw:
    """Generic descriptor; ``epsilon`` must be vectorised and equal -A inside the cutoff."""
    return NormalAttractionLaw(alpha, A, beta, epsilon, K, gamma, "custom", cutoff, (),
                               ultimately_monotone)


def law_spec(law: Law) -> dict:
    """JSON-ready description accepted by :func:`law_from_spec`."""
    if law.family_tag == "custom":
        raise ParameterError("custom laws carry a callable and have no JSON form")
    out = {"family": law.family_tag, "alpha": law.alpha}
    if law.family_tag != "slowvary":
        out["beta"] = law.beta
        out.update({k: v for k, v in law.family_params if k != "A"})
    return out


def law_from_spec(spec: dict) -> Law:
    spec = dict(spec)
    if "family" not in spec:
        raise InvalidFamilyParams("law spec needs a 'family' entry")
    return make_example(spec.pop("family"), **spec)


# ---------------------------------------------------------------------------
# distribution function


def _upper(law, y):
    """P(X > y) for an array y."""
    y = np.asarray(y, dtype=float)
    c = law.cutoff
    wp, wm = 1.0 + law.beta, 1.0 - law.beta
    pos = wp * law.amplitude(np.maximum(y, c), 1)
    neg = 1.0 - wm * law.amplitude(np.maximum(-y, c), -1)
    return np.where(y >= -c, pos, neg)


def _lower(law, y):
    """P(X < y); no atoms, so this is also P(X <= y)."""
    return 1.0 - _upper(law, y)


def cdf(law: Law, x):
    x = np.asarray(x, dtype=float)
    out = _lower(law, x)
    return float(out) if out.ndim == 0 else out


def tail_upper(law: Law, x):
    """P(X > x).  For x >= cutoff this is (1 + beta)(A + eps(x))/x**alpha."""
    out = _upper(law, x)
    return float(out) if np.ndim(out) == 0 else out


def tail_lower(law: Law, x):
    """P(X <= x).  For x <= -cutoff this is (1 - beta)(A + eps(x))/|x|**alpha."""
    return cdf(law, x)


# ---------------------------------------------------------------------------
# sampling


def _invert_amplitude(law, v, side, max_iter=200):
    """Solve amplitude(x) = v for x >= cutoff, v in (0, amplitude(cutoff)].

    Works in w = log x: a bracket is grown until it contains the root, then
    safeguarded Newton steps (bisection whenever Newton leaves the bracket).
    """
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return v.copy()
    log_v = np.log(v)
    lo = np.full(v.shape, math.log(law.cutoff))
    start = law.amplitude(np.array([law.cutoff]), side)[0]
    w = lo + np.maximum(np.log(start) - log_v, 0.0) / law.alpha

    def f(wv):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.log(law.amplitude(np.exp(wv), side)) - log_v

    hi = np.maximum(w, lo) + 1.0
    for _ in range(200):
        still = f(hi) > 0
        if not np.any(still):
            break
        hi = np.where(still, lo + 2.0 * (hi - lo), hi)
    else:
        raise InversionFailure("could not bracket the tail inversion")
    w = np.clip(w, lo, hi)
    done = np.zeros(v.shape, dtype=bool)
    for _ in range(max_iter):
        fw = f(w)
        lo = np.where(fw > 0, w, lo)
        hi = np.where(fw <= 0, w, hi)
        x = np.exp(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = -x * law.amplitude_density(x, side) / law.amplitude(x, side)
            step = fw / slope
        newton = w - step
        bad = ~np.isfinite(newton) | (newton <= lo) | (newton >= hi) | (slope >= 0)
        w_new = np.where(bad, 0.5 * (lo + hi), newton)
        done = np.abs(w_new - w) <= 4e-16 * np.maximum(1.0, np.abs(w))
        w = w_new
        if np.all(done | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(w)))):
            return np.exp(w)
    raise InversionFailure("tail inversion did not converge; the tail may not be monotone")


def draws_from_uniforms(law: Law, u_sign, u_mag) -> np.ndarray:
    """Map pairs of uniforms on [0, 1) to draws by inverting the distribution function."""
    u_sign = np.asarray(u_sign, dtype=float)
    u_mag = np.asarray(u_mag, dtype=float)
    c = np.array([law.cutoff])
    t_pos = law.amplitude(c, 1)[0]
    t_neg = law.amplitude(c, -1)[0]
    p_neg = (1.0 - law.beta) * t_neg
    neg = u_sign < p_neg
    out = np.empty(u_sign.shape)
    one_minus = 1.0 - u_mag
    out[neg] = -_invert_amplitude(law, one_minus[neg] * t_neg, -1)
    out[~neg] = _invert_amplitude(law, one_minus[~neg] * t_pos, 1)
    return out


def sample(law: Law, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """n i.i.d. draws; the generator is keyed by (seed, stream)."""
    n = int(n)
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))
    u = rng.random((2, n))
    return draws_from_uniforms(law, u[0], u[1])


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class Moments:
    mean: float
    abs_mean: float
    centered_frac_moment: float


def _tail_integral(law, g_of_amplitude, start, decay):
    """Integral over (start, inf) of a linear functional of the tail amplitudes.

    ``g_of_amplitude(part)`` returns the integrand built from the given part of
    the amplitudes; the smooth part goes through the power-law substitution
    and the oscillating part (trig family) through half-period summation.
    """
    total = quad.integrate_power_tail(g_of_amplitude("smooth"), start, decay, MOMENT_CFG).value
    if law.period is not None:
        total += quad.integrate_semi_infinite(g_of_amplitude("osc"), start, _FOURIER_CFG,
                                              period=law.period).value
    return float(total)


def _half_mass(law, side):
    """Integral of P(side X > x) over x > 0, divided by (1 + side beta)."""
    c = law.cutoff
    head = c * law.amplitude(np.array([c]), side)[0]
    tail = _tail_integral(law, lambda part: (lambda x: law.amplitude(x, side, part)), c, law.alpha)
    return head + tail


@functools.lru_cache(maxsize=64)
def moments(law: Law) -> Moments:
    """Mean, E|X| and E|X - EX|**(2 - alpha) by tail integration."""
    a, b = law.alpha, law.beta
    m_pos = _half_mass(law, 1)
    m_neg = _half_mass(law, -1)
    mean = (1.0 + b) * m_pos - (1.0 - b) * m_neg
    abs_mean = (1.0 + b) * m_pos + (1.0 - b) * m_neg
    if law.family_tag == "slowvary" or b == 0.0 and law.family_tag != "custom":
        mean = 0.0

    q = 2.0 - a
    c = law.cutoff

    def integrand(t):
        return q * t ** (1.0 - a) * (_upper(law, mean + t) + _lower(law, mean - t))

    t_star = abs(mean) + c
    knots = sorted({t for t in (c - mean, c + mean) if 0 < t < t_star})
    head = quad.integrate(integrand, 0.0, t_star, MOMENT_CFG, singularity=(a - 1.0, 0.0),
                          breakpoints=knots).value

    def tail_part(part):
        def g(t):
            return q * t ** (1.0 - a) * ((1.0 + b) * law.amplitude(mean + t, 1, part)
                                         + (1.0 - b) * law.amplitude(t - mean, -1, part))
        return g

    frac = float(head) + _tail_integral(law, tail_part, t_star, 2.0 * a - 1.0)
    return Moments(float(mean), float(abs_mean), frac)


# ---------------------------------------------------------------------------
# normalization of the slowly varying example


def gamma_n_solve(alpha: float, n: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Largest root of gamma = (n log gamma)**(1/alpha).

    Damped fixed-point iteration from n**(1/alpha), finished with Newton on
    alpha log gamma - log n - log log gamma.  The residual is checked relative
    to max(1, gamma).
    """
    alpha = StableParams(alpha).alpha
    n = float(n)
    if not n >= math.exp(alpha) * (1.0 - 1e-15):
        raise ParameterError(f"n must be at least e^alpha = {math.exp(alpha):.6g}, got {n}")
    g = max(n ** (1.0 / alpha), math.e)

    def resid(x):
        return x - (n * math.log(x)) ** (1.0 / alpha)

    for i in range(max_iter):
        new = (n * math.log(g)) ** (1.0 / alpha)
        g_next = 0.5 * (g + new) if i < 3 else new
        if abs(g_next - g) <= 1e-10 * g:
            g = g_next
            break
        g = max(g_next, math.e)
    else:
        raise NoConvergence("fixed-point iteration for gamma_n hit its cap")
    for _ in range(max_iter):
        lg = math.log(g)
        f = alpha * lg - math.log(n) - math.log(lg) if lg > 0 else -math.inf
        fp = alpha / g - 1.0 / (g * lg)
        step = f / fp
        g = max(g - step, math.e)
        if abs(step) <= 1e-15 * g:
            break
    if abs(resid(g)) > tol * max(1.0, g):
        raise NoConvergence(f"gamma_n residual {resid(g):.3e} above tolerance")
    return g


# ---------------------------------------------------------------------------
# eps integral and tail supremum


def _eps_side_integral(law, R, side):
    """Integral of |eps(side x)| x**(1 - alpha) over (0, R)."""
    a = law.alpha
    c = law.cutoff

    def f(x):
        return np.abs(law.eps(side * x)) * x ** (1.0 - a)

    inner = quad.integrate(f, 0.0, min(R, c), MOMENT_CFG, singularity=(a - 1.0, 0.0)).value
    if R <= c:
        return float(inner)
    if law.family_tag == "trig":
        return float(inner) + _abs_sine_integral(law.params["B"], a, c, R)
    knots = list(np.geomspace(c, R, max(2, int(math.log10(R / c)) + 2))[1:-1])
    outer = quad.integrate(f, c, R, MOMENT_CFG, breakpoints=knots).value
    return float(inner) + float(outer)


_MAX_SINE_PANELS = 400000


def _abs_sine_integral(B, alpha, lo, hi):
    """B times the integral of |sin x| x**-alpha over (lo, hi).

    |sin| is smooth between multiples of pi, so each such panel gets one
    Gauss-Kronrod rule.  Beyond _MAX_SINE_PANELS panels |sin x| is replaced
    by its mean 2/pi; the neglected part is below B pi alpha x**(-alpha-1)
    per panel.
    """
    k_lo = math.ceil(lo / math.pi)
    k_hi = math.floor(hi / math.pi)
    k_cap = min(k_hi, k_lo + _MAX_SINE_PANELS)
    edges = np.concatenate([[lo], math.pi * np.arange(k_lo, k_cap + 1), [hi if k_cap == k_hi else math.pi * k_cap]])
    edges = np.unique(edges)
    left, right = edges[:-1], edges[1:]
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    x = mid[:, None] + half[:, None] * quad.NODES[None, :]
    vals = np.abs(np.sin(x)) * x ** -alpha
    total = float(np.sum((vals @ quad.KRONROD_WEIGHTS) * half))
    if k_cap < k_hi:
        x0 = math.pi * k_cap
        total += (2.0 / math.pi) * (x0 ** (1.0 - alpha) - hi ** (1.0 - alpha)) / (alpha - 1.0)
    return B * total


def epsilon_integral(law: NormalAttractionLaw, R: float) -> float:
    """Integral of |eps(x)| / |x|**(alpha - 1) over (-R, R)."""
    R = float(R)
    if not R > 0:
        raise ParameterError(f"R must be positive, got {R}")
    if not isinstance(law, NormalAttractionLaw):
        raise ParameterError("epsilon_integral needs a normal-attraction law")
    if law.family_tag == "custom":
        return _eps_side_integral(law, R, 1) + _eps_side_integral(law, R, -1)
    return 2.0 * _eps_side_integral(law, R, 1)


def epsilon_sup(law: NormalAttractionLaw, R: float) -> float:
    """sup of |eps(x)| over |x| >= R."""
    R = float(R)
    if not R > 0:
        raise ParameterError(f"R must be positive, got {R}")
    if not isinstance(law, NormalAttractionLaw):
        raise ParameterError("epsilon_sup needs a normal-attraction law")
    p = law.params
    c = law.cutoff
    tag = law.family_tag
    if tag == "pareto":
        return law.A if R < c else 0.0
    if tag == "twopower":
        return max(law.A, p["A_tilde"]) if R < c else p["A_tilde"] * R ** (law.alpha - p["alpha_tilde"])
    if tag == "logtail":
        return max(law.A, p["D"]) if R < c else p["D"] / math.log(R)
    if tag == "trig":
        B = abs(p["B"])
        if R < c:
            return max(law.A, B * math.sin(1.0))
        return B * _sup_abs_sinc(R)
    # custom: dense probe near R plus a geometric probe far out
    x = np.concatenate([np.linspace(R, R + 50.0, 50001), np.geomspace(R + 50.0, 1e12, 20001)])
    return float(max(np.max(np.abs(law.eps(x))), np.max(np.abs(law.eps(-x)))))


def _sup_abs_sinc(R):
    """sup of |sin x| / x over x >= R >= 1.

    Beyond R + pi the envelope 1/x is already below the value at the first
    peak, so the search is confined to [R, R + pi].
    """
    x = np.linspace(R, R + math.pi, 4097)
    vals = np.abs(np.sin(x)) / x
    i = int(np.argmax(vals))
    lo = x[max(i - 1, 0)]
    hi = x[min(i + 1, x.size - 1)]
    best = vals[i]
    if hi > lo:
        res = optimize.minimize_scalar(lambda t: -abs(math.sin(t)) / t, bounds=(lo, hi),
                                       method="bounded", options={"xatol": 1e-13})
        best = max(best, -res.fun)
    return float(best)
