"""Explicit Wasserstein bounds for normalized partial sums.

The leave-one-out decomposition bounds |E[S_n phi'(S_n)] - alpha E[(L phi)(S_n)]|
by I + II + III+IV, where II = n a T and T is controlled either by the
Taylor-type lemma (four regimes of gamma against 2 - alpha) or, for
ultimately monotone perturbations, by the monotone lemma.  Dividing by
alpha gives the Wasserstein bound, since

    d_W <= sup |E[(L phi)(X)] - E[X phi'(X)] / alpha|
    over |phi'| <= alpha, |phi''| <= eta.

All reported components already carry that 1/alpha factor, so the total is
their plain sum.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from . import domains
from .domains import NormalAttractionLaw
from .errors import NotUltimatelyMonotone, ParameterError, PreconditionViolated
from .stable import d_alpha, eta

__all__ = [
    "BoundInputs",
    "TheoreticalBound",
    "BoundNotApplicable",
    "RateExponent",
    "REGIMES",
    "regime_of",
    "n_min",
    "t_bound_taylor",
    "t_bound_monotone",
    "term_I",
    "term_II",
    "term_II_display",
    "term_III_IV",
    "theorem_bound",
    "preferred_variant",
    "rate_exponent",
    "bound_table",
    "bound_table_csv",
]

REGIMES = ("gamma_large", "gamma_critical", "gamma_small", "gamma_zero", "ultimately_monotone")
_CRITICAL_TOL = 1e-12
FORMAT_VERSION = 1


@dataclass(frozen=True)
class BoundInputs:
    """A law and a sample size, with the derived scale a = n**(-1/alpha) / sigma."""

    law: NormalAttractionLaw
    n: float
    phi_prime_sup: float | None = None
    phi_second_sup: float | None = None

    def __post_init__(self):
        if not isinstance(self.law, NormalAttractionLaw):
            raise ParameterError("bounds are only available for normal-attraction laws")
        if not self.n >= 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.phi_prime_sup is None:
            object.__setattr__(self, "phi_prime_sup", self.law.alpha)
        if self.phi_second_sup is None:
            object.__setattr__(self, "phi_second_sup", eta(self.law.target))

    @property
    def sigma(self) -> float:
        return self.law.sigma

    @property
    def a(self) -> float:
        return self.n ** (-1.0 / self.law.alpha) / self.sigma

    @property
    def moments(self) -> domains.Moments:
        return domains.moments(self.law)


@dataclass(frozen=True)
class TheoreticalBound:
    n: float
    total: float
    components: dict = field(hash=False)
    regime: str
    variant: str

    def __post_init__(self):
        if any(v < 0 for v in self.components.values()):
            raise ValueError("bound components must be nonnegative")


@dataclass(frozen=True)
class BoundNotApplicable:
    """The lemma's range condition on a fails at this n."""

    n: float
    n_min: float
    regime: str
    variant: str
    reason: str = "not applicable below n_min"


@dataclass(frozen=True)
class RateExponent:
    exponent: float
    log_factor: bool
    data_dependent: bool = False


def regime_of(gamma: float, alpha: float) -> str:
    crit = 2.0 - alpha
    if gamma == 0.0:
        return "gamma_zero"
    if abs(gamma - crit) <= _CRITICAL_TOL:
        return "gamma_critical"
    return "gamma_large" if gamma > crit else "gamma_small"


def _a_limit(law: NormalAttractionLaw, variant: str) -> float:
    lim = min((2.0 * law.A) ** (-1.0 / law.alpha), 1.0)
    if variant == "thm13":
        # eps(x)/|x|**alpha must be monotone on |x| > 1/a, i.e. beyond the cutoff
        lim = min(lim, 1.0 / law.cutoff)
    return lim


def n_min(law: NormalAttractionLaw, variant: str = "thm12") -> float:
    """Smallest real n at which a = n**(-1/alpha)/sigma falls below the lemma's limit."""
    return (law.sigma * _a_limit(law, variant)) ** (-law.alpha)


def _check_a(inputs: BoundInputs, variant: str) -> None:
    law = inputs.law
    lim = _a_limit(law, variant)
    if not inputs.a < lim:
        nm = n_min(law, variant)
        raise PreconditionViolated(
            f"a = {inputs.a:.6g} is not below {lim:.6g}; need n > {nm:.6g}", n_min=nm)


def _mixed_coefficient(law, phi1, phi2, phi2_coef):
    a_, A, K = law.alpha, law.A, law.K
    return phi2_coef * phi2 + (8.0 * a_ * (A + K) - 4.0 * K) / (a_ - 1.0) * phi1


def t_bound_taylor(inputs: BoundInputs) -> float:
    """Bound on T from the Taylor-type lemma, dispatched on gamma vs 2 - alpha."""
    _check_a(inputs, "thm12")
    law = inputs.law
    al, A, K, g = law.alpha, law.A, law.K, law.gamma
    a = inputs.a
    p1, p2 = inputs.phi_prime_sup, inputs.phi_second_sup
    two_a = (2.0 * A) ** (2.0 / al)
    regime = regime_of(g, al)
    if regime == "gamma_large":
        return 2.0 * two_a * (2.0 / (2.0 - al)
                              + 2.0 * K / (al + g - 2.0) * (2.0 * A) ** ((-al - g) / al)) * p2 * a
    if regime == "gamma_critical":
        mixed = _mixed_coefficient(law, p1, p2, 2.0 * two_a + 8.0 * K / (al - 1.0))
        return 2.0 * al / (2.0 - al) * two_a * p2 * a + mixed * a * abs(math.log(a))
    if regime == "gamma_small":
        mixed = _mixed_coefficient(law, p1, p2, 4.0 * two_a / (2.0 - al) + 8.0 * K / (2.0 - al - g))
        return mixed * a ** ((1.0 - al) / (g - 1.0))
    R = 1.0 / a
    integral = domains.epsilon_integral(law, R)
    sup = domains.epsilon_sup(law, R)
    mixed = _mixed_coefficient(law, p1, p2, 8.0 / (2.0 - al) + 2.0 * two_a)
    return (2.0 * al * two_a / (2.0 - al) * p2 * a
            + 4.0 * p2 * a * integral
            + mixed * a ** (al - 1.0) * sup ** (al - 1.0))


def _monotone_terms(inputs: BoundInputs) -> tuple[float, float, float]:
    law = inputs.law
    if not law.ultimately_monotone:
        raise NotUltimatelyMonotone(f"family {law.family_tag!r} is not flagged ultimately monotone")
    _check_a(inputs, "thm13")
    al, A = law.alpha, law.A
    a = inputs.a
    R = 1.0 / a
    linear = 2.0 * (2.0 * A) ** (1.0 / al) * a
    sup_term = (16.0 * al - 1.0) * inputs.phi_prime_sup / (al - 1.0) * a ** (al - 1.0) * domains.epsilon_sup(law, R)
    integral_term = 2.0 * inputs.phi_second_sup * a * domains.epsilon_integral(law, R)
    return linear, sup_term, integral_term


def t_bound_monotone(inputs: BoundInputs) -> float:
    """Bound on T from the monotone lemma (taken exactly as displayed)."""
    return float(sum(_monotone_terms(inputs)))


def term_I(inputs: BoundInputs) -> float:
    """Leave-one-out term I (before the 1/alpha factor)."""
    law = inputs.law
    al = law.alpha
    return (4.0 * d_alpha(al) / ((2.0 - al) * (al - 1.0)) * inputs.phi_second_sup
            * inputs.moments.centered_frac_moment * inputs.sigma ** (al - 2.0)
            * inputs.n ** (1.0 - 2.0 / al))


def term_II(inputs: BoundInputs, variant: str = "thm12") -> float:
    """n a T with T from the lemma matching ``variant`` (before the 1/alpha factor)."""
    t = t_bound_taylor(inputs) if variant == "thm12" else t_bound_monotone(inputs)
    return inputs.n * inputs.a * t


def term_II_display(inputs: BoundInputs, variant: str = "thm12") -> float:
    """Term II in the closed forms written out for the partial sum.

    These coincide with n a T except in the critical regime, whose written
    form has a different leading constant and carries |log(sigma n**(1/alpha))|.
    """
    law = inputs.law
    al, A, K, g = law.alpha, law.A, law.K, law.gamma
    n, s = inputs.n, inputs.sigma
    p1, p2 = inputs.phi_prime_sup, inputs.phi_second_sup
    two_a = (2.0 * A) ** (2.0 / al)
    rate = n ** ((al - 2.0) / al)
    R = s * n ** (1.0 / al)
    if variant == "thm13":
        if not law.ultimately_monotone:
            raise NotUltimatelyMonotone(f"family {law.family_tag!r} is not flagged ultimately monotone")
        return (2.0 * (2.0 * A) ** (1.0 / al) / s ** 2 * rate
                + (16.0 * al - 1.0) * p1 / ((al - 1.0) * s ** al) * domains.epsilon_sup(law, R)
                + 2.0 * p2 / s ** 2 * rate * domains.epsilon_integral(law, R))
    regime = regime_of(g, al)
    if regime == "gamma_large":
        return (2.0 * two_a / s ** 2 * (2.0 / (2.0 - al) + 2.0 * K / (al + g - 2.0)
                                        * (2.0 * A) ** ((-al - g) / al)) * p2 * rate)
    if regime == "gamma_critical":
        mixed = _mixed_coefficient(law, p1, p2, 4.0 * two_a / (2.0 - al) + 8.0 * K / (al - 1.0))
        return mixed / s ** 2 * rate * abs(math.log(R))
    if regime == "gamma_small":
        mixed = _mixed_coefficient(law, p1, p2, 4.0 * two_a / (2.0 - al) + 8.0 * K / (2.0 - al - g))
        return s ** ((al - g) / (g - 1.0)) * mixed * n ** (-(al - 1.0) * g / (al * (1.0 - g)))
    mixed = _mixed_coefficient(law, p1, p2, 8.0 / (2.0 - al) + 2.0 * two_a)
    return (2.0 * al * two_a / ((2.0 - al) * s ** 2) * p2 * rate
            + 4.0 * p2 / s ** 2 * rate * domains.epsilon_integral(law, R)
            + s ** -al * mixed * domains.epsilon_sup(law, R) ** (al - 1.0))


def term_III_IV(inputs: BoundInputs) -> float:
    """Leave-one-out terms III + IV (before the 1/alpha factor)."""
    m = inputs.moments
    return (3.0 * inputs.phi_second_sup / inputs.sigma ** 2 * m.abs_mean * abs(m.mean)
            * inputs.n ** (1.0 - 2.0 / inputs.law.alpha))


def preferred_variant(law: NormalAttractionLaw) -> str:
    """The theorem the examples are routed through: monotone families use thm13."""
    if law.family_tag in ("twopower", "logtail"):
        return "thm13"
    if law.family_tag == "custom" and law.ultimately_monotone:
        return "thm13"
    return "thm12"


def theorem_bound(inputs: BoundInputs, variant: str | None = None) -> TheoreticalBound | BoundNotApplicable:
    """Assembled bound on d_W(S_n, S_alpha(1, beta)) with its components."""
    law = inputs.law
    variant = preferred_variant(law) if variant is None else variant
    if variant not in ("thm12", "thm13"):
        raise ParameterError(f"variant must be 'thm12' or 'thm13', got {variant!r}")
    regime = "ultimately_monotone" if variant == "thm13" else regime_of(law.gamma, law.alpha)
    if variant == "thm13" and not law.ultimately_monotone:
        raise NotUltimatelyMonotone(f"family {law.family_tag!r} is not flagged ultimately monotone")
    try:
        t2 = term_II(inputs, variant)
    except PreconditionViolated as exc:
        return BoundNotApplicable(inputs.n, exc.n_min, regime, variant)
    scale = 1.0 / law.alpha
    comps = {
        "term_I": scale * term_I(inputs),
        "term_II": scale * t2,
        "term_III_IV": scale * term_III_IV(inputs),
    }
    return TheoreticalBound(inputs.n, float(sum(comps.values())), comps, regime, variant)


def rate_exponent(alpha: float, gamma: float) -> RateExponent:
    """Exponent of n (and log flag) in the rate for a given decay of eps."""
    if not gamma >= 0:
        raise ParameterError(f"gamma must be >= 0, got {gamma}")
    regime = regime_of(gamma, alpha)
    if regime == "gamma_large":
        return RateExponent(1.0 - 2.0 / alpha, False)
    if regime == "gamma_critical":
        return RateExponent(1.0 - 2.0 / alpha, True)
    if regime == "gamma_small":
        return RateExponent(-(alpha - 1.0) * gamma / (alpha * (1.0 - gamma)), False)
    return RateExponent(math.nan, False, data_dependent=True)


def bound_table(law: NormalAttractionLaw, n_grid, variant: str | None = None) -> list:
    """theorem_bound over an n grid; one result object per n."""
    variant = preferred_variant(law) if variant is None else variant
    eta_val = eta(law.target)
    return [theorem_bound(BoundInputs(law, float(n), law.alpha, eta_val), variant) for n in n_grid]


def bound_table_csv(rows) -> str:
    """CSV text with columns n, term_I, term_II, term_III_IV, total, regime, status."""
    buf = io.StringIO()
    buf.write(f"# format_version={FORMAT_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "term_I", "term_II", "term_III_IV", "total", "regime", "status"])
    for r in rows:
        if isinstance(r, BoundNotApplicable):
            w.writerow([_fmt(r.n), "", "", "", "", r.regime, f"not applicable (n_min={_fmt(r.n_min)})"])
        else:
            c = r.components
            w.writerow([_fmt(r.n), _fmt(c["term_I"]), _fmt(c["term_II"]), _fmt(c["term_III_IV"]),
                        _fmt(r.total), r.regime, "ok"])
    return buf.getvalue()


def _fmt(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))
