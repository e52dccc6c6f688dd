import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablestein import bounds, domains
from stablestein.errors import NotUltimatelyMonotone, ParameterError, PreconditionViolated
from stablestein.stable import d_alpha, eta


def law(tag, **kw):
    kw.setdefault("alpha", 1.5)
    return domains.make_example(tag, **kw)


def inputs(lw, n):
    return bounds.BoundInputs(lw, float(n))


# -- regimes and exponents ---------------------------------------------------------


@pytest.mark.parametrize("gamma,alpha,regime", [
    (0.0, 1.5, "gamma_zero"),
    (0.5, 1.5, "gamma_critical"),
    (0.5 + 1e-13, 1.5, "gamma_critical"),
    (0.7, 1.5, "gamma_large"),
    (0.3, 1.5, "gamma_small"),
])
def test_regime_dispatch(gamma, alpha, regime):
    assert bounds.regime_of(gamma, alpha) == regime


def test_rate_exponents():
    assert bounds.rate_exponent(1.5, 1.0).exponent == pytest.approx(-1 / 3)
    crit = bounds.rate_exponent(1.5, 0.5)
    assert crit.exponent == pytest.approx(-1 / 3) and crit.log_factor
    small = bounds.rate_exponent(1.5, 0.3)
    assert small.exponent == pytest.approx(-(0.5 * 0.3) / (1.5 * 0.7))
    assert bounds.rate_exponent(1.5, 0.0).data_dependent
    with pytest.raises(ParameterError):
        bounds.rate_exponent(1.5, -0.1)


def test_inputs_validation_and_defaults():
    with pytest.raises(ParameterError):
        bounds.BoundInputs(law("slowvary"), 100.0)
    with pytest.raises(ParameterError):
        inputs(law("pareto"), 0.5)
    inp = inputs(law("pareto"), 1000)
    assert inp.phi_prime_sup == 1.5
    assert inp.a == pytest.approx(1000 ** (-1 / 1.5) / inp.law.sigma)


# -- applicability -----------------------------------------------------------------


def test_not_applicable_below_n_min():
    # a small leading amplitude pushes n_min above 1
    lw = law("twopower", alpha_tilde=1.8, A_tilde=0.45)
    nm = bounds.n_min(lw)
    assert nm > 2
    below = bounds.theorem_bound(inputs(lw, 0.5 * nm))
    assert isinstance(below, bounds.BoundNotApplicable) and below.n_min == pytest.approx(nm)
    above = bounds.theorem_bound(inputs(lw, 2 * nm))
    assert isinstance(above, bounds.TheoreticalBound)
    with pytest.raises(PreconditionViolated):
        bounds.t_bound_taylor(inputs(lw, 0.5 * nm))


def test_monotone_route_requires_flag():
    with pytest.raises(NotUltimatelyMonotone):
        bounds.theorem_bound(inputs(law("trig"), 1e6), "thm13")
    with pytest.raises(ParameterError):
        bounds.theorem_bound(inputs(law("pareto"), 1e6), "thm99")


def test_preferred_variants():
    assert bounds.preferred_variant(law("pareto")) == "thm12"
    assert bounds.preferred_variant(law("trig")) == "thm12"
    assert bounds.preferred_variant(law("twopower", alpha_tilde=1.8)) == "thm13"
    assert bounds.preferred_variant(law("logtail")) == "thm13"


# -- scaling with n ------------------------------------------------------------------


def test_pareto_bound_scales_exactly_as_rate():
    # eps vanishes beyond the cutoff, so every component is a multiple of n^(1 - 2/alpha)
    lw = law("pareto")
    ns = [1e4, 1e6, 1e9]
    scaled = [bounds.theorem_bound(inputs(lw, n)).total * n ** (1 / 3) for n in ns]
    assert max(scaled) / min(scaled) == pytest.approx(1.0, abs=1e-10)


def test_twopower_monotone_route_slope():
    lw = law("twopower", alpha_tilde=1.8)
    b1 = bounds.theorem_bound(inputs(lw, 1e12)).total
    b2 = bounds.theorem_bound(inputs(lw, 1e14)).total
    slope = math.log(b2 / b1) / math.log(100.0)
    assert slope == pytest.approx(-0.2, abs=0.01)


def test_gamma_large_slope():
    lw = law("twopower", alpha_tilde=2.3)
    b1 = bounds.theorem_bound(inputs(lw, 1e8), "thm12").total
    b2 = bounds.theorem_bound(inputs(lw, 1e10), "thm12").total
    assert math.log(b2 / b1) / math.log(100.0) == pytest.approx(-1 / 3, abs=1e-10)


@pytest.mark.parametrize("lw,variant", [
    (law("twopower", alpha_tilde=2.3), "thm12"),
    (law("twopower", alpha_tilde=1.8), "thm12"),
    (law("pareto"), "thm12"),
    (law("trig"), "thm12"),
    (law("twopower", alpha_tilde=1.8), "thm13"),
    (law("logtail"), "thm13"),
])
def test_display_form_matches_lemma_route(lw, variant):
    inp = inputs(lw, 1e7)
    assert bounds.term_II_display(inp, variant) == pytest.approx(bounds.term_II(inp, variant), rel=1e-10)


def test_critical_display_differs_only_by_constants():
    lw = law("twopower", alpha_tilde=2.0)
    assert lw.gamma == pytest.approx(0.5)
    r = [bounds.term_II_display(inputs(lw, n)) / bounds.term_II(inputs(lw, n)) for n in (1e8, 1e12, 1e16)]
    # same n-dependence up to a factor tending to a constant
    assert abs(r[2] - r[1]) < abs(r[1] - r[0]) + 1e-12
    assert 0.1 < r[2] < 10


@settings(max_examples=20, deadline=None)
@given(n_exp=st.floats(3, 14), tag=st.sampled_from(["pareto", "trig", "logtail", "twopower"]))
def test_components_nonnegative_and_sum(n_exp, tag):
    lw = law(tag, alpha_tilde=1.8) if tag == "twopower" else law(tag)
    res = bounds.theorem_bound(inputs(lw, 10.0 ** n_exp))
    if isinstance(res, bounds.TheoreticalBound):
        assert all(v >= 0 for v in res.components.values())
        assert res.total == pytest.approx(sum(res.components.values()), rel=1e-15)


def test_term_I_closed_form_for_pareto():
    # symmetric Pareto: E|X|^(2-alpha) = alpha/(2 alpha - 2)
    lw = law("pareto")
    inp = inputs(lw, 1e5)
    expected = (4 * d_alpha(1.5) / (0.5 * 0.5) * eta(lw.target) * 1.5 / 1.0
                * lw.sigma ** -0.5 * 1e5 ** (1 - 2 / 1.5))
    assert bounds.term_I(inp) == pytest.approx(expected, rel=1e-8)
    assert bounds.term_III_IV(inp) == 0.0


# -- tables ----------------------------------------------------------------------------


def test_bound_table_csv_layout():
    lw = law("twopower", alpha_tilde=1.8, A_tilde=0.45)
    rows = bounds.bound_table(lw, [2, 1024, 2 ** 20])
    text = bounds.bound_table_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "# format_version=1"
    assert lines[1] == "n,term_I,term_II,term_III_IV,total,regime,status"
    assert lines[2].startswith("2,,,,,ultimately_monotone,not applicable (n_min=3.98")
    assert lines[3].endswith(",ultimately_monotone,ok") and lines[3].startswith("1024,")
    assert len(lines) == 5
    vals = [float(x) for x in lines[4].split(",")[1:5]]
    assert vals[3] == pytest.approx(sum(vals[:3]), rel=1e-14)
    assert np.isfinite(vals).all()
