import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci
from scipy import optimize, stats

from stablestein import domains
from stablestein.errors import InvalidFamilyParams, ParameterError, UnknownFamily


def pareto(alpha=1.5, beta=0.0):
    return domains.make_example("pareto", alpha=alpha, beta=beta)


# -- construction ------------------------------------------------------------------


def test_family_constants():
    law = domains.make_example("twopower", alpha=1.5, beta=0.2, alpha_tilde=1.8)
    assert law.A == 0.25 and law.gamma == pytest.approx(0.3)
    trig = domains.make_example("trig", alpha=1.4, B=0.2)
    assert trig.A + 0.2 * math.sin(1.0) == pytest.approx(0.5)
    log = domains.make_example("logtail", alpha=1.6, D=0.5)
    assert log.A + 0.5 == pytest.approx(math.exp(1.6) / 2) and log.cutoff == math.e
    assert domains.make_example("example1", alpha=1.5).family_tag == "pareto"


@pytest.mark.parametrize("tag,params,err", [
    ("nonsense", {"alpha": 1.5}, UnknownFamily),
    ("twopower", {"alpha": 1.5}, InvalidFamilyParams),
    ("twopower", {"alpha": 1.5, "alpha_tilde": 1.4}, InvalidFamilyParams),
    ("twopower", {"alpha": 1.5, "alpha_tilde": 1.8, "A_tilde": 0.6}, InvalidFamilyParams),
    ("trig", {"alpha": 1.5, "B": 1.0}, InvalidFamilyParams),
    ("logtail", {"alpha": 1.5, "D": -0.1}, InvalidFamilyParams),
    ("pareto", {"alpha": 1.5, "extra": 1}, InvalidFamilyParams),
    ("slowvary", {"alpha": 1.5, "beta": 0.3}, InvalidFamilyParams),
    ("pareto", {"alpha": 2.0}, ParameterError),
])
def test_invalid_family_parameters(tag, params, err):
    with pytest.raises(err):
        domains.make_example(tag, **params)


def test_custom_audits():
    def eps_ok(x):
        ax = np.abs(x)
        return np.where(ax < 1, -0.5, 0.0)

    law = domains.custom_law(1.5, 0.5, 0.0, eps_ok, K=0.5, gamma=0.0)
    assert law.family_tag == "custom"

    with pytest.raises(InvalidFamilyParams, match="exceeds"):
        domains.custom_law(1.5, 0.5, 0.0, eps_ok, K=0.1, gamma=0.0)

    def eps_jump(x):
        ax = np.abs(x)
        return np.where(ax < 1, -0.4, 0.0)

    # A = 0.4 leaves only 0.8 of the mass beyond the cutoff
    with pytest.raises(InvalidFamilyParams, match="tail masses"):
        domains.custom_law(1.5, 0.4, 0.0, eps_jump, K=0.5, gamma=0.0)

    def eps_bump(x):
        ax = np.abs(x)
        return np.where(ax < 1, -0.25, 0.25 * np.exp(-(ax - 5) ** 2) * (ax - 1) ** 2 / 16)

    with pytest.raises(InvalidFamilyParams):
        domains.custom_law(1.5, 0.25, 0.0, eps_bump, K=0.5, gamma=0.0)


def test_spec_roundtrip_and_hash():
    law = domains.make_example("twopower", alpha=1.5, beta=-0.3, alpha_tilde=1.8, A_tilde=0.2)
    spec = domains.law_spec(law)
    assert spec == {"family": "twopower", "alpha": 1.5, "beta": -0.3, "alpha_tilde": 1.8, "A_tilde": 0.2}
    back = domains.law_from_spec(spec)
    assert back == law and hash(back) == hash(law)
    assert domains.law_spec(domains.make_example("slowvary", alpha=1.5)) == {"family": "slowvary", "alpha": 1.5}


# -- distribution function -------------------------------------------------------


def test_pareto_tails_closed_form():
    law = pareto(1.5, 0.4)
    x = np.array([1.0, 2.0, 10.0, 1e6])
    assert np.allclose(domains.tail_upper(law, x), 1.4 / 2 * x ** -1.5, rtol=1e-14)
    assert np.allclose(domains.tail_lower(law, -x), 0.6 / 2 * x ** -1.5, rtol=1e-14)
    assert domains.cdf(law, 0.3) == pytest.approx(0.3)
    assert domains.cdf(law, -0.3) == pytest.approx(0.3)


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-50, 50), y=st.floats(-50, 50), beta=st.floats(-1, 1),
       tag=st.sampled_from(["pareto", "trig", "logtail"]))
def test_cdf_monotone_and_reflection(x, y, beta, tag):
    law = domains.make_example(tag, alpha=1.5, beta=beta)
    mirror = domains.make_example(tag, alpha=1.5, beta=-beta)
    lo, hi = min(x, y), max(x, y)
    assert domains.cdf(law, lo) <= domains.cdf(law, hi) + 1e-15
    assert 0.0 <= domains.cdf(law, lo) <= 1.0
    assert domains.cdf(law, x) + domains.cdf(mirror, -x) == pytest.approx(1.0, abs=1e-14)


def test_amplitude_density_is_minus_derivative():
    for law in (domains.make_example("twopower", alpha=1.5, alpha_tilde=1.8),
                domains.make_example("trig", alpha=1.3, B=0.2),
                domains.make_example("logtail", alpha=1.7),
                domains.make_example("slowvary", alpha=1.5)):
        x = np.array([3.0, 7.5, 40.0])
        h = 1e-5 * x
        fd = -(law.amplitude(x + h) - law.amplitude(x - h)) / (2 * h)
        assert np.allclose(law.amplitude_density(x), fd, rtol=1e-7)


def test_slowvary_density_and_tail():
    law = domains.make_example("slowvary", alpha=1.5)
    mass = 2 * sci.quad(lambda x: float(law.density(x)), math.e, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert mass == pytest.approx(1.0, rel=1e-9)
    x = 20.0
    tail = sci.quad(lambda t: float(law.density(t)), x, np.inf, epsabs=1e-14)[0]
    assert domains.tail_upper(law, x) == pytest.approx(tail, rel=1e-8)


# -- sampling ----------------------------------------------------------------------


def test_sampling_keyed_by_seed_and_stream():
    law = pareto(1.5, 0.3)
    a = domains.sample(law, 100, 3, 0)
    assert np.array_equal(a, domains.sample(law, 100, 3, 0))
    assert not np.array_equal(a, domains.sample(law, 100, 3, 1))
    assert domains.sample(law, 0, 1).size == 0
    with pytest.raises(ParameterError):
        domains.sample(law, -1, 1)


def test_pareto_draws_match_closed_form_inverse():
    law = pareto(1.5, 0.0)
    u = np.array([0.1, 0.4, 0.7, 0.95])
    x = domains.draws_from_uniforms(law, np.full(4, 0.9), u)
    assert np.allclose(x, (1 - u) ** (-1 / 1.5), rtol=1e-13)
    xn = domains.draws_from_uniforms(law, np.full(4, 0.1), u)
    assert np.allclose(xn, -(1 - u) ** (-1 / 1.5), rtol=1e-13)


@pytest.mark.parametrize("tag,params", [
    ("pareto", {"beta": 0.5}),
    ("twopower", {"beta": -0.2, "alpha_tilde": 1.8}),
    ("trig", {"beta": 0.3, "B": 0.3}),
    ("logtail", {"beta": 0.0}),
    ("slowvary", {}),
])
def test_sampler_kolmogorov(tag, params):
    law = domains.make_example(tag, alpha=1.5, **params)
    x = domains.sample(law, 50_000, 21)
    res = stats.kstest(x, lambda v: domains.cdf(law, v))
    assert res.statistic < stats.kstwo.ppf(0.999, x.size)
    assert np.all(np.abs(x) >= law.cutoff * (1 - 1e-15))


# -- moments -----------------------------------------------------------------------


@pytest.mark.parametrize("alpha,beta", [(1.5, 0.0), (1.3, 0.6), (1.8, -1.0)])
def test_pareto_moments_closed_form(alpha, beta):
    m = domains.moments(pareto(alpha, beta))
    assert m.abs_mean == pytest.approx(alpha / (alpha - 1), rel=1e-9)
    assert m.mean == pytest.approx(beta * alpha / (alpha - 1), rel=1e-9, abs=1e-12)
    if beta == 0.0:
        assert m.centered_frac_moment == pytest.approx(alpha / (2 * alpha - 2), rel=1e-9)


def test_pareto_frac_moment_skewed_oracle():
    alpha, beta = 1.3, 0.6
    law = pareto(alpha, beta)
    mu = beta * alpha / (alpha - 1)
    q = 2 - alpha

    def dens(x, side):
        return (1 + side * beta) / 2 * alpha * x ** (-alpha - 1)

    right = sci.quad(lambda x: abs(x - mu) ** q * dens(x, 1), 1, np.inf, points=None, limit=200)[0]
    if 1 < mu:
        right = (sci.quad(lambda x: abs(x - mu) ** q * dens(x, 1), 1, mu)[0]
                 + sci.quad(lambda x: abs(x - mu) ** q * dens(x, 1), mu, np.inf, limit=200)[0])
    left = sci.quad(lambda x: (x + mu) ** q * dens(x, -1), 1, np.inf, limit=200)[0]
    assert domains.moments(law).centered_frac_moment == pytest.approx(left + right, rel=1e-7)


def test_twopower_abs_mean_closed_form():
    law = domains.make_example("twopower", alpha=1.5, alpha_tilde=1.8, A_tilde=0.25)
    expected = 1 + 2 * (0.25 / 0.5 + 0.25 / 0.8)
    assert domains.moments(law).abs_mean == pytest.approx(expected, rel=1e-9)


def test_trig_abs_mean_quadrature_oracle():
    B = 0.2
    law = domains.make_example("trig", alpha=1.5, B=B)
    A = law.A
    smooth = A / 0.5
    osc = sci.quad(lambda x: x ** -2.5, 1, np.inf, weight="sin", wvar=1.0)[0]
    expected = 1 + 2 * (smooth + B * osc)
    assert domains.moments(law).abs_mean == pytest.approx(expected, rel=1e-8)


# -- gamma_n ------------------------------------------------------------------------


@pytest.mark.parametrize("n", [10.0, 1024.0, 2.0 ** 18, 1e12])
def test_gamma_n_root(n):
    a = 1.5
    g = domains.gamma_n_solve(a, n)
    f = lambda x: a * math.log(x) - math.log(n) - math.log(math.log(x))
    ref = optimize.brentq(f, max(math.e, n ** (1 / a)), 10 * n, xtol=1e-14, rtol=1e-15)
    assert g == pytest.approx(ref, rel=1e-12)


def test_gamma_n_domain():
    with pytest.raises(ParameterError):
        domains.gamma_n_solve(1.5, 2.0)


# -- eps integral and supremum --------------------------------------------------------


def test_epsilon_integral_closed_forms():
    a = 1.5
    law = pareto(a)
    assert domains.epsilon_integral(law, 0.5) == pytest.approx(2 * 0.5 * 0.5 ** (2 - a) / (2 - a), rel=1e-10)
    assert domains.epsilon_integral(law, 30.0) == pytest.approx(2 * 0.5 / (2 - a), rel=1e-10)
    tp = domains.make_example("twopower", alpha=a, alpha_tilde=1.8, A_tilde=0.25)
    R = 100.0
    expected = 2 * 0.25 / (2 - a) + 2 * 0.25 * (R ** (2 - 1.8 + a - a) - 1) / (2 - 1.8)
    # |eps| x^(1-a) = A_tilde x^(a - at) x^(1 - a) = A_tilde x^(1 - at)
    assert domains.epsilon_integral(tp, R) == pytest.approx(expected, rel=1e-9)


def test_epsilon_integral_trig_oracle():
    law = domains.make_example("trig", alpha=1.5, B=0.2)
    R = 50.0
    head = 2 * law.A / 0.5
    pts = [k * math.pi for k in range(1, int(R / math.pi) + 1)]
    tail = sci.quad(lambda x: 0.2 * abs(math.sin(x)) * x ** -1.5, 1, R, points=pts, limit=200,
                    epsabs=1e-13, epsrel=1e-12)[0]
    assert domains.epsilon_integral(law, R) == pytest.approx(head + 2 * tail, rel=1e-9)


@pytest.mark.parametrize("R", [1.0, 2.5, 17.0, 1000.0])
def test_epsilon_sup_against_dense_grid(R):
    for law in (domains.make_example("trig", alpha=1.5, B=0.2),
                domains.make_example("twopower", alpha=1.5, alpha_tilde=1.8),
                domains.make_example("logtail", alpha=1.5)):
        x = np.concatenate([np.linspace(R, R + 20, 400_001), np.geomspace(R + 20, 1e9, 10_001)])
        x = x[x >= law.cutoff] if R >= law.cutoff else np.concatenate([np.linspace(R, law.cutoff, 1001), x])
        brute = np.max(np.abs(law.eps(x)))
        assert domains.epsilon_sup(law, R) == pytest.approx(brute, rel=1e-8)


def test_epsilon_sup_requires_positive_R():
    with pytest.raises(ParameterError):
        domains.epsilon_sup(pareto(), 0.0)
    with pytest.raises(ParameterError):
        domains.epsilon_integral(domains.make_example("slowvary", alpha=1.5), 2.0)
