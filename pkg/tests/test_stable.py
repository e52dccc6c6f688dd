import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci
from scipy import stats
from scipy.optimize import minimize_scalar
from scipy.special import gamma

from stablestein import quad, stable
from stablestein.errors import NonPositiveA, OutOfRangeAlpha, OutOfRangeBeta, NonPositiveSigma, TableMismatch

ALPHAS = (1.1, 1.3, 1.5, 1.7, 1.9)
BETAS = (-1.0, -0.5, 0.0, 0.5, 1.0)
ABS_DERIV_REGRESSION = 0.5702360353403095  # int |p'| for alpha=1.5, beta=0.5


def P(alpha, beta=0.0, sigma=1.0):
    return stable.StableParams(alpha, sigma, beta)


# -- parameters ---------------------------------------------------------------


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5, 2.5, math.nan])
def test_alpha_open_interval(alpha):
    with pytest.raises(OutOfRangeAlpha):
        P(alpha)


def test_beta_and_sigma_ranges():
    with pytest.raises(OutOfRangeBeta):
        P(1.5, 1.01)
    with pytest.raises(NonPositiveSigma):
        P(1.5, 0.0, 0.0)
    P(1.5, 1.0)
    P(1.5, -1.0)


# -- characteristic function ----------------------------------------------------


def test_char_fn_at_zero():
    assert stable.char_fn(P(1.4, 0.6), 0.0) == 1 + 0j


def test_char_fn_symmetric_real():
    t = np.linspace(-5, 5, 41)
    v = stable.char_fn(P(1.7, 0.0, 1.3), t)
    assert np.all(v.imag == 0)
    assert np.allclose(v.real, np.exp(-np.abs(1.3 * t) ** 1.7))


@settings(max_examples=50, deadline=None)
@given(t=st.floats(-20, 20), alpha=st.floats(1.01, 1.99), beta=st.floats(-1, 1))
def test_char_fn_hermitian_and_bounded(t, alpha, beta):
    p = P(alpha, beta)
    assert stable.char_fn(p, -t) == pytest.approx(np.conj(stable.char_fn(p, t)), abs=1e-15)
    assert abs(stable.char_fn(p, t)) <= 1.0 + 1e-15


@settings(max_examples=30, deadline=None)
@given(t=st.floats(-5, 5), sigma=st.floats(0.1, 5), alpha=st.floats(1.05, 1.95), beta=st.floats(-1, 1))
def test_scaling_law_char_fn(t, sigma, alpha, beta):
    assert stable.char_fn(P(alpha, beta, sigma), t) == pytest.approx(
        stable.char_fn(P(alpha, beta), sigma * t), abs=1e-14)


# -- constants ------------------------------------------------------------------


@pytest.mark.parametrize("alpha", ALPHAS)
def test_d_alpha_quadrature_vs_closed_form(alpha):
    assert stable.d_alpha(alpha) == pytest.approx(stable.d_alpha_closed_form(alpha), rel=1e-8)


@pytest.mark.parametrize("alpha", [1.001, 1.98, 1.99, 1.999])
def test_d_alpha_near_interval_ends(alpha):
    # near 2 the endpoint substitution has a large power and the distance underflows
    assert stable.d_alpha(alpha) == pytest.approx(stable.d_alpha_closed_form(alpha), rel=1e-8)


def test_d_alpha_ballpark():
    assert round(stable.d_alpha(1.5), 3) == 0.598


@pytest.mark.parametrize("alpha", [1.1, 1.5, 1.9])
def test_d_alpha_inverse_of_integral(alpha):
    assert stable.d_alpha(alpha) * stable.one_minus_cos_integral(alpha) == pytest.approx(1.0, rel=1e-14)


def test_d_alpha_sine_identity():
    a = 1.3
    cfg = quad.QuadConfig(rel_tol=1e-11, abs_tol=1e-13, oscillation_mode="fourier")
    sine = quad.integrate_semi_infinite(lambda v: np.sin(v) / v ** a, 0.0, cfg, singularity=a - 1.0,
                                        period=2 * math.pi).value
    assert 1.0 / stable.d_alpha(a) == pytest.approx(sine / a, rel=1e-8)


def test_beta_factor_quadrature():
    a = 1.5
    cfg = quad.QuadConfig(rel_tol=1e-11)
    # both halves written with the singular endpoint at 0
    left = quad.integrate(lambda u: u ** (2 / a - 1) * (1 - u) ** (-1 / a), 0.0, 0.5, cfg,
                          singularity=max(0.0, 1 - 2 / a)).value
    right = quad.integrate(lambda v: (1 - v) ** (2 / a - 1) * v ** (-1 / a), 0.0, 0.5, cfg,
                           singularity=1 / a).value
    direct = left + right
    assert stable.beta_factor(a) == pytest.approx(direct, rel=1e-9)


def test_sigma_from_A_routes_and_example1():
    assert stable.sigma_from_A(1.7, 0.25) == pytest.approx(stable.sigma_from_A(1.7, 0.25, "integral"), rel=1e-10)
    a = 1.5
    assert stable.sigma_from_A(a, 0.5) == pytest.approx((a / stable.d_alpha(a)) ** (1 / a), rel=1e-14)
    # independent full-line integral via scipy on the substituted head and weighted tail
    full = 2 * (sci.quad(lambda y: 2 * math.sin(y / 2) ** 2 / y ** 2.7, 0, 1, epsabs=1e-13, epsrel=1e-12)[0]
                + 1 / 1.7 - sci.quad(lambda y: y ** -2.7, 1, np.inf, weight="cos", wvar=1.0)[0])
    assert stable.sigma_from_A(1.7, 0.25) == pytest.approx((0.25 * 1.7 * full) ** (1 / 1.7), rel=1e-8)


def test_sigma_monotone_in_A_and_errors():
    assert stable.sigma_from_A(1.4, 0.3) > stable.sigma_from_A(1.4, 0.2)
    with pytest.raises(NonPositiveA):
        stable.sigma_from_A(1.4, 0.0)
    with pytest.raises(OutOfRangeAlpha):
        stable.sigma_from_A(2.0, 0.5)


def test_eta_symmetry_and_finiteness():
    for b in (0.3, 0.8):
        assert stable.eta(P(1.5, b)) == pytest.approx(stable.eta(P(1.5, -b)), rel=1e-6)
    for a in (1.1, 1.5, 1.9):
        for b in (-1.0, 0.0, 1.0):
            v = stable.eta(P(a, b))
            assert 0 < v < math.inf
    with pytest.raises(TableMismatch):
        stable.eta(P(1.5, 0.0, 2.0))


def test_abs_derivative_integral_regression():
    # unimodal density: int |p'| = 2 max p; mode located with pointwise inversion
    p = P(1.5, 0.5)
    table = stable.build_table(p)
    f = lambda x: -float(np.ravel(stable.density_pointwise(p, x)[0])[0])
    mode = minimize_scalar(f, bounds=(-3, 1), method="bounded", options={"xatol": 1e-9})
    assert table.abs_deriv_integral() == pytest.approx(-2 * mode.fun, rel=1e-9)
    assert table.abs_deriv_integral() == pytest.approx(ABS_DERIV_REGRESSION, rel=1e-9)


# -- density table --------------------------------------------------------------


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("beta", BETAS)
def test_total_mass_and_monotone_cdf(alpha, beta):
    t = stable.build_table(P(alpha, beta))
    assert t.total_mass() == pytest.approx(1.0, abs=1e-6)
    assert np.all(t.pdf_values >= 0)
    assert np.all(np.diff(t.cdf_values) >= 0)
    assert 0 <= t.cdf_values[0] and t.cdf_values[-1] <= 1


def test_pdf_at_zero_closed_form():
    table = stable.build_table(P(1.5))
    assert stable.pdf(table, 0.0) == pytest.approx(gamma(1 + 2 / 3) / math.pi, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(x=st.floats(-40, 40))
def test_symmetric_pdf(x):
    table = stable.build_table(P(1.5))
    assert stable.pdf(table, x) == pytest.approx(stable.pdf(table, -x), rel=1e-8, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(x=st.floats(-30, 30), alpha=st.sampled_from(ALPHAS), beta=st.sampled_from(BETAS))
def test_reflection_law(x, alpha, beta):
    a = stable.build_table(P(alpha, beta))
    b = stable.build_table(P(alpha, -beta))
    assert float(stable.pdf(a, x)) == pytest.approx(float(stable.pdf(b, -x)), abs=1e-8)
    assert float(stable.cdf(a, x)) + float(stable.cdf(b, -x)) == pytest.approx(1.0, abs=1e-8)


def test_scaling_of_pdf_and_derivative():
    p1, p2 = P(1.6, 0.3), P(1.6, 0.3, 2.0)
    t1, t2 = stable.build_table(p1), stable.build_table(p2)
    x = np.linspace(-7, 7, 29)
    assert np.allclose(stable.pdf(t2, x), 0.5 * stable.pdf(t1, x / 2), rtol=1e-10, atol=1e-15)
    assert np.allclose(stable.pdf_deriv(t2, x), 0.25 * stable.pdf_deriv(t1, x / 2), rtol=1e-10, atol=1e-15)


def test_pdf_deriv_symmetric_zero_and_finite_difference():
    table = stable.build_table(P(1.5))
    assert abs(stable.pdf_deriv(table, 0.0)) < 1e-12
    rng = np.random.default_rng(3)
    x = rng.uniform(-5, 5, 20)
    h = 1e-4
    fd = (stable.pdf(table, x + h) - stable.pdf(table, x - h)) / (2 * h)
    assert np.allclose(fd, stable.pdf_deriv(table, x), atol=1e-7)


def test_pdf_matches_pointwise_inversion():
    p = P(1.3, -0.6)
    table = stable.build_table(p)
    x = np.array([-8.0, -1.3, 0.0, 0.7, 5.0])
    direct = np.array([float(np.ravel(stable.density_pointwise(p, v)[0])[0]) for v in x])
    assert np.allclose(stable.pdf(table, x), direct, rtol=1e-6)


def test_cdf_median_and_quantile_roundtrip():
    table = stable.build_table(P(1.5))
    assert stable.cdf(table, 0.0) == pytest.approx(0.5, abs=1e-9)
    t2 = stable.build_table(P(1.2, 0.7))
    u = np.arange(1, 100) / 100
    assert np.max(np.abs(stable.cdf(t2, stable.quantile(t2, u)) - u)) <= 1e-6
    assert stable.cdf(t2, stable.quantile(t2, 0.9)) == pytest.approx(0.9, abs=1e-6)


def test_table_mismatch():
    table = stable.build_table(P(1.5))
    with pytest.raises(TableMismatch):
        stable.pdf(table, 0.0, P(1.6))


def test_table_dump_load_roundtrip(tmp_path):
    table = stable.build_table(P(1.4, 0.2))
    path = tmp_path / "t.csv"
    table.dump(path)
    back = stable.DensityTable.load(path)
    x = np.linspace(-30, 30, 101)
    assert np.allclose(back.cdf(x), table.cdf(x), atol=1e-13)
    assert np.allclose(back.pdf(x), table.pdf(x), atol=1e-13)


# -- sampler --------------------------------------------------------------------


def test_sample_empty_and_deterministic():
    assert stable.sample(P(1.5), 0, 1).size == 0
    assert np.array_equal(stable.sample(P(1.5, 0.3), 50, 9), stable.sample(P(1.5, 0.3), 50, 9))


def test_sampler_char_fn_band():
    n = 100_000
    p = P(1.5, 0.7)
    x = stable.sample(p, n, 11)
    for t in (0.3, 1.0, 3.0):
        assert abs(np.mean(np.exp(1j * t * x)) - stable.char_fn(p, t)) <= 4 / math.sqrt(n)


def test_sampler_sign_balance():
    n = 100_000
    x = stable.sample(P(1.5), n, 5)
    assert abs(np.sum(x > 0) - n / 2) <= 4 * math.sqrt(n)


def test_sampler_kolmogorov():
    n = 100_000
    p = P(1.3, -0.5)
    table = stable.build_table(p)
    res = stats.kstest(stable.sample(p, n, 17), lambda v: stable.cdf(table, v))
    crit = stats.kstwo.ppf(0.999, n)
    assert res.statistic < crit
