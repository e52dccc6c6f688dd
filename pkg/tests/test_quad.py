import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sci
from scipy.special import gamma

from stablestein import quad
from stablestein.errors import EnvelopeViolated, InvalidInterval, NonConvergent, ParameterError

TIGHT = quad.QuadConfig(rel_tol=1e-11, abs_tol=1e-13, max_subdivisions=4000)


def one_minus_cos_oracle(alpha):
    """Composite Simpson on (0, 1) after a power substitution, plus an analytic tail.

    On (0, 1) put y = s**2: the integrand becomes 4 s sin^2(s^2/2) / s^(2 + 2 alpha),
    which is smooth.  On (1, L) plain Simpson; beyond L, (1 - cos y) y^(-1-alpha)
    integrates to L^-alpha / alpha minus a cosine part bounded by L^(-1-alpha).
    """
    s = np.linspace(1e-12, 1.0, 200_001)
    core = sci.simpson(4 * s * np.sin(0.5 * s * s) ** 2 / s ** (2 + 2 * alpha), x=s)
    L = 2000.0
    y = np.linspace(1.0, L, 4_000_001)
    mid = sci.simpson((1 - np.cos(y)) / y ** (1 + alpha), x=y)
    # -int_L^inf cos(y) y^(-1-alpha) dy by one integration by parts
    cos_tail = math.sin(L) * L ** (-1 - alpha)
    return core + mid + L ** (-alpha) / alpha + cos_tail


def test_zero_integrand():
    r = quad.integrate(lambda x: np.zeros_like(x), 0.0, 1.0)
    assert r.value == 0.0 and r.error_estimate == 0.0 and r.evaluations >= 1


def test_constant_integrand():
    r = quad.integrate(lambda x: np.ones_like(x), 2.0, 5.0)
    assert r.value == pytest.approx(3.0, rel=1e-14)


def test_one_minus_cos_against_simpson_oracle():
    a = 1.5
    # 2 sin^2(y/2) avoids the cancellation in 1 - cos y near 0
    head = quad.integrate(lambda y: 2 * np.sin(0.5 * y) ** 2 / y ** (1 + a), 0.0, 1.0, TIGHT,
                          singularity=a - 1.0)
    cos_tail = quad.integrate_semi_infinite(lambda y: np.cos(y) / y ** (1 + a), 1.0,
                                            TIGHT.replace(oscillation_mode="fourier"), period=2 * math.pi)
    value = head.value + 1.0 / a - cos_tail.value
    closed = gamma(1 - a) * math.cos(math.pi * a / 2) / a
    assert value == pytest.approx(closed, rel=1e-9)
    assert value == pytest.approx(one_minus_cos_oracle(a), rel=1e-6)


def test_bad_interval():
    with pytest.raises(InvalidInterval):
        quad.integrate(np.sin, 1.0, 1.0)
    with pytest.raises(InvalidInterval):
        quad.integrate(np.sin, 2.0, 1.0)


def test_nonconvergent_budget():
    cfg = quad.QuadConfig(rel_tol=1e-14, abs_tol=0.0, max_subdivisions=2)
    with pytest.raises(NonConvergent):
        quad.integrate(lambda x: np.sin(1.0 / x), 1e-4, 1.0, cfg)


def test_config_validation():
    with pytest.raises(ParameterError):
        quad.QuadConfig(rel_tol=0.0)
    with pytest.raises(ParameterError):
        quad.QuadConfig(abs_tol=-1.0)
    with pytest.raises(ParameterError):
        quad.QuadConfig(max_subdivisions=0)


def test_semi_infinite_exponential_and_power():
    assert quad.integrate_semi_infinite(lambda x: np.exp(-x), 0.0).value == pytest.approx(1.0, rel=1e-9)
    assert quad.integrate_semi_infinite(lambda x: x ** -2.0, 1.0).value == pytest.approx(1.0, rel=1e-9)


def test_sine_integral_matches_one_minus_cos_identity():
    # int_0^inf sin(v) v^-alpha dv = alpha int_0^inf (1 - cos y) y^(-1-alpha) dy
    a = 1.5
    cfg = TIGHT.replace(oscillation_mode="fourier")
    lhs = quad.integrate_semi_infinite(lambda v: np.sin(v) / v ** a, 0.0, cfg, singularity=a - 1.0,
                                       period=2 * math.pi).value
    s = np.linspace(1e-12, 1.0, 200_001)
    head = sci.simpson(4 * s * np.sin(0.5 * s * s) ** 2 / s ** (2 + 2 * a), x=s)
    rhs = a * (head + 1.0 / a - sci.quad(lambda y: y ** (-1 - a), 1.0, np.inf, weight="cos", wvar=1.0)[0])
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_envelope_violation_detected():
    env = quad.Envelope(scale=1e-3, exponent=2.0, start=1.0)
    with pytest.raises(EnvelopeViolated):
        quad.integrate_semi_infinite(lambda x: 1.0 / x ** 2, 1.0, envelope=env)


def test_power_tail_substitution():
    r = quad.integrate_power_tail(lambda x: 1.0 / (x ** 1.7 + x ** 0.5), 2.0, 1.7)
    ref = sci.quad(lambda x: 1.0 / (x ** 1.7 + x ** 0.5), 2.0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    assert r.value == pytest.approx(ref, rel=1e-8)


def test_oscillatory_indicator():
    g = lambda t: (np.abs(t) <= 1.0).astype(float)
    # a half-period panel grid at lam = pi puts breakpoints at +-1
    r = quad.integrate_oscillatory(g, math.pi)
    assert abs(r.real.value) < 1e-10 and abs(r.imag.value) < 1e-10


def test_oscillatory_zero_frequency_reduces_to_half_lines():
    g = lambda t: np.exp(-np.abs(t) ** 1.5)
    r = quad.integrate_oscillatory(g, 0.0)
    half = quad.integrate_semi_infinite(g, 0.0).value
    assert r.real.value == pytest.approx(2 * half, rel=1e-12)
    assert r.imag.value == 0.0


def test_oscillatory_stable_density_trapezoid_oracle():
    g = lambda t: np.exp(-np.abs(t) ** 1.5)
    r = quad.integrate_oscillatory(g, 1.0)
    T = (16 * math.log(10)) ** (1 / 1.5) + 1
    t = np.linspace(-T, T, 400_001)
    oracle = np.trapezoid(g(t) * np.cos(t), t)
    assert r.real.value == pytest.approx(oracle, abs=1e-9)
    assert abs(r.imag.value) < 1e-10


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-10, 10), lo=st.floats(-3, 0), width=st.floats(0.1, 5))
def test_linearity(c, lo, width):
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    base = quad.integrate(f, lo, lo + width)
    scaled = quad.integrate(lambda x: c * f(x), lo, lo + width)
    tol = 2 * max(quad.DEFAULT_CONFIG.rel_tol * abs(c * base.value), quad.DEFAULT_CONFIG.abs_tol)
    assert abs(scaled.value - c * base.value) <= tol + 1e-15


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-2, 0), w1=st.floats(0.05, 3), w2=st.floats(0.05, 3))
def test_interval_additivity(a, w1, w2):
    f = lambda x: 1.0 / (1.0 + x * x) + np.sin(5 * x)
    b, c = a + w1, a + w1 + w2
    left, right, whole = quad.integrate(f, a, b), quad.integrate(f, b, c), quad.integrate(f, a, c)
    assert abs(left.value + right.value - whole.value) <= (
        left.error_estimate + right.error_estimate + whole.error_estimate + 1e-14)


def test_error_estimate_bounds_true_error():
    rng = np.random.default_rng(7)
    cases = 0
    held = 0
    for _ in range(200):
        k = rng.uniform(0.5, 20.0)
        lo, hi = sorted(rng.uniform(-3, 3, 2))
        if hi - lo < 1e-3:
            continue
        r = quad.integrate(lambda x: np.cos(k * x), lo, hi)
        exact = (math.sin(k * hi) - math.sin(k * lo)) / k
        cases += 1
        held += abs(r.value - exact) <= r.error_estimate + 1e-15
    assert held >= 0.99 * cases


def test_strong_endpoint_singularity():
    # x^-0.99 on (0, 1): the substitution power is 100, so x underflows for u < 1e-3
    r = quad.integrate(lambda x: x ** -0.99, 0.0, 1.0, TIGHT, singularity=0.99)
    assert r.value == pytest.approx(100.0, rel=1e-10)
    r = quad.integrate(lambda x: x ** -0.995 * np.exp(-x), 0.0, 1.0, TIGHT, singularity=0.995)
    oracle = sci.quad(lambda t: np.exp(-t ** 200) * 200, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)[0]
    assert r.value == pytest.approx(oracle, rel=1e-9)


def test_right_endpoint_singularity():
    r = quad.integrate(lambda x: (1.0 - x) ** -0.6 * np.exp(x), 0.0, 1.0, TIGHT, singularity=(0.0, 0.6))
    oracle = sci.quad(lambda t: np.exp(1.0 - t ** 2.5) * 2.5, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)[0]
    assert r.value == pytest.approx(oracle, rel=1e-9)
