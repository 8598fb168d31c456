import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ohmic_oscillator.quadrature import (
    NoConvergence,
    NonIntegrableTail,
    Peak,
    integrate,
    integrate_phase,
)


def test_exponential_on_half_line():
    r = integrate(lambda w: math.exp(-w), 0.0, math.inf, tol=1e-10)
    assert r.converged
    assert abs(r.value - 1.0) <= 1e-10
    assert r.err_estimate >= 0


def test_arctangent():
    r = integrate(lambda w: 1.0 / (1.0 + w * w), 0.0, 100.0)
    assert r.value == pytest.approx(math.atan(100.0), abs=1e-10)


def test_narrow_lorentzian_with_hint():
    g = 0.01
    r = integrate(lambda w: g / ((w - 1.0) ** 2 + g * g), 0.0, math.inf, hints=[Peak(1.0, g)])
    assert r.value == pytest.approx(math.pi / 2 + math.atan(100.0), abs=1e-9)


def test_very_narrow_peak_needs_hint():
    g = 1e-7
    f = lambda w: g / ((w - 0.7) ** 2 + g * g)
    hinted = integrate(f, 0.0, 10.0, hints=[(0.7, g)])
    assert hinted.value == pytest.approx(math.atan(0.7 / g) + math.atan(9.3 / g), abs=1e-8)


def test_reversed_limits_flip_sign():
    a = integrate(math.cos, 0.0, 1.0).value
    b = integrate(math.cos, 1.0, 0.0).value
    assert b == pytest.approx(-a, abs=1e-14)


def test_slow_tail_rejected():
    with pytest.raises(NonIntegrableTail):
        integrate(lambda w: 1.0 / (1.0 + w), 0.0, math.inf)


def test_no_convergence_raises_when_strict():
    f = lambda w: math.sin(1.0 / w) / w if w else 0.0
    with pytest.raises(NoConvergence):
        integrate(f, 0.0, 1.0, tol=1e-14, rtol=1e-14)
    r = integrate(f, 0.0, 1.0, tol=1e-14, rtol=1e-14, strict=False)
    assert not r.converged


def test_converged_implies_within_tolerance():
    r = integrate(lambda w: 1.0 / (1 + w**4), 0.0, math.inf, tol=1e-9)
    assert r.converged and r.err_estimate <= 1e-9


def test_phase_zero_rate():
    r = integrate_phase(lambda w: 1.0, 0.0, 0.0, 1.0)
    assert r.value == pytest.approx(1.0 + 0j, abs=1e-14)


def test_phase_pi():
    r = integrate_phase(lambda w: 1.0, math.pi, 0.0, 1.0)
    assert abs(r.value - 2j / math.pi) < 1e-12


def test_phase_lorentzian_against_riemann_sum():
    # brute-force oracle: trapezoid on a 1e-4 grid up to W plus an asymptotic tail
    k, h, W = 2.0, 1e-4, 200.0
    w = np.arange(0.0, W + h / 2, h)
    g = 1.0 / (1.0 + w * w)
    y = g * np.exp(1j * k * w)
    riemann = h * (y.sum() - 0.5 * (y[0] + y[-1]))
    gw, dgw = 1.0 / (1 + W * W), -2 * W / (1 + W * W) ** 2
    tail = np.exp(1j * k * W) * (1j * gw / k - dgw / k**2)
    oracle = riemann + tail
    r = integrate_phase(lambda x: 1.0 / (1.0 + x * x), k, 0.0, math.inf, tol=1e-10)
    assert abs(r.value - oracle) < 1e-7
    assert r.value.real == pytest.approx(0.5 * math.pi * math.exp(-k), abs=1e-9)


def test_phase_complex_amplitude():
    f = lambda w: (1.0 + 2.0j) / (1.0 + w * w)
    base = integrate_phase(lambda w: 1.0 / (1.0 + w * w), 1.5, 0.0, 50.0).value
    r = integrate_phase(f, 1.5, 0.0, 50.0)
    assert abs(r.value - (1 + 2j) * base) < 1e-9


def test_phase_rejects_negative_rate():
    with pytest.raises(ValueError):
        integrate_phase(lambda w: 1.0, -1.0, 0.0, 1.0)


def test_phase_zero_matches_integrate_exactly():
    f = lambda w: w / ((1 - w * w) ** 2 + 0.25 * w * w)
    a = integrate(f, 0.0, math.inf, hints=[Peak(1.0, 0.25)])
    b = integrate_phase(f, 0.0, 0.0, math.inf, hints=[Peak(1.0, 0.25)])
    assert b.value == complex(a.value, 0.0)


@given(a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(0.1, 5))
def test_linearity(a, b, c):
    f = lambda w: math.exp(-c * w)
    g = lambda w: 1.0 / (1.0 + w * w)
    lhs = integrate(lambda w: a * f(w) + b * g(w), 0.0, math.inf)
    rf, rg = integrate(f, 0.0, math.inf), integrate(g, 0.0, math.inf)
    bound = lhs.err_estimate + abs(a) * rf.err_estimate + abs(b) * rg.err_estimate + 1e-12
    assert abs(lhs.value - (a * rf.value + b * rg.value)) <= 10 * bound


@given(m=st.floats(0.05, 0.95), gamma=st.floats(0.01, 1.0))
def test_interval_additivity(m, gamma):
    f = lambda w: w / ((1 - w * w) ** 2 + (gamma * w) ** 2)
    hints = [Peak(1.0, gamma / 2)]
    whole = integrate(f, 0.0, 3.0, hints=hints)
    left, right = integrate(f, 0.0, 3.0 * m, hints=hints), integrate(f, 3.0 * m, 3.0, hints=hints)
    bound = whole.err_estimate + left.err_estimate + right.err_estimate + 1e-12 * abs(whole.value)
    assert abs(whole.value - left.value - right.value) <= 10 * bound


@pytest.mark.parametrize("k", [1e-300, 1e-9, 1e-4, 1e-2])
def test_phase_continuous_at_small_rate(k):
    f = lambda w: 1.0 / (1.0 + w * w)
    r = integrate_phase(f, k, 0.0, math.inf)
    # exact real part (pi/2) e^{-k}; imaginary part is O(k ln(1/k))
    assert r.value.real == pytest.approx(0.5 * math.pi * math.exp(-k), abs=1e-9)
    assert abs(r.value.imag) <= 2 * k * (1 + math.log(1 / k)) + 1e-12
