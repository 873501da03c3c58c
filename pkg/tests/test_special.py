import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from edgekernel.special import (
    DEFAULT_BESSEL,
    BesselEvalConfig,
    bessel_j,
    bessel_j_prime,
    bessel_kernel,
    bessel_kernel_diagonal_series,
    bessel_kernel_offdiagonal,
    log_gamma,
    sine_kernel,
)

from oracles import bisect_root, half_integer_bessel_kernel, richardson_diagonal

ORDERS = [-0.5, 0.0, 0.3, 1.0, 2.5]
ZS = np.linspace(0.1, 25.0, 60)


# log_gamma


def test_log_gamma_examples():
    assert log_gamma(1.0) == (0.0, 1)
    assert log_gamma(0.5)[0] == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-15)
    assert log_gamma(0.5)[0] == pytest.approx(0.572364943, abs=1e-9)
    assert log_gamma(5.0)[0] == pytest.approx(math.log(24.0), rel=1e-15)


def test_log_gamma_against_stdlib():
    for x in np.linspace(-3.0, 200.0, 4001):
        if x <= 0 and x == math.floor(x):
            continue
        value, sign = log_gamma(x)
        ref = math.lgamma(x)
        assert abs(value - ref) <= 1e-13 * max(1.0, abs(ref)), x
        if x < 171:
            assert sign == (1 if math.gamma(x) > 0 else -1), x


@pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -3.0])
def test_log_gamma_poles(x):
    with pytest.raises(ValueError):
        log_gamma(x)


# J_alpha


def test_j_at_zero():
    assert bessel_j(0.0, 0.0) == 1.0
    for a in (0.3, 1.0, 2.5):
        assert bessel_j(a, 0.0) == 0.0


def test_j_half_closed_form():
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-15)
    for z in np.linspace(0.05, 30, 200):
        closed = math.sqrt(2 / (math.pi * z)) * math.sin(z)
        assert abs(bessel_j(0.5, z) - closed) <= 1e-12
        closed_neg = math.sqrt(2 / (math.pi * z)) * math.cos(z)
        assert abs(bessel_j(-0.5, z) - closed_neg) <= 1e-12


def test_j0_first_zero_by_bisection():
    root = bisect_root(lambda z: bessel_j(0.0, z), 2.0, 3.0)
    assert abs(root - 2.404825558) <= 1e-9


@pytest.mark.parametrize("alpha", ORDERS + [-1.5, -0.9, 5.0])
def test_j_against_scipy(alpha):
    for z in ZS:
        ref = sp.jv(alpha, z)
        assert abs(bessel_j(alpha, z) - ref) <= 1e-12 * max(1.0, abs(ref)), z


def test_j_domain():
    with pytest.raises(ValueError):
        bessel_j(-2.0, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0.0, 30.5)
    with pytest.raises(ValueError):
        bessel_j(0.0, -1.0)
    with pytest.raises(ValueError):
        bessel_j(-0.5, 0.0)


def test_series_tolerance_halving():
    half = BesselEvalConfig(series_tolerance=DEFAULT_BESSEL.series_tolerance / 2)
    for a in ORDERS:
        for z in ZS:
            v1, v2 = bessel_j(a, z), bessel_j(a, z, half)
            assert abs(v1 - v2) <= 1e-12 * abs(v1), (a, z)


def test_series_terms_converge_on_full_range():
    for a in ORDERS:
        bessel_j(a, 30.0)


def test_series_max_terms_exhausted():
    with pytest.raises(ArithmeticError):
        bessel_j(0.0, 25.0, BesselEvalConfig(max_terms=10))


def test_recurrence_consistency():
    for a in ORDERS:
        for z in ZS:
            lhs = bessel_j(a - 1, z) + bessel_j(a + 1, z)
            rhs = 2 * a / z * bessel_j(a, z)
            scale = abs(bessel_j(a - 1, z)) + abs(bessel_j(a + 1, z))
            assert abs(lhs - rhs) <= 1e-10 * scale, (a, z)


# derivative


def test_j0_prime_is_minus_j1():
    assert abs(bessel_j_prime(0.0, 1.0) + bessel_j(1.0, 1.0)) <= 1e-12


def test_j_half_prime_closed_form():
    z = math.pi / 2
    # d/dz [sqrt(2/(pi z)) sin z] = sqrt(2/pi) (cos z / sqrt z - sin z / (2 z^1.5))
    closed = math.sqrt(2 / math.pi) * (math.cos(z) / math.sqrt(z) - math.sin(z) / (2 * z**1.5))
    assert bessel_j_prime(0.5, z) == pytest.approx(closed, rel=1e-13)


def _central_difference(alpha, z, h=1e-5):
    return (bessel_j(alpha, z + h) - bessel_j(alpha, z - h)) / (2 * h)


def test_derivative_finite_difference_example():
    assert abs(bessel_j_prime(0.3, 2.0) - _central_difference(0.3, 2.0)) <= 1e-7


def test_derivative_finite_difference_grid():
    for a in ORDERS:
        for z in np.linspace(0.25, 25.0, 50):
            d = bessel_j_prime(a, z)
            assert abs(d - _central_difference(a, z)) <= 1e-7 * (1 + abs(d)), (a, z)


def test_derivative_domain():
    with pytest.raises(ValueError):
        bessel_j_prime(0.0, 0.0)
    with pytest.raises(ValueError):
        bessel_j_prime(-1.0, 1.0)


# Bessel kernel


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.floats(0.01, 100), st.floats(0.01, 100))
def test_kernel_symmetric(alpha, u, v):
    assert bessel_kernel(alpha, u, v) == pytest.approx(bessel_kernel(alpha, v, u), rel=1e-12, abs=1e-300)


def test_kernel_diagonal_against_richardson_oracle():
    for alpha in ORDERS:
        for u in (0.25, 1.0, 4.0, 25.0, 90.0):
            oracle = richardson_diagonal(lambda s, t: bessel_kernel_offdiagonal(alpha, s, t), u)
            assert abs(bessel_kernel(alpha, u, u) / oracle - 1) <= 1e-6, (alpha, u)


def test_kernel_near_diagonal_example():
    near = bessel_kernel(0.0, 1.0, 1.0 + 1e-8)
    diag = bessel_kernel(0.0, 1.0, 1.0)
    assert abs(near / diag - 1) <= 1e-6
    oracle = richardson_diagonal(lambda s, t: bessel_kernel_offdiagonal(0.0, s, t), 1.0)
    assert abs(diag / oracle - 1) <= 1e-6


def test_kernel_half_order_closed_form():
    assert bessel_kernel(0.5, 1.0, 4.0) == pytest.approx(half_integer_bessel_kernel(1.0, 4.0), rel=1e-12)
    for u, v in ((0.3, 7.0), (10.0, 60.0), (2.0, 2.5)):
        assert bessel_kernel(0.5, u, v) == pytest.approx(half_integer_bessel_kernel(u, v), rel=1e-11)


def test_kernel_against_scipy_route():
    def ref(alpha, u, v):
        su, sv = math.sqrt(u), math.sqrt(v)
        return (sp.jv(alpha, su) * sv * sp.jvp(alpha, sv) - sp.jv(alpha, sv) * su * sp.jvp(alpha, su)) / (2 * (u - v))

    for alpha in ORDERS:
        for u, v in ((0.25, 1.0), (1.0, 10.0), (5.0, 2.5), (80.0, 3.0)):
            assert bessel_kernel(alpha, u, v) == pytest.approx(ref(alpha, u, v), rel=1e-10, abs=1e-14)


def test_kernel_crossover_band():
    thr = DEFAULT_BESSEL.diagonal_threshold
    for alpha in ORDERS:
        for u in (0.5, 1.0, 10.0, 100.0):
            for f in (0.5, 0.8, 1.0, 1.5, 2.0):
                v = u + f * thr * max(1.0, u)
                off = bessel_kernel_offdiagonal(alpha, u, v)
                ser = bessel_kernel_diagonal_series(alpha, u, v)
                assert abs(off / ser - 1) <= 1e-8, (alpha, u, f)


def test_kernel_diagonal_positive():
    for alpha in (-0.5, 0.0, 1.0):
        for u in np.linspace(0.01, 100.0, 300):
            assert bessel_kernel(alpha, u, u) > 0


def test_kernel_small_argument_asymptotics():
    # J_alpha(u, u) ~ u^alpha 2^(-2 alpha - 2) / (Gamma(alpha+1) Gamma(alpha+2)) as u -> 0
    for alpha in (-0.5, 0.0, 1.0, 2.5):
        u = 1e-8
        lead = u**alpha * 2 ** (-2 * alpha - 2) / (math.gamma(alpha + 1) * math.gamma(alpha + 2))
        assert bessel_kernel(alpha, u, u) == pytest.approx(lead, rel=1e-6)


def test_kernel_at_zero():
    assert bessel_kernel(0.0, 0.0, 0.0) == pytest.approx(0.25, rel=1e-15)
    assert bessel_kernel(1.0, 0.0, 3.0) == 0.0
    with pytest.raises(ValueError):
        bessel_kernel(-0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        bessel_kernel(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        bessel_kernel(0.0, -1.0, 1.0)


# sine kernel


def test_sine_kernel_examples():
    assert sine_kernel(0.3, 0.3) == 1.0
    assert sine_kernel(2.0, 1.0) == 0.0
    assert sine_kernel(1.5, 1.0) == pytest.approx(2 / math.pi, rel=1e-15)


@settings(max_examples=100)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_sine_kernel_matches_sinc(a, b):
    assert sine_kernel(a, b) == pytest.approx(float(np.sinc(a - b)), rel=1e-9, abs=1e-13)
    assert sine_kernel(a, b) == sine_kernel(b, a)
