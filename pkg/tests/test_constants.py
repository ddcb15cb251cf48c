import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmdensity.constants import (
    MAX_POLYLOG_ORDER,
    A_const,
    B_const,
    bell_partial,
    bell_partial_enumerate,
    big_C_m,
    c_inert_closed,
    c_inert_d,
    c_inert_integral,
    c_ram,
    c_total,
    constants_report,
    log_deriv_L4,
    log_deriv_zeta_part,
    polylog_neg,
    polylog_series,
    polylog_series_tail,
    zeta43_logderiv,
)
from cmdensity.primes import sieve



# --- polylogarithm -----------------------------------------------------------------

@pytest.mark.parametrize("j", range(0, 11))
@pytest.mark.parametrize("z", [0.5, -0.5, 2**-0.5, -(2**-0.5), 1 / 3, -1 / 7, 1 / 9, 0.9])
def test_polylog_against_mpmath(j, z):
    with mpmath.workdps(40):
        ref = float(mpmath.polylog(-j, z))
    assert polylog_neg(j, z) == pytest.approx(ref, rel=1e-13, abs=1e-15)


@given(st.integers(0, 12), st.floats(-0.6, 0.6))
def test_polylog_against_series(j, z):
    b = polylog_series(j, z)
    if polylog_series_tail(j, z) < 1e-14 * max(1.0, abs(b)):
        assert abs(polylog_neg(j, z) - b) <= 1e-12 * max(1.0, abs(b))


def test_polylog_numerators_are_eulerian():
    # P_j(1) = j! and the small cases are classical
    from cmdensity.constants import _polyfraction

    for j in range(1, 12):
        assert sum(_polyfraction(j).coeffs) == math.factorial(j)
    assert _polyfraction(1).coeffs == (0, 1)
    assert _polyfraction(2).coeffs == (0, 1, 1)
    assert _polyfraction(3).coeffs == (0, 1, 4, 1)


def test_polylog_vectorised_and_guards():
    zs = np.array([0.1, -0.3, 0.5])
    out = polylog_neg(4, zs)
    assert out.shape == (3,) and out[2] == pytest.approx(polylog_neg(4, 0.5))
    with pytest.raises(ValueError):
        polylog_neg(2, 1.0)
    with pytest.raises(ValueError):
        polylog_neg(MAX_POLYLOG_ORDER + 1, 0.5)


# --- Bell polynomials -----------------------------------------------------------------

def test_bell_exact_for_small_n():
    xs_int = list(range(2, 12))
    xs_frac = [Fraction(i * i - 3, i + 1) for i in range(1, 10)]
    for n in range(0, 9):
        for k in range(0, n + 1):
            assert bell_partial(n, k, xs_frac) == bell_partial_enumerate(n, k, xs_frac)
            assert bell_partial(n, k, xs_int) == bell_partial_enumerate(n, k, xs_int)


def test_bell_all_ones_gives_stirling():
    for n in range(1, 10):
        for k in range(1, n + 1):
            assert bell_partial(n, k, [1] * n) == int(mpmath.stirling2(n, k))


# --- log-derivatives at 1 -----------------------------------------------------------------

def _cauchy_derivative(fn, n):
    # contour integral on |s - 1| = 1/4, so the removable point s = 1 is never evaluated
    return mpmath.diff(fn, 1, n, method="quad", radius=0.25).real


def _log_f(s):
    return mpmath.log((s - 1) * mpmath.zeta(s))


def _log_l4(s):
    # L(s, chi_4) through Hurwitz zeta values
    return mpmath.log(4 ** (-s) * (mpmath.zeta(s, 0.25) - mpmath.zeta(s, 0.75)))


@pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
def test_log_deriv_zeta_part_against_numeric_differentiation(j):
    with mpmath.workdps(30):
        ref = float(_cauchy_derivative(_log_f, j + 1))
    assert log_deriv_zeta_part(j) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
def test_log_deriv_l4_against_numeric_differentiation(j):
    with mpmath.workdps(30):
        ref = float(_cauchy_derivative(_log_l4, j + 1))
    assert log_deriv_L4(j) == pytest.approx(ref, abs=1e-12)


def test_log_deriv_l4_closed_form():
    with mpmath.workdps(30):
        ref = mpmath.euler + 2 * mpmath.log(2) + 3 * mpmath.log(mpmath.pi) - 4 * mpmath.log(mpmath.gamma(0.25))
    assert log_deriv_L4(0) == pytest.approx(float(ref), abs=1e-15)


def test_log_derivative_reference_values():
    assert log_deriv_zeta_part(0) == pytest.approx(0.57721566, abs=1e-6)
    assert log_deriv_L4(0) == pytest.approx(0.24560958, abs=1e-6)
    assert B_const(0) == pytest.approx(0.33160608, abs=1e-6)
    assert log_deriv_zeta_part(2) == pytest.approx(0.10337726, abs=1e-6)
    assert log_deriv_L4(2) == pytest.approx(0.29505047, abs=1e-6)
    assert B_const(2) == pytest.approx(-0.0958366, abs=1e-5)


# --- the inert Euler product ---------------------------------------------------------------

def test_t0_against_direct_double_sum():
    x = 10**4
    total = 0.0
    for p in sieve(x).primes_3mod4:
        q = float(p) ** -2
        n, term = 1, q
        while term > 1e-30:
            total += 2 * math.log(p) * term
            term *= q
            n += 1
    assert zeta43_logderiv(0, x).value == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize("j", [0, 2, 4])
def test_t_intervals_nest(j, table_1e6):
    lo = zeta43_logderiv(j, 10**3, table_1e6)
    hi = zeta43_logderiv(j, 10**6, table_1e6)
    assert lo.value <= hi.value <= lo.value + lo.tail
    assert hi.tail < lo.tail


def test_t_values(table_1e6):
    t0 = zeta43_logderiv(0, 10**6, table_1e6)
    t2 = zeta43_logderiv(2, 10**6, table_1e6)
    assert t0.value == pytest.approx(0.45747, abs=1e-4) and t0.tail <= 3e-5
    assert t2.value == pytest.approx(3.93, abs=0.01) and t2.tail <= 0.014
    with pytest.raises(ValueError):
        zeta43_logderiv(6, 10)


# --- pieces of c_j ----------------------------------------------------------------------------

def test_c_ram_examples():
    assert c_ram(0, 1) == 0.0 and c_ram(3, 6) == 0.0
    r = 2**-0.5
    assert c_ram(0, 8) == pytest.approx(-math.log(2) * r / (1 - r), rel=1e-14)
    assert c_ram(0, 4) == pytest.approx(-math.log(2) * (-r) / (1 + r), rel=1e-14)


def test_c_ram_against_direct_series():
    for j in (0, 1, 2, 5):
        for alpha in (4, 8):
            s = (-1) ** (alpha // 4)
            ref = -sum(s**n * math.log(2) * 2 ** (-n / 2) * (n * math.log(2) / 2) ** j
                       for n in range(1, 400)) / math.factorial(j)
            assert c_ram(j, alpha) == pytest.approx(ref, rel=1e-12)


def test_c_inert_d_examples():
    for j in range(4):
        for a in range(1, 9):
            assert c_inert_d(j, a, 1) == 0.0
    assert c_inert_d(0, 1, 3) == pytest.approx(2 * math.log(3) * (-0.25), rel=1e-14)
    ref = sum(2 * math.log(p) * (1 / p) / (1 - 1 / p) for p in (3, 7))
    assert c_inert_d(0, 2, 21) == pytest.approx(ref, rel=1e-14)
    assert c_inert_d(0, 4, 21) == 0.0
    # p = 1 mod 4 divisors of d do not contribute
    assert c_inert_d(1, 1, 5) == 0.0


def test_c_inert_closed_structure(table_1e6):
    even = c_inert_closed(0, 8, 10**6, table_1e6)
    odd = c_inert_closed(0, 1, 10**6, table_1e6)
    t0 = zeta43_logderiv(0, 10**6, table_1e6).value
    assert even.value == pytest.approx(B_const(0) + math.log(2) - t0, abs=1e-12)
    assert odd.value == pytest.approx(-(B_const(0) + math.log(2)) - t0, abs=1e-12)
    c2 = c_total(2, 1, 8, 10**6, table_1e6).value
    assert c2 == pytest.approx(A_const(2) + B_const(2) - zeta43_logderiv(2, 10**6, table_1e6).value, abs=1e-12)


def test_c_inert_integral_cross_check(table_1e6):
    assert c_inert_integral(0, 1, 1) == pytest.approx(1.0)
    assert c_inert_integral(0, 8, 1) == pytest.approx(-1.0)
    closed = c_inert_closed(0, 8, 10**6, table_1e6).value
    vals = [c_inert_integral(0, 8, T, table_1e6) for T in (10**4, 10**5, 10**6)]
    assert abs(vals[-1] - closed) < 0.05
    # successive truncations approach the closed value
    assert abs(vals[2] - closed) < abs(vals[1] - closed) < abs(vals[0] - closed)


def test_ab_c_reference_values(table_1e6):
    assert A_const(0) == pytest.approx(-2.81814, abs=1e-5)
    assert A_const(2) == pytest.approx(-1.00081, abs=1e-5)
    assert c_total(0, 1, 8, 10**6, table_1e6).value == pytest.approx(-2.9440, abs=1e-3)
    assert c_total(2, 1, 8, 10**6, table_1e6).value == pytest.approx(-5.0, abs=0.1)


def test_big_c():
    c0 = c_total(0, 5, 3).value
    assert big_C_m(1, 5, 3, [1.0]).value == pytest.approx(c0)
    derivs = {0: 2.0, 2: -3.0}
    c2 = c_total(2, 5, 3).value
    assert big_C_m(3, 5, 3, derivs).value == pytest.approx(2 * (2.0 * c0 + c2 * -3.0 / 2))
    with pytest.raises(ValueError):
        big_C_m(3, 5, 3, [1.0])
    with pytest.raises(ValueError):
        big_C_m(0, 5, 3, [1.0])


def test_constants_report_contents(table_1e6):
    rep = constants_report(21, 1, 1, x=10**6, fhat_derivs=[1.0, 0.0], table=table_1e6)
    d = rep.to_dict()
    assert d["alpha"] == 1 and len(d["c_total"]) == 2 and len(d["C_m"]) == 1
    assert d["c_inert_d"][0] == pytest.approx(c_inert_d(0, 1, 21))
    assert d["c_inert_d"][0] != 0.0
    small = constants_report(1, 8, 3, x=10**3)
    big = constants_report(1, 8, 3, x=10**6, table=table_1e6)
    for lo, hi in zip(small.c_total, big.c_total):
        assert lo["tail_bound"] > hi["tail_bound"]
        assert hi["value"] <= lo["value"] and hi["value"] >= lo["value"] - lo["tail_bound"]


@pytest.mark.parametrize("j", range(1, 11))
def test_c_j_sign_pattern_report(j, table_1e6):
    """Recorded sign of c_j(1, 8) for j = 1..10 (observed negative)."""
    assert c_total(j, 1, 8, 10**6, table_1e6).value < 0
