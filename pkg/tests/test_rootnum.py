from fractions import Fraction

import pytest

from cmdensity.rootnum import (
    Method,
    negative_fraction,
    root_number_closed,
    root_number_gauss,
    s_minus,
    s_plus,
)

ODD_SQUAREFREE = [d for a in (1, 3, 5, 7, 11, 13, 15) for d in (a, -a)]


@pytest.mark.parametrize("d,k,w", [(1, 1, 1), (5, 1, -1), (3, 3, -1), (1, 2, 1), (7, 1, -1)])
def test_closed_examples(d, k, w):
    assert root_number_closed(d, k) == w


def test_gauss_matches_closed_example():
    r = root_number_gauss(-3, 5)
    assert r.w == root_number_closed(-3, 5) and r.method is Method.GAUSS_SUM
    assert abs(r.raw - r.w) == r.residual < 1e-9


@pytest.mark.parametrize("d", [1, 3, 5, -3, 7, -7, 11, 13, 21, -21, 35])
def test_s_minus_agrees_with_gauss_oracle(d):
    from_oracle = {a for a in (1, 3, 5, 7) if root_number_gauss(d, a).w == -1}
    assert s_minus(d) == from_oracle
    assert s_plus(d) == {1, 3, 5, 7} - from_oracle


def test_s_minus_examples():
    assert s_minus(1) == {5, 7}
    assert s_minus(3) == {3, 7}
    # -7 = 9 mod 16 falls in the {5, 7} case for negative d
    assert s_minus(-7) == {5, 7}


@pytest.mark.parametrize("d", ODD_SQUAREFREE)
def test_sign_period_eight(d):
    for k in range(1, 33):
        assert root_number_closed(d, k) == root_number_closed(d, k + 8)
    assert sum(root_number_closed(d, k) == -1 for k in range(1, 9)) == 2


def test_negative_fraction():
    assert negative_fraction(1, 8) == Fraction(1, 4)
    assert abs(negative_fraction(1, 10**4) - Fraction(1, 4)) <= Fraction(8, 10**4)
    for d in (1, 3, -5, 7):
        assert negative_fraction(d, 8 * 123) == Fraction(1, 4)
    brute = sum(root_number_closed(5, k) == -1 for k in range(1, 38))
    assert negative_fraction(5, 37) == Fraction(brute, 37)


def test_gauss_cutoffs():
    with pytest.raises(OverflowError):
        root_number_gauss(101, 1)
    with pytest.raises(OverflowError):
        root_number_gauss(1, 65)
    with pytest.raises(ValueError):
        root_number_closed(1, 0)


def test_gauss_even_k_residuals():
    for d in (3, -5, 15):
        for k in (2, 6, 10):
            r = root_number_gauss(d, k)
            assert r.w == 1 and r.residual < 1e-9
