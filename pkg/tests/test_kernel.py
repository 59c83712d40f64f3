"""Truncated power series over Q and the q-combinatorics built on them."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qaffine.kernel import (
    SeriesDomainError, SeriesOrderError, TruncatedSeries, q_binom,
    q_exponent, q_factorial, q_int, q_power,
)

K = 3


def hb(order=K, power=1):
    return TruncatedSeries.hbar(order, power)


def test_product_truncates():
    a = TruncatedSeries.one(K) + hb()
    b = TruncatedSeries.one(K) - hb()
    assert a * b == TruncatedSeries(K, [1, 0, -1])


def test_inverse_of_one_plus_hbar():
    a = TruncatedSeries.one(K) + hb()
    assert a.inv() == TruncatedSeries(K, [1, -1, 1])
    assert a * a.inv() == TruncatedSeries.one(K)


def test_exp_taylor_coefficients():
    assert hb().exp() == TruncatedSeries(K, [1, 1, Fraction(1, 2)])


def test_exp_group_law():
    assert hb().exp() * (-hb()).exp() == TruncatedSeries.one(K)


def test_exp_additivity_on_samples():
    for ca in (Fraction(1, 2), Fraction(-2), Fraction(3, 5)):
        for cb in (Fraction(1, 3), Fraction(2)):
            a, b = hb() * ca, hb(K, 2) * cb
            assert (a + b).exp() == a.exp() * b.exp()


def test_exp_rejects_constant_term():
    with pytest.raises(SeriesDomainError):
        TruncatedSeries.one(K).exp()


def test_inv_rejects_zero_constant_term():
    with pytest.raises(SeriesDomainError):
        hb().inv()


def test_mixed_orders_rejected():
    with pytest.raises(SeriesOrderError):
        TruncatedSeries.one(3) + TruncatedSeries.one(4)


def test_shift_and_valuation():
    a = TruncatedSeries(K, [1, 2, 3])
    assert a.shift(1) == TruncatedSeries(K, [0, 1, 2])
    assert a.shift(1).valuation() == 1
    assert TruncatedSeries.zero(K).valuation() == K
    assert a.constant_term() == 1
    assert a[2] == 3


def test_q_int_small_values():
    assert q_int(0, 2, K).is_zero()
    assert q_int(1, 2, K) == TruncatedSeries.one(K)
    assert q_int(2, 2, K) == TruncatedSeries(K, [2, 0, 1])


def test_q_power_consistency():
    q = q_exponent(2, 4)
    assert q_power(3, 2, 4) == q * q * q
    assert q_power(-1, 2, 4) == q.inv()


def test_q_factorial_recursion():
    for n in range(1, 5):
        assert q_factorial(n, 2, 4) == q_factorial(n - 1, 2, 4) * q_int(n, 2, 4)


def test_q_binom_edges_and_example():
    for n in range(5):
        assert q_binom(n, 0, 2, K) == TruncatedSeries.one(K)
        assert q_binom(n, n, 2, K) == TruncatedSeries.one(K)
    assert q_binom(2, 1, 2, K) == TruncatedSeries(K, [2, 0, 1])


def test_q_binom_symmetry():
    for n in range(7):
        for i in range(n + 1):
            assert q_binom(n, i, 2, 4) == q_binom(n, n - i, 2, 4)


def test_q_binom_is_polynomial_count_at_order_zero():
    # constant term must be the ordinary binomial coefficient
    from math import comb

    for n in range(7):
        for i in range(n + 1):
            assert q_binom(n, i, 2, 4).constant_term() == comb(n, i)


rationals = st.builds(
    Fraction,
    st.integers(min_value=-50, max_value=50),
    st.integers(min_value=1, max_value=10),
)
series3 = st.lists(rationals, max_size=3).map(
    lambda cs: TruncatedSeries(3, cs[:3]))


@settings(max_examples=60, deadline=None)
@given(series3, series3, series3)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a + (-a) == TruncatedSeries.zero(3)


@settings(max_examples=60, deadline=None)
@given(series3)
def test_inverse_roundtrip(a):
    if a.constant_term() == 0:
        with pytest.raises(SeriesDomainError):
            a.inv()
    else:
        assert a * a.inv() == TruncatedSeries.one(3)


@settings(max_examples=40, deadline=None)
@given(series3, series3)
def test_exp_homomorphism(a, b):
    a, b = a.shift(1), b.shift(1)
    assert (a + b).exp() == a.exp() * b.exp()
