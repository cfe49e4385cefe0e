import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from branchgas import MultiPoly, OrderMismatchError, RationalFn, TruncSeries

F = Fraction


def const_series(values):
    return TruncSeries([RationalFn.constant(v) for v in values])


def as_fractions(series):
    return [c.as_fraction() for c in series.coeffs]


class TestMul:
    def test_binomial_square(self):
        s = const_series([1, 1, 0])
        assert as_fractions(s * s) == [1, 2, 1]

    def test_exponential_identity(self):
        # (sum t^n / n!)^2 = sum 2^n t^n / n!, checked against an
        # independently computed right-hand side
        T = 3
        e = const_series([F(1, math.factorial(n)) for n in range(T + 1)])
        expected = [F(2**n, math.factorial(n)) for n in range(T + 1)]
        assert as_fractions(e * e) == expected

    def test_one_is_identity(self):
        a = const_series([3, F(1, 2), 5, 0])
        one = const_series([1, 0, 0, 0])
        assert a * one == a

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatchError):
            const_series([1, 1]) * const_series([1, 1, 1])


class TestPow:
    def test_binomial_cube(self):
        s = const_series([1, 1, 0, 0])
        assert as_fractions(s.pow(3)) == [1, 3, 3, 1]

    def test_first_power_identity(self):
        a = const_series([2, F(1, 3), 7])
        assert a.pow(1) == a

    def test_half_step_square(self):
        s = const_series([1, F(1, 2), 0])
        assert as_fractions(s.pow(2)) == [1, 1, F(1, 4)]

    @settings(max_examples=20, deadline=None)
    @given(
        st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3),
                 min_size=3, max_size=13),
        st.integers(min_value=1, max_value=8),
    )
    def test_pow_equals_iterated_mul(self, values, q):
        a = const_series(values)
        expected = a
        for _ in range(q - 1):
            expected = expected * a
        assert a.pow(q) == expected


class TestRescale:
    def test_half(self):
        s = const_series([1, 1])
        assert as_fractions(s.rescale(2)) == [1, F(1, 2)]

    def test_identity(self):
        a = const_series([5, F(2, 7), 1])
        assert a.rescale(1) == a

    def test_third_squared(self):
        s = const_series([0, 0, 1])
        assert as_fractions(s.rescale(3)) == [0, 0, F(1, 9)]


class TestPairWeight:
    def test_quadratic_order_picks_up_variable(self):
        s = const_series([1, 1, 1])
        w = s.pair_weighted(2)
        assert w[0] == RationalFn.constant(1)
        assert w[1] == RationalFn.constant(1)
        assert w[2] == RationalFn(MultiPoly.var(2))  # C(2,2) = 1

    def test_orders_zero_one_fixed_for_all_bases(self):
        s = const_series([1, 1])
        for q in (1, 2, 3, 7):
            assert s.pair_weighted(q) == s

    def test_cubic_order(self):
        s = const_series([0, 0, 0, 1])
        w = s.pair_weighted(3)
        assert w[3] == RationalFn(MultiPoly.var(3, 3))  # C(3,2) = 3

    def test_linearity(self):
        a = const_series([1, 2, 3, 4])
        b = const_series([5, 0, F(1, 2), 1])
        assert (a + b).pair_weighted(2) == a.pair_weighted(2) + b.pair_weighted(2)
        assert (a * F(3, 2)).pair_weighted(2) == a.pair_weighted(2) * F(3, 2)
