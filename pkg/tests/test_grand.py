import math
from fractions import Fraction

import pytest

from branchgas import (
    MultiPoly,
    RationalFn,
    TruncSeries,
    branch_operator,
    fixed_point_iterate,
    fixed_point_operator_step,
    grand_partition,
    mean_partition,
    mean_partition_numeric,
    regular,
    two_point,
    verify_functional_equation,
    weighted_grand_partition,
    zero_temp_grand_partition,
)
from branchgas.grand import _factored_series
from branchgas.ratfun import FactoredFraction

F = Fraction


class TestGrandSeries:
    def test_low_orders_are_one(self, acceptance_laws):
        for law in acceptance_laws:
            s = grand_partition(law, 1).series
            assert s[0] == RationalFn.constant(1)
            assert s[1] == RationalFn.constant(1)

    def test_regular_two_coefficient(self):
        s = grand_partition(regular(2), 2).series
        assert s[2] == RationalFn(
            MultiPoly.one(), (MultiPoly.constant(2) - MultiPoly.var(2)) * 2
        )

    def test_beta_zero_specialization_is_exponential(self, mixed_law):
        s = grand_partition(mixed_law, 8).series
        for n, c in enumerate(s.coeffs):
            point = {q: F(1) for q in c.variables()}
            assert c.evaluate_exact(point) == F(1, math.factorial(n))


class TestWeightedSeries:
    def test_base_one_is_identity(self, mixed_law):
        assert weighted_grand_partition(mixed_law, 1, 5) == grand_partition(mixed_law, 5).series

    def test_regular_weighting(self):
        s = weighted_grand_partition(regular(2), 2, 2)
        z2 = mean_partition(regular(2), 2)
        assert s[2] == z2 * MultiPoly.var(2)

    def test_orders_zero_one_always_one(self, acceptance_laws):
        for law in acceptance_laws:
            for q in (2, 3):
                s = weighted_grand_partition(law, q, 3)
                assert s[0] == RationalFn.constant(1)
                assert s[1] == RationalFn.constant(1)


class TestFunctionalEquation:
    def test_regular_order_eight(self):
        rep = verify_functional_equation(regular(2), 8)
        assert rep.passed and rep.first_failure is None
        assert all(r == "0" for r in rep.residuals)

    def test_mixed_order_eight(self, mixed_law):
        assert verify_functional_equation(mixed_law, 8).passed

    def test_two_point_order_twelve(self):
        assert verify_functional_equation(two_point(2, F(1, 2)), 12).passed

    def test_low_orders_trivially_zero(self, law_2_5):
        rep = verify_functional_equation(law_2_5, 4)
        assert rep.residuals[0] == "0" and rep.residuals[1] == "0"


class TestFixedPoint:
    def test_matches_recursion_series(self):
        fp = fixed_point_iterate(regular(2), 6)
        ref = grand_partition(regular(2), 6).series
        assert all(a == b for a, b in zip(fp.coeffs, ref.coeffs))

    def test_true_fixed_point_is_unchanged(self, mixed_law):
        zs = _factored_series(mixed_law, 6)
        stepped = fixed_point_operator_step(mixed_law, zs)
        assert all((a - b).is_zero for a, b in zip(stepped.coeffs, zs.coeffs))

    def test_each_step_gains_an_order(self, mixed_law):
        one = FactoredFraction.one()
        zero = FactoredFraction.zero()
        order = 5
        current = TruncSeries([one, one] + [zero] * (order - 1))
        reference = _factored_series(mixed_law, order)
        for step in range(1, order):
            current = fixed_point_operator_step(mixed_law, current)
            prefix = step + 1
            for n in range(prefix + 1):
                assert (current[n] - reference[n]).is_zero, (step, n)

    def test_iterates_preserve_low_orders(self, mixed_law):
        fp = fixed_point_iterate(mixed_law, 4)
        assert fp[0] == RationalFn.constant(1)
        assert fp[1] == RationalFn.constant(1)

    def test_operator_preserves_normalization(self, law_2_5):
        zs = _factored_series(law_2_5, 4)
        image = branch_operator(law_2_5, zs)
        assert (image[0] - zs[0]).is_zero
        assert (image[1] - zs[1]).is_zero

    def test_iteration_cap_raises(self, mixed_law):
        from branchgas import NoConvergenceError

        with pytest.raises(NoConvergenceError):
            fixed_point_iterate(mixed_law, 8, max_iter=2)


class TestZeroTemperature:
    def test_regular_closed_form(self):
        # (1 + t/q)^q
        for q in (2, 3):
            s = zero_temp_grand_partition(regular(q), 6)
            for n in range(7):
                assert s[n].as_fraction() == F(math.comb(q, n), q**n)

    def test_two_point_conditioning_removes_p(self):
        for p in (F(1, 4), F(2, 3)):
            assert zero_temp_grand_partition(two_point(2, p), 5) == zero_temp_grand_partition(
                regular(2), 5
            )

    def test_mixed_expansion(self, mixed_law):
        # brute-force expansion of (1/2)(1+t/2)^2 + (1/2)(1+t/3)^3
        expected = [F(0)] * 7
        for q, w in ((2, F(1, 2)), (3, F(1, 2))):
            for n in range(q + 1):
                expected[n] += w * F(math.comb(q, n), q**n)
        s = zero_temp_grand_partition(mixed_law, 6)
        assert [c.as_fraction() for c in s.coeffs] == expected

    def test_large_beta_numeric_agreement(self, acceptance_laws):
        for law in acceptance_laws:
            s = zero_temp_grand_partition(law, 6)
            for n in range(7):
                v = mean_partition_numeric(law, n, 60.0)
                assert v == pytest.approx(float(s[n].as_fraction()), abs=1e-6)
