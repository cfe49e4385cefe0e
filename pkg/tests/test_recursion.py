from fractions import Fraction

import pytest

from branchgas import (
    MultiPoly,
    RationalFn,
    denominator_negative_root,
    factorial_reference,
    mean_partition,
    mean_partition_at_zero,
    mean_partition_exact_at,
    mean_partition_numeric,
    mean_partition_numeric_direct,
    mean_partition_table,
    regular,
    two_point,
)
from branchgas.recursion import mean_partition_factored

F = Fraction


def regular_two_particle_reference(q: int) -> RationalFn:
    """Independent oracle for the two-particle value on the regular tree.

    Conditioning the pair integral I = E[dist^beta] on whether both points
    fall under the same root child gives I = (1 - 1/q) + (1/q) u_q I
    (different children: distance 1; same child: everything scales by 1/q
    and by the decay factor).  Solving and halving (the 1/2! symmetry
    factor) yields Z_2 = I/2 = (q - 1) / (2 (q - u_q)).
    """
    u = MultiPoly.var(q)
    i_num = MultiPoly.constant(Fraction(q - 1, q))
    i_den = MultiPoly.one() - u * Fraction(1, q)
    return RationalFn(i_num, i_den * 2)


class TestClosedForms:
    def test_initial_values(self, acceptance_laws):
        for law in acceptance_laws:
            assert mean_partition(law, 0) == RationalFn.constant(1)
            assert mean_partition(law, 1) == RationalFn.constant(1)

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_regular_two_particles(self, q):
        assert mean_partition(regular(q), 2) == regular_two_particle_reference(q)

    def test_mixed_two_particles(self, mixed_law):
        u2, u3 = MultiPoly.var(2), MultiPoly.var(3)
        expected = RationalFn(
            MultiPoly.constant(F(7, 24)),
            MultiPoly.one() - u2 * F(1, 4) - u3 * F(1, 6),
        )
        assert mean_partition(mixed_law, 2) == expected

    def test_table_matches_per_n(self, mixed_law):
        table = mean_partition_table(mixed_law, 5)
        assert table.n_max == 5
        for n in range(6):
            assert table[n] == mean_partition(mixed_law, n)

    def test_table_examples(self):
        t = mean_partition_table(regular(2), 2)
        assert t[0] == RationalFn.constant(1)
        assert t[1] == RationalFn.constant(1)
        assert t[2] == RationalFn(MultiPoly.one(), (MultiPoly.constant(2) - MultiPoly.var(2)) * 2)
        t0 = mean_partition_table(regular(3), 0)
        assert t0.n_max >= 0 and t0[0] == RationalFn.constant(1)


class TestTwoPointCollapse:
    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("p", [F(1, 4), F(1, 2), F(3, 4)])
    def test_collapse(self, q, p):
        for n in range(9):
            assert mean_partition(two_point(q, p), n) == mean_partition(regular(q), n)


class TestBetaZero:
    def test_factorial_identity(self, acceptance_laws):
        for law in acceptance_laws:
            for n in range(11):
                assert mean_partition_at_zero(law, n) == factorial_reference(n)


class TestNumeric:
    def test_mixed_beta_one(self, mixed_law):
        assert mean_partition_numeric(mixed_law, 2, 1.0) == pytest.approx(21 / 59, abs=1e-14)
        assert mean_partition_exact_at(mixed_law, 2, 1) == F(21, 59)

    def test_large_beta_limit_regular(self):
        # coefficient of t^2 in (1 + t/2)^2 is 1/4
        assert mean_partition_numeric(regular(2), 2, 60.0) == pytest.approx(0.25, abs=1e-9)

    def test_beta_zero_numeric(self, acceptance_laws):
        for law in acceptance_laws:
            for n in range(6):
                assert mean_partition_numeric(law, n, 0.0) == pytest.approx(
                    float(factorial_reference(n)), abs=1e-12
                )

    def test_direct_recursion_matches_symbolic(self, mixed_law, law_2_5):
        for law in (mixed_law, law_2_5):
            for beta in (0.0, 0.7, 1.5, 3.0):
                for n in range(9):
                    direct = mean_partition_numeric_direct(law, n, beta)
                    symbolic = mean_partition_numeric(law, n, beta)
                    assert direct == pytest.approx(symbolic, rel=1e-10)

    def test_monotone_in_beta(self, acceptance_laws):
        grid = [0.5 * k for k in range(9)]
        for law in acceptance_laws:
            for n in (2, 3, 5):
                values = [mean_partition_numeric(law, n, b) for b in grid]
                assert all(a >= b - 1e-14 for a, b in zip(values, values[1:]))

    def test_positive_value_and_matching_signs(self, acceptance_laws):
        # num and den always carry the same sign for beta >= 0, i.e. the
        # fraction can be written with both parts positive
        for law in acceptance_laws:
            for n in range(11):
                f = mean_partition(law, n)
                for beta in (0.0, 0.5, 1.0, 2.5):
                    num = f.num.evaluate(beta)
                    den = f.den.evaluate(beta)
                    assert num * den > 0
                    assert f.evaluate(beta) > 0


class TestDenominatorStructure:
    def test_factors_come_from_moment_family(self, mixed_law):
        # every denominator factor is (up to content) 1 - moment(m), m <= n
        n = 8
        ff = mean_partition_factored(mixed_law, n)
        family = {}
        for m in range(2, n + 1):
            _, prim = (MultiPoly.one() - mixed_law.moment(m)).primitive_parts()
            family[prim] = m
        for factor in ff.factors:
            assert factor in family

    def test_divides_moment_product_numerically(self, mixed_law):
        n = 6
        den = mean_partition(mixed_law, n).den
        for beta in (0.35, 1.2, 2.8):
            product = 1.0
            for m in range(2, n + 1):
                product *= 1.0 - mixed_law.moment(m).evaluate(beta)
            # the denominator's zeros are zeros of the product: away from
            # them the ratio is finite and stable
            ratio = product / den.evaluate(beta)
            assert ratio == pytest.approx(ratio, abs=0) and abs(ratio) < 1e6


class TestNegativeBetaPoles:
    def test_regular_two_particle_pole(self):
        # q - u_q vanishes exactly at beta = -1
        for q in (2, 3):
            root = denominator_negative_root(regular(q), 2)
            assert root == pytest.approx(-1.0, abs=1e-9)

    def test_no_root_for_trivial_cases(self, mixed_law):
        assert denominator_negative_root(mixed_law, 1) is None

    def test_analytic_continuation_value(self):
        # at beta = -1/2 the continuation is still finite for q = 2
        v = mean_partition_numeric(regular(2), 2, -0.5)
        assert v == pytest.approx((2 - 1) / (2 * (2 - 2**0.5)), rel=1e-12)
