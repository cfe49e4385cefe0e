import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from branchgas import (
    BranchingLaw,
    DegenerateLawError,
    DuplicateSupportError,
    InvalidProbabilityError,
    LawError,
    MultiPoly,
    ProbabilitySumNotOneError,
    ZeroChildrenForbiddenError,
    regular,
    two_point,
)

F = Fraction


@st.composite
def random_laws(draw):
    support = draw(
        st.lists(st.sampled_from([2, 3, 4, 5, 7]), min_size=1, max_size=3, unique=True)
    )
    if draw(st.booleans()):
        support = [1] + support
    weights = [draw(st.integers(min_value=1, max_value=8)) for _ in support]
    total = sum(weights)
    return BranchingLaw.from_pairs([(q, F(w, total)) for q, w in zip(support, weights)])


class TestValidation:
    def test_valid_two_point(self):
        law = BranchingLaw.from_pairs([(2, F(1, 2)), (3, F(1, 2))])
        assert law.support() == (2, 3)

    def test_degenerate_single_child(self):
        with pytest.raises(DegenerateLawError):
            BranchingLaw.from_pairs([(1, F(1))])

    def test_zero_children_forbidden(self):
        with pytest.raises(ZeroChildrenForbiddenError):
            BranchingLaw.from_pairs([(0, F(1, 2)), (2, F(1, 2))])

    def test_sum_not_one(self):
        with pytest.raises(ProbabilitySumNotOneError):
            BranchingLaw.from_pairs([(2, F(1, 2)), (3, F(2, 5))])

    def test_duplicate_support(self):
        with pytest.raises(DuplicateSupportError):
            BranchingLaw.from_pairs([(2, F(1, 2)), (2, F(1, 2))])

    def test_probability_range(self):
        with pytest.raises(InvalidProbabilityError):
            BranchingLaw.from_pairs([(2, F(3, 2)), (3, F(-1, 2))])


class TestMoments:
    def test_two_point_matches_closed_form(self):
        # E[Q^(1-N) w] for {q w.p. p, 1 w.p. 1-p} at N=2: (1-p) + (p/q) u_q
        for q, p in ((2, F(1, 3)), (5, F(3, 4))):
            law = two_point(q, p)
            expected = MultiPoly.constant(1 - p) + MultiPoly.var(q) * (p / q)
            assert law.moment(2) == expected

    def test_moment_one_is_one(self):
        for law in (regular(2), two_point(3, F(1, 2))):
            assert law.moment(1) == MultiPoly.one()

    def test_mixed_law_hand_expansion(self):
        # brute force over the support: sum_q p_q q^(1-2) u_q^C(2,2)
        law = BranchingLaw.from_pairs([(2, F(1, 2)), (3, F(1, 2))])
        brute = MultiPoly.zero()
        for q, p in law.entries:
            brute = brute + MultiPoly.var(q) * (p * F(1, q))
        assert law.moment(2) == brute
        assert brute == MultiPoly.var(2) * F(1, 4) + MultiPoly.var(3) * F(1, 6)

    @settings(max_examples=40, deadline=None)
    @given(random_laws(), st.integers(min_value=1, max_value=6))
    def test_beta_zero_equals_direct_expectation(self, law, n):
        # substituting 1 for every variable must give E[Q^(1-n)] exactly
        direct = sum(p * F(1, q ** (n - 1)) for q, p in law.entries)
        point = {q: F(1) for q in law.moment(n).variables()}
        assert law.moment(n).evaluate_exact(point) == direct

    @settings(max_examples=40, deadline=None)
    @given(random_laws())
    def test_moment_one_property(self, law):
        assert law.moment(1) == MultiPoly.one()

    def test_affine_in_the_law(self):
        # mixing laws with weight lambda mixes the moments
        lam = F(1, 4)
        a = BranchingLaw.from_pairs([(2, F(1))])
        b = BranchingLaw.from_pairs([(3, F(1))])
        mix = BranchingLaw.from_pairs([(2, lam), (3, 1 - lam)])
        for n in range(1, 6):
            assert mix.moment(n) == a.moment(n) * lam + b.moment(n) * (1 - lam)


class TestMean:
    def test_examples(self):
        assert BranchingLaw.from_pairs([(2, F(1, 2)), (3, F(1, 2))]).mean() == F(5, 2)
        assert regular(7).mean() == 7
        assert BranchingLaw.from_pairs([(5, F(1, 3)), (2, F(2, 3))]).mean() == 3


class TestJson:
    def test_roundtrip(self, tmp_path):
        law = BranchingLaw.from_pairs([(2, F(1, 2)), (3, F(1, 2))])
        path = tmp_path / "law.json"
        path.write_text(json.dumps(law.to_json()))
        assert BranchingLaw.from_file(path) == law

    def test_decimal_probability_rejected(self, tmp_path):
        path = tmp_path / "law.json"
        path.write_text('{"law": [{"q": 2, "p": 0.5}, {"q": 3, "p": 0.5}]}')
        with pytest.raises(LawError):
            BranchingLaw.from_file(path)

    def test_decimal_string_rejected(self, tmp_path):
        path = tmp_path / "law.json"
        path.write_text('{"law": [{"q": 2, "p": "0.5"}, {"q": 3, "p": "0.5"}]}')
        with pytest.raises(LawError):
            BranchingLaw.from_file(path)
