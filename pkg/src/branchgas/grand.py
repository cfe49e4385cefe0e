"""Grand-canonical layer: generating functions in the fugacity.

The mean grand partition series has the mean canonical values as its
coefficients.  Conditioning on the root child count shows it solves

    Z(t) = sum_q p_q * ( W_q[Z](t/q) )^q,

where W_q weights the n-th coefficient by the monomial for
q**(-beta*C(n,2)).  This module builds the series, verifies that identity
coefficient-by-coefficient in exact arithmetic, recovers the series as the
unique fixed point of the right-hand side from the seed 1 + t, and checks
the closed-form zero-temperature limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NoConvergenceError
from .law import BranchingLaw
from .poly import MultiPoly
from .ratfun import FactoredFraction, RationalFn, fsum
from .recursion import _extend_table
from .report import Report, from_residuals
from .series import TruncSeries


@dataclass(frozen=True)
class GrandPartitionSeries:
    """Mean grand partition series; coefficients of t^0 and t^1 are 1."""

    law: BranchingLaw
    series: TruncSeries

    @property
    def order(self) -> int:
        return self.series.order


def _factored_series(law: BranchingLaw, order: int) -> TruncSeries:
    vals = _extend_table(law, order)
    return TruncSeries(vals[: order + 1])


def grand_partition(law: BranchingLaw, order: int) -> GrandPartitionSeries:
    """Mean grand partition series truncated at the given order."""
    if order < 1:
        raise ValueError("order must be >= 1")
    coeffs = [v.as_ratfn() for v in _extend_table(law, order)[: order + 1]]
    return GrandPartitionSeries(law, TruncSeries(coeffs))


def weighted_grand_partition(law: BranchingLaw, q: int, order: int) -> TruncSeries:
    """The pair-weighted variant: coefficient n carries var_q^C(n,2)."""
    if q < 1:
        raise ValueError("weight base must be >= 1")
    return grand_partition(law, order).series.pair_weighted(q)


def branch_operator(law: BranchingLaw, series: TruncSeries) -> TruncSeries:
    """One application of alpha -> sum_q p_q (W_q[alpha](t/q))^q.

    Works on any exact coefficient type; shared by the functional-equation
    check and the fixed-point iteration so the two cannot drift apart.
    """
    total = None
    for q, p in law.entries:
        term = series.pair_weighted(q).rescale(q).pow(q) * p
        total = term if total is None else total + term
    return total


def verify_functional_equation(law: BranchingLaw, order: int) -> Report:
    """Exact residual of the self-consistency identity, per order."""
    zs = _factored_series(law, order)
    residual = zs - branch_operator(law, zs)
    return from_residuals(
        f"functional-equation(law={law}, order={order})",
        residual.coeffs,
        lambda c: c.is_zero,
        details={"law": str(law), "order": order},
    )


def fixed_point_iterate(
    law: BranchingLaw, order: int, max_iter: int | None = None
) -> TruncSeries:
    """Recover the grand partition series as the operator's fixed point.

    Starts from 1 + t.  A raw operator application maps the order-n
    coefficient to M_n * a_n + (terms in lower orders), with M_n the law
    moment, so raw iteration leaves a geometrically shrinking but
    never-zero error.  Each application therefore solves the affine
    diagonal exactly:

        a_n' = (Phi(a)_n - M_n a_n) / (1 - M_n),

    which depends on lower orders only; fixed points are unchanged (the
    equation rearranges a = Phi(a)) and every application pins down at
    least one further coefficient, so at most `order` applications run.
    Each application is taken at the lowest order it can still improve
    (already-stable prefixes are not recomputed), and a final full-order
    application confirms exact stabilization.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if max_iter is None:
        max_iter = order + 2
    one = FactoredFraction.one()
    zero = FactoredFraction.zero()
    current = TruncSeries([one, one])
    applications = 0
    while current.order < order:
        if applications >= max_iter:
            raise NoConvergenceError(
                f"fixed point did not stabilize within {max_iter} applications"
            )
        n = current.order + 1
        padded = TruncSeries(list(current.coeffs) + [zero])
        image = branch_operator(law, padded)
        # padded[n] = 0, so the diagonal term M_n * a_n is already absent
        m = law.moment(n)
        c = image[n].divided_by_poly(MultiPoly.one() - m).reduced()
        current = TruncSeries(list(current.coeffs) + [c])
        applications += 1
    confirm = fixed_point_operator_step(law, current)
    if any(not (a - b).is_zero for a, b in zip(confirm.coeffs, current.coeffs)):
        raise NoConvergenceError(
            "iterate changed under a confirming application: implementation bug"
        )
    return TruncSeries([c.as_ratfn() for c in current.coeffs])


def fixed_point_operator_step(law: BranchingLaw, series: TruncSeries) -> TruncSeries:
    """One solved-diagonal step, exposed for the stabilization tests."""
    image = branch_operator(law, series)
    coeffs = list(series.coeffs[:2])
    for n in range(2, series.order + 1):
        m = law.moment(n)
        shifted = fsum((image[n], series[n] * (-m)))
        coeffs.append(shifted.divided_by_poly(MultiPoly.one() - m).reduced())
    return TruncSeries(coeffs)


def zero_temp_grand_partition(law: BranchingLaw, order: int) -> TruncSeries:
    """Limit of the grand series as beta grows without bound.

    Pair weights kill every multi-occupied block, so each child tree holds
    at most one particle and the series collapses to the conditional
    expectation of (1 + t/Q)^Q given Q > 1, with exact rational
    coefficients.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    p1 = law.prob(1)
    norm = 1 - p1
    coeffs = [Fraction(0)] * (order + 1)
    for q, p in law.entries:
        if q == 1:
            continue
        w = p / norm
        # (1 + t/q)^q has coefficient C(q, n) q^(-n) at t^n
        c = Fraction(1)
        for n in range(min(q, order) + 1):
            coeffs[n] += w * c
            c = c * (q - n) / (n + 1) / q
    return TruncSeries([RationalFn.constant(c) for c in coeffs])


__all__ = [
    "GrandPartitionSeries",
    "branch_operator",
    "fixed_point_iterate",
    "fixed_point_operator_step",
    "grand_partition",
    "verify_functional_equation",
    "weighted_grand_partition",
    "zero_temp_grand_partition",
]
