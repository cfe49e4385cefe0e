"""Mean canonical partition functions of the random-tree gas.

The value for N particles satisfies a recursion over the first branching:
conditioning on the root having q children splits the particles into an
ordered composition N_1 + ... + N_q = N, each block picking up the weight
q**(-N_k - beta*C(N_k,2)) of living one level down, and the block equal to
N itself is moved to the left-hand side.  Solving gives

    Z_N = (1 - M_N)^(-1) * sum_q p_q * [t^N] G_q(t)^q,
    G_q(t) = sum_{n<N} Z_n * w_q(n) * (t/q)^n,   w_q(n) = var_q^C(n,2),

where M_N is the law moment E[Q^(1-N) var_Q^C(N,2)] and the coefficient
extraction from G_q^q replaces explicit composition enumeration (any
composition with a part equal to N has all other parts zero, and those are
exactly the terms G_q lacks).  Initial values Z_0 = Z_1 = 1.

Everything is exact: values are rational functions of the decay variables,
built over a factored denominator so that structural factors cancel by
trial division.  Results are memoized per law.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from dataclasses import dataclass

from .errors import DegenerateDenominatorError
from .law import BranchingLaw
from .poly import MultiPoly, binom2, rational_point
from .ratfun import DEFAULT_POLE_EPS, FactoredFraction, RationalFn, fsum
from .series import TruncSeries

_TABLES: dict[BranchingLaw, list[FactoredFraction]] = {}
_TABLES_LOCK = threading.Lock()


def _extend_table(law: BranchingLaw, n_max: int) -> list[FactoredFraction]:
    # values are immutable; the lock only guards table extension
    with _TABLES_LOCK:
        vals = _TABLES.setdefault(law, [FactoredFraction.one(), FactoredFraction.one()])
        for n in range(len(vals), n_max + 1):
            vals.append(_next_value(law, vals, n))
        return vals


def _next_value(law: BranchingLaw, vals: list[FactoredFraction], n: int) -> FactoredFraction:
    terms = []
    for q, p in law.entries:
        if q == 1:
            # A single child forces N_1 = N, which the inner sum excludes.
            continue
        coeffs = [
            vals[m] * (MultiPoly.var(q, binom2(m)) * Fraction(1, q**m))
            for m in range(n)
        ]
        coeffs.append(FactoredFraction.zero())
        inner = TruncSeries(coeffs).pow(q)
        terms.append(inner[n] * p)
    total = fsum(terms)
    denom = MultiPoly.one() - law.moment(n)
    if denom.is_zero:
        raise DegenerateDenominatorError(f"recursion denominator vanishes at N={n}")
    return total.divided_by_poly(denom).reduced()


def mean_partition_factored(law: BranchingLaw, n: int) -> FactoredFraction:
    if n < 0:
        raise ValueError("particle count must be non-negative")
    return _extend_table(law, n)[n]


def mean_partition(law: BranchingLaw, n: int) -> RationalFn:
    """Exact mean partition function for n particles, as a RationalFn."""
    return mean_partition_factored(law, n).as_ratfn()


@dataclass(frozen=True)
class MeanPartitionTable:
    """Memoized values for 0..n_max particles."""

    law: BranchingLaw
    values: tuple[RationalFn, ...]

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n: int) -> RationalFn:
        return self.values[n]


def mean_partition_table(law: BranchingLaw, n_max: int) -> MeanPartitionTable:
    vals = _extend_table(law, max(n_max, 1))
    return MeanPartitionTable(law, tuple(v.as_ratfn() for v in vals[: n_max + 1]))


def mean_partition_numeric(
    law: BranchingLaw, n: int, beta: float, eps_pole: float = DEFAULT_POLE_EPS
) -> float:
    """Double-precision value of the exact rational function at beta."""
    return mean_partition_factored(law, n).evaluate(beta, eps_pole)


def mean_partition_numeric_direct(law: BranchingLaw, n: int, beta: float) -> float:
    """Run the recursion directly in doubles at a fixed beta.

    Avoids symbolic growth for large particle counts; no pole detection.
    """
    vals = [1.0, 1.0]
    for N in range(2, n + 1):
        mom = sum(
            float(p) * q ** (1 - N - beta * binom2(N)) for q, p in law.entries
        )
        total = 0.0
        for q, p in law.entries:
            if q == 1:
                continue
            g = [vals[m] * q ** (-m - beta * binom2(m)) for m in range(N)] + [0.0]
            acc = [1.0] + [0.0] * N
            for _ in range(q):
                nxt = [0.0] * (N + 1)
                for a in range(N + 1):
                    va = acc[a]
                    if va == 0.0:
                        continue
                    for b in range(N + 1 - a):
                        nxt[a + b] += va * g[b]
                acc = nxt
            total += float(p) * acc[N]
        vals.append(total / (1.0 - mom))
    return vals[n] if n >= 2 else 1.0


def mean_partition_at_zero(law: BranchingLaw, n: int) -> Fraction:
    """Exact value at beta = 0 (all decay variables equal to 1)."""
    f = mean_partition(law, n)
    point = {q: Fraction(1) for q in f.variables()}
    return f.evaluate_exact(point)


def mean_partition_exact_at(law: BranchingLaw, n: int, beta: int) -> Fraction:
    """Exact value at an integer beta, where q**(-beta) is rational."""
    f = mean_partition(law, n)
    return f.evaluate_exact(rational_point(f.variables(), beta))


def denominator_negative_root(
    law: BranchingLaw,
    n: int,
    beta_floor: float = -4.0,
    step: float = 1.0 / 64.0,
    tol: float = 1e-9,
) -> float | None:
    """Largest beta < 0 where the denominator vanishes, or None.

    Scans a grid downward from 0 and refines the first sign change by
    bisection.  This only locates poles of the rational continuation; no
    claim is made about convergence of the defining integral there.
    """
    den = mean_partition(law, n).den
    if den.degree() == 0:
        return None
    prev_b, prev_v = 0.0, den.evaluate(0.0)
    b = -step
    while b >= beta_floor - 1e-15:
        v = den.evaluate(b)
        if v == 0.0:
            return b
        if (v < 0.0) != (prev_v < 0.0):
            lo, hi = b, prev_b  # lo < hi, sign change inside
            flo = v
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = den.evaluate(mid)
                if fm == 0.0:
                    return mid
                if (fm < 0.0) == (flo < 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_b, prev_v = b, v
        b -= step
    return None


def factorial_reference(n: int) -> Fraction:
    """1/n!, the universal beta = 0 value."""
    return Fraction(1, math.factorial(n))


__all__ = [
    "MeanPartitionTable",
    "denominator_negative_root",
    "factorial_reference",
    "mean_partition",
    "mean_partition_at_zero",
    "mean_partition_exact_at",
    "mean_partition_factored",
    "mean_partition_numeric",
    "mean_partition_numeric_direct",
    "mean_partition_table",
]
