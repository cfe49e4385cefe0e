"""Truncated power series in the fugacity variable t.

Coefficients are exact field elements: `RationalFn` on the public surface,
`FactoredFraction` inside the recursions.  Both expose the same +, * and
scalar protocols, so the series algebra below is written once.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import BranchGasError, OrderMismatchError
from .poly import MultiPoly, binom2


class TruncSeries:
    """Series sum_{n<=T} c_n t^n, truncated at a fixed order T."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise BranchGasError("a truncated series needs at least the constant term")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, *_):
        raise AttributeError("TruncSeries is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def _zero_coeff(self):
        return self.coeffs[0] * Fraction(0)

    def _check(self, other: "TruncSeries"):
        if self.order != other.order:
            raise OrderMismatchError(f"series orders differ: {self.order} != {other.order}")

    # ------------------------------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        return TruncSeries([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-c for c in self.coeffs])

    def __mul__(self, other) -> "TruncSeries":
        if isinstance(other, (int, Fraction, MultiPoly)):
            return TruncSeries([c * other for c in self.coeffs])
        if not isinstance(other, TruncSeries):
            return NotImplemented
        self._check(other)
        T = self.order
        zero = self._zero_coeff()
        out = []
        for n in range(T + 1):
            acc = zero
            for m in range(n + 1):
                acc = acc + self.coeffs[m] * other.coeffs[n - m]
            out.append(acc)
        return TruncSeries(out)

    __rmul__ = __mul__

    def pow(self, n: int) -> "TruncSeries":
        """n-th power by repeated squaring, truncated at the series order."""
        if not isinstance(n, int) or n < 1:
            raise BranchGasError("series powers must be positive integers")
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    __pow__ = pow

    def rescale(self, q: int) -> "TruncSeries":
        """Substitute t -> t/q: coefficient n is scaled by q**(-n)."""
        if q < 1:
            raise BranchGasError("rescale factor must be a positive integer")
        if q == 1:
            return self
        return TruncSeries(
            [c * Fraction(1, q**n) for n, c in enumerate(self.coeffs)]
        )

    def pair_weighted(self, q: int) -> "TruncSeries":
        """Weight coefficient n by the monomial standing for q**(-beta*C(n,2)).

        Orders 0 and 1 carry no interacting pair and are left untouched.
        """
        if q < 1:
            raise BranchGasError("weight base must be a positive integer")
        if q == 1:
            return self
        out = []
        for n, c in enumerate(self.coeffs):
            b = binom2(n)
            out.append(c if b == 0 else c * MultiPoly.var(q, b))
        return TruncSeries(out)

    # ------------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    __hash__ = None

    def __str__(self) -> str:
        parts = []
        for n, c in enumerate(self.coeffs):
            s = str(c)
            parts.append(s if n == 0 else f"({s})*t^{n}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TruncSeries(order={self.order})"


def pair_weighted(series: TruncSeries, q: int) -> TruncSeries:
    return series.pair_weighted(q)


__all__ = ["TruncSeries", "pair_weighted"]
