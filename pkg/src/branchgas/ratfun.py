"""Exact rational functions of the decay variables.

Two representations live here.  `RationalFn` is the public quotient of two
polynomials in a canonical form that deliberately avoids multivariate gcd:
numerator and denominator are jointly integer-primitive, the denominator
leading coefficient is positive, and equality is decided by
cross-multiplication.  `FactoredFraction` is the internal workhorse used by
the recursions: it keeps the denominator as a multiset of primitive factor
polynomials so that sums can share denominators cheaply and known factors
can be cancelled by exact trial division instead of gcd.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DivisionByZeroError, PoleProximityError
from .poly import MultiPoly, monomial_order_key, parse_rational

DEFAULT_POLE_EPS = 1e-12


def _poly_sort_key(p: MultiPoly):
    return tuple((monomial_order_key(k), c) for k, c in p.terms())


class RationalFn:
    """Quotient of MultiPolys in canonical gcd-free form."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.one()
        if den.is_zero:
            raise DivisionByZeroError("zero denominator")
        if num.is_zero:
            num, den = MultiPoly.zero(), MultiPoly.one()
        else:
            cn, pn = num.primitive_parts()
            cd, pd = den.primitive_parts()
            s = cn / cd
            num = pn * Fraction(s.numerator)
            den = pd * Fraction(s.denominator)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RationalFn is immutable")

    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, value) -> "RationalFn":
        return cls(MultiPoly.constant(value))

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "RationalFn":
        return cls(p)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.num.is_zero

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.num.variables()) | set(self.den.variables())))

    def as_fraction(self) -> Fraction:
        """Exact value when the function is constant."""
        if self.num.degree() > 0 or self.den.degree() > 0:
            raise ValueError(f"not a constant: {self}")
        return self.num.constant_term() / self.den.constant_term()

    # ------------------------------------------------------------------
    # field arithmetic

    def __add__(self, other) -> "RationalFn":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other) -> "RationalFn":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RationalFn":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RationalFn":
        if isinstance(other, (int, Fraction)):
            return RationalFn(self.num * Fraction(other), self.den)
        if isinstance(other, MultiPoly):
            return RationalFn(self.num * other, self.den)
        if not isinstance(other, RationalFn):
            return NotImplemented
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero:
            raise DivisionByZeroError("division by the zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalFn":
        return _coerce(other) / self

    def __pow__(self, n: int) -> "RationalFn":
        if n < 0:
            return RationalFn(self.den, self.num) ** (-n)
        return RationalFn(self.num**n, self.den**n)

    # ------------------------------------------------------------------
    # equality by cross-multiplication (no gcd anywhere)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # Identical canonical representation decides immediately; otherwise
        # fall back to the defining cross-multiplication test.
        if self.num == other.num and self.den == other.den:
            return True
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equal fractions may differ in representation

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, beta: float, eps_pole: float = DEFAULT_POLE_EPS) -> float:
        """num(beta)/den(beta) in double precision, refusing near-poles."""
        d = self.den.evaluate(beta)
        if abs(d) <= eps_pole:
            raise PoleProximityError(f"denominator {d:.3e} at beta={beta} within {eps_pole:.1e}")
        return self.num.evaluate(beta) / d

    def evaluate_exact(self, point: Mapping[int, Fraction]) -> Fraction:
        d = self.den.evaluate_exact(point)
        if d == 0:
            raise DivisionByZeroError(f"denominator vanishes at {dict(point)}")
        return self.num.evaluate_exact(point) / d

    # ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"num": self.num.to_json_terms(), "den": self.den.to_json_terms()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "RationalFn":
        return cls(MultiPoly.from_json_terms(obj["num"]), MultiPoly.from_json_terms(obj["den"]))

    def __str__(self) -> str:
        if self.den == MultiPoly.one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self) -> str:
        return f"RationalFn({self})"


def _coerce(value) -> "RationalFn":
    if isinstance(value, RationalFn):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalFn.constant(value)
    if isinstance(value, MultiPoly):
        return RationalFn(value)
    return NotImplemented


class FactoredFraction:
    """num / prod(factor**power) with primitive, deduplicated factors.

    All rational-scalar content lives in the numerator coefficients, so a
    factor polynomial appearing in two values is the identical object and
    denominator unification is multiset arithmetic.  `reduced` cancels
    factors that divide the numerator exactly; this is where the known
    denominator structure of the recursions is exploited without gcd.
    """

    __slots__ = ("num", "factors")

    def __init__(self, num: MultiPoly, factors: Mapping[MultiPoly, int] | None = None):
        facs: dict[MultiPoly, int] = {}
        if factors and not num.is_zero:
            for f, p in factors.items():
                if p < 0:
                    raise ValueError("factor powers must be non-negative")
                if p:
                    facs[f] = facs.get(f, 0) + p
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "factors", facs)

    def __setattr__(self, *_):
        raise AttributeError("FactoredFraction is immutable")

    @classmethod
    def one(cls) -> "FactoredFraction":
        return cls(MultiPoly.one())

    @classmethod
    def zero(cls) -> "FactoredFraction":
        return cls(MultiPoly.zero())

    @classmethod
    def constant(cls, value) -> "FactoredFraction":
        return cls(MultiPoly.constant(value))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self) -> bool:
        return not self.num.is_zero

    # ------------------------------------------------------------------

    def __mul__(self, other) -> "FactoredFraction":
        if isinstance(other, (int, Fraction)):
            return FactoredFraction(self.num * Fraction(other), self.factors)
        if isinstance(other, MultiPoly):
            return FactoredFraction(self.num * other, self.factors)
        if not isinstance(other, FactoredFraction):
            return NotImplemented
        if self.num.is_zero or other.num.is_zero:
            return FactoredFraction.zero()
        facs = dict(self.factors)
        for f, p in other.factors.items():
            facs[f] = facs.get(f, 0) + p
        return FactoredFraction(self.num * other.num, facs)

    __rmul__ = __mul__

    def __neg__(self) -> "FactoredFraction":
        return FactoredFraction(-self.num, self.factors)

    def __add__(self, other) -> "FactoredFraction":
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = FactoredFraction(
                other if isinstance(other, MultiPoly) else MultiPoly.constant(other)
            )
        if not isinstance(other, FactoredFraction):
            return NotImplemented
        return fsum((self, other))

    __radd__ = __add__

    def __sub__(self, other) -> "FactoredFraction":
        return self + (-other if isinstance(other, FactoredFraction) else -_as_ff(other))

    def divided_by_poly(self, p: MultiPoly) -> "FactoredFraction":
        """Divide by an arbitrary nonzero polynomial, keeping it factored."""
        if p.is_zero:
            raise DivisionByZeroError("division by the zero polynomial")
        content, prim = p.primitive_parts()
        num = self.num * (1 / content)
        if prim == MultiPoly.one():
            return FactoredFraction(num, self.factors)
        facs = dict(self.factors)
        facs[prim] = facs.get(prim, 0) + 1
        return FactoredFraction(num, facs)

    def __truediv__(self, other) -> "FactoredFraction":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZeroError("division by zero scalar")
            return FactoredFraction(self.num * (Fraction(1) / Fraction(other)), self.factors)
        if isinstance(other, MultiPoly):
            return self.divided_by_poly(other)
        if not isinstance(other, FactoredFraction):
            return NotImplemented
        if other.num.is_zero:
            raise DivisionByZeroError("division by zero fraction")
        # Cancel shared factor powers before cross-multiplying; quotients of
        # values over a common denominator then never expand it at all.
        num = self.num
        facs = dict(self.factors)
        for f, p in other.factors.items():
            have = facs.pop(f, 0)
            keep = have - p
            if keep > 0:
                facs[f] = keep
            elif keep < 0:
                num = num * f ** (-keep)
        return FactoredFraction(num, facs).divided_by_poly(other.num)

    # ------------------------------------------------------------------

    def reduced(self) -> "FactoredFraction":
        """Cancel denominator factors that divide the numerator exactly."""
        if self.num.is_zero or not self.factors:
            return self
        num = self.num
        facs = dict(self.factors)
        changed = True
        while changed:
            changed = False
            for f in list(facs):
                while facs.get(f, 0) > 0:
                    q = num.divide_exact(f)
                    if q is None:
                        break
                    num = q
                    facs[f] -= 1
                    changed = True
                if facs.get(f) == 0:
                    del facs[f]
        return FactoredFraction(num, facs)

    def den_expanded(self) -> MultiPoly:
        den = MultiPoly.one()
        for f, p in sorted(self.factors.items(), key=lambda kv: _poly_sort_key(kv[0])):
            den = den * f**p
        return den

    def as_ratfn(self) -> RationalFn:
        return RationalFn(self.num, self.den_expanded())

    def evaluate(self, beta: float, eps_pole: float = DEFAULT_POLE_EPS) -> float:
        d = 1.0
        for f, p in self.factors.items():
            d *= f.evaluate(beta) ** p
        if abs(d) <= eps_pole:
            raise PoleProximityError(f"denominator {d:.3e} at beta={beta}")
        return self.num.evaluate(beta) / d

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, MultiPoly)):
            other = _as_ff(other)
        if not isinstance(other, FactoredFraction):
            return NotImplemented
        return (self - other).num.is_zero

    __hash__ = None

    def __str__(self) -> str:
        if not self.factors:
            return str(self.num)
        den = " * ".join(
            f"({f})" + (f"^{p}" if p > 1 else "")
            for f, p in sorted(self.factors.items(), key=lambda kv: _poly_sort_key(kv[0]))
        )
        return f"({self.num}) / [{den}]"

    def __repr__(self) -> str:
        return f"FactoredFraction({self})"


def _as_ff(value) -> FactoredFraction:
    if isinstance(value, FactoredFraction):
        return value
    if isinstance(value, MultiPoly):
        return FactoredFraction(value)
    return FactoredFraction.constant(value)


def fsum(terms: Iterable[FactoredFraction]) -> FactoredFraction:
    """Sum over a shared denominator built once from factor-wise maxima."""
    terms = [t for t in terms if not t.num.is_zero]
    if not terms:
        return FactoredFraction.zero()
    if len(terms) == 1:
        return terms[0]
    common: dict[MultiPoly, int] = {}
    for t in terms:
        for f, p in t.factors.items():
            if common.get(f, 0) < p:
                common[f] = p
    total = MultiPoly.zero()
    for t in terms:
        scaled = t.num
        for f, p in common.items():
            deficit = p - t.factors.get(f, 0)
            if deficit:
                scaled = scaled * f**deficit
        total = total + scaled
    return FactoredFraction(total, common)


__all__ = [
    "DEFAULT_POLE_EPS",
    "FactoredFraction",
    "RationalFn",
    "fsum",
    "parse_rational",
]
