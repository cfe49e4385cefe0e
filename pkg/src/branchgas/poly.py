"""Sparse multivariate polynomials over exact rationals.

Variables are indexed by integers q >= 2; variable q stands for the decay
value q**(-beta), so a polynomial here is an exact function of the inverse
temperature once each variable is specialized.  Monomials are sparse maps
from variable index to a positive exponent, stored as sorted tuples of
(variable, exponent) pairs.  The fixed term order is graded lexicographic
with smaller variable indices more significant; it exists only to make
leading terms, canonical signs and serialization deterministic.

Internally a polynomial is one rational content times a primitive
integer-coefficient part (coprime coefficients, positive leading sign).
Products of primitive parts stay primitive, so ring operations run on
plain integers and touch Fraction arithmetic once per operation.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import exp, gcd, inf, log, log2
from typing import Iterable, Iterator, Mapping

from .errors import BranchGasError, DivisionByZeroError

Monomial = tuple[tuple[int, int], ...]

_EMPTY: Monomial = ()
_ONE_FRAC = Fraction(1)
_LN2 = log(2.0)


def parse_rational(text: str | int) -> Fraction:
    """Parse an exact rational from "a/b" or integer-string form.

    Decimal and scientific notation are rejected: values that went through
    floating point must never enter the exact layer.
    """
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise BranchGasError(f"rational must be a string or int, got {type(text).__name__}")
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise BranchGasError(f"decimal notation rejected, write an exact fraction: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise BranchGasError(f"cannot parse rational {text!r}") from exc


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for q, e in b:
        exps[q] = exps.get(q, 0) + e
    return tuple(sorted(exps.items()))


def monomial_div(a: Monomial, b: Monomial) -> Monomial | None:
    """Exponent-wise difference a/b, or None if not divisible."""
    if not b:
        return a
    exps = dict(a)
    for q, e in b:
        r = exps.get(q, 0) - e
        if r < 0:
            return None
        if r == 0:
            exps.pop(q, None)
        else:
            exps[q] = r
    return tuple(sorted(exps.items()))


def monomial_degree(key: Monomial) -> int:
    return sum(e for _, e in key)


def monomial_order_key(key: Monomial):
    """Sort key under which ascending order lists monomials largest first."""
    return (-monomial_degree(key), tuple((q, -e) for q, e in key))


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("_scale", "_ints", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        scale, ints = _normalize_fraction_terms(terms or {})
        object.__setattr__(self, "_scale", scale)
        object.__setattr__(self, "_ints", ints)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _raw(cls, scale: Fraction, ints: dict[Monomial, int]) -> "MultiPoly":
        """Trusted constructor: ints primitive with positive leading sign."""
        self = object.__new__(cls)
        object.__setattr__(self, "_scale", scale if ints else _ONE_FRAC)
        object.__setattr__(self, "_ints", ints)
        object.__setattr__(self, "_hash", None)
        return self

    def __setattr__(self, *_):
        raise AttributeError("MultiPoly is immutable")

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls) -> "MultiPoly":
        return _ZERO

    @classmethod
    def one(cls) -> "MultiPoly":
        return _ONE

    @classmethod
    def constant(cls, value) -> "MultiPoly":
        value = Fraction(value)
        if not value:
            return _ZERO
        return cls._raw(value, {_EMPTY: 1})

    @classmethod
    def var(cls, q: int, power: int = 1) -> "MultiPoly":
        """The monomial standing for q**(-beta*power)."""
        if q < 2:
            raise BranchGasError(f"variable index must be >= 2, got {q}")
        if power < 0:
            raise BranchGasError("negative powers are not representable")
        if power == 0:
            return _ONE
        return cls._raw(_ONE_FRAC, {((q, power),): 1})

    # ------------------------------------------------------------------
    # inspection

    @property
    def is_zero(self) -> bool:
        return not self._ints

    def __bool__(self) -> bool:
        return bool(self._ints)

    def __len__(self) -> int:
        return len(self._ints)

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        """Terms in the canonical order, largest monomial first."""
        s = self._scale
        for key in sorted(self._ints, key=monomial_order_key):
            yield key, s * self._ints[key]

    def coefficient(self, key: Monomial) -> Fraction:
        v = self._ints.get(tuple(sorted(key)), 0)
        return self._scale * v if v else Fraction(0)

    def constant_term(self) -> Fraction:
        return self.coefficient(_EMPTY)

    def degree(self) -> int:
        if not self._ints:
            return 0
        return max(monomial_degree(k) for k in self._ints)

    def variables(self) -> tuple[int, ...]:
        seen: set[int] = set()
        for key in self._ints:
            for q, _ in key:
                seen.add(q)
        return tuple(sorted(seen))

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self._ints:
            raise DivisionByZeroError("zero polynomial has no leading term")
        key = min(self._ints, key=monomial_order_key)
        return key, self._scale * self._ints[key]

    # ------------------------------------------------------------------
    # ring operations

    def __add__(self, other) -> "MultiPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self._ints:
            return other
        if not other._ints:
            return self
        sa, sb = self._scale, other._scale
        g = Fraction(
            gcd(sa.numerator, sb.numerator), _lcm(sa.denominator, sb.denominator)
        )
        a = int(sa / g)
        b = int(sb / g)
        out = {k: a * v for k, v in self._ints.items()}
        for k, v in other._ints.items():
            s = out.get(k, 0) + b * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        if not out:
            return _ZERO
        content = _strip_content(out)
        return MultiPoly._raw(g * content, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        if not self._ints:
            return self
        return MultiPoly._raw(-self._scale, self._ints)

    def __sub__(self, other) -> "MultiPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other or not self._ints:
                return _ZERO
            return MultiPoly._raw(self._scale * other, self._ints)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if not self._ints or not other._ints:
            return _ZERO
        pa, pb = self._ints, other._ints
        if len(pa) < len(pb):
            pa, pb = pb, pa
        out: dict[Monomial, int] = {}
        for kb, vb in pb.items():
            if kb:
                for ka, va in pa.items():
                    key = monomial_mul(ka, kb)
                    s = out.get(key, 0) + va * vb
                    if s:
                        out[key] = s
                    else:
                        del out[key]
            else:
                for ka, va in pa.items():
                    s = out.get(ka, 0) + va * vb
                    if s:
                        out[ka] = s
                    else:
                        del out[ka]
        if not out:
            return _ZERO
        # Gauss: a product of primitive parts is primitive, no re-strip.
        return MultiPoly._raw(self._scale * other._scale, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise BranchGasError("polynomial powers must be non-negative integers")
        result = _ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ------------------------------------------------------------------
    # equality, hashing (representation is unique, so both are structural)

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._scale == other._scale and self._ints == other._ints

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self._scale, frozenset(self._ints.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # ------------------------------------------------------------------
    # normal forms and division

    def primitive_parts(self) -> tuple[Fraction, "MultiPoly"]:
        """Split into (content, primitive) with primitive having coprime
        integer coefficients and positive leading coefficient."""
        if not self._ints:
            return Fraction(0), _ZERO
        if self._scale == 1:
            return _ONE_FRAC, self
        return self._scale, MultiPoly._raw(_ONE_FRAC, self._ints)

    def divide_exact(self, divisor: "MultiPoly") -> "MultiPoly | None":
        """Quotient self/divisor when the division is exact, else None.

        Runs the sparse division algorithm on the primitive integer parts;
        by Gauss's lemma an exact quotient of primitives is a primitive
        integer polynomial, so any non-integer step proves inexactness.
        """
        if divisor.is_zero:
            raise DivisionByZeroError("division by the zero polynomial")
        if not self._ints:
            return _ZERO
        div = divisor._ints
        div_key = min(div, key=monomial_order_key)
        div_c = div[div_key]
        lead_key = min(self._ints, key=monomial_order_key)
        if monomial_div(lead_key, div_key) is None:
            return None
        rem = dict(self._ints)
        heap = [(monomial_order_key(k), k) for k in rem]
        heapq.heapify(heap)
        quot: dict[Monomial, int] = {}
        div_items = list(div.items())
        while rem:
            while heap and heap[0][1] not in rem:
                heapq.heappop(heap)
            if not heap:
                break
            key = heap[0][1]
            shift = monomial_div(key, div_key)
            if shift is None:
                return None
            c, r = divmod(rem[key], div_c)
            if r:
                return None
            quot[shift] = c
            for dk, dv in div_items:
                tk = monomial_mul(shift, dk)
                old = rem.get(tk)
                nv = (old if old is not None else 0) - c * dv
                if nv:
                    if old is None:
                        heapq.heappush(heap, (monomial_order_key(tk), tk))
                    rem[tk] = nv
                else:
                    rem.pop(tk, None)
        if rem:
            return None
        return MultiPoly._raw(self._scale / divisor._scale, quot)

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, beta: float) -> float:
        """Double-precision value after substituting q**(-beta) per variable."""
        s = self._scale
        total = 0.0
        for key, coef in self._ints.items():
            # scale*coef converted jointly: the content may be far outside
            # double range even when the term itself is moderate
            c = s * coef
            try:
                v = float(c)
                for q, e in key:
                    v *= float(q) ** (-beta * e)
            except OverflowError:
                # coefficient alone exceeds double range: combine with the
                # decay powers in log space (costs a little precision, so
                # only used when the direct path cannot represent it)
                logw = -beta * sum(e * log(q) for q, e in key)
                logc = log2(abs(c.numerator)) - log2(c.denominator)
                sign = -1.0 if c.numerator < 0 else 1.0
                try:
                    v = sign * exp(logc * _LN2 + logw)
                except OverflowError:
                    v = sign * inf
            total += v
        return total

    def evaluate_exact(self, point: Mapping[int, Fraction]) -> Fraction:
        """Exact value at a rational point, e.g. all variables 1 at beta=0."""
        if all(v == 1 for v in point.values()):
            return self._scale * sum(self._ints.values()) if self._ints else Fraction(0)
        total = Fraction(0)
        for key, coef in self._ints.items():
            v = Fraction(coef)
            for q, e in key:
                v *= Fraction(point[q]) ** e
            total += v
        return self._scale * total

    # ------------------------------------------------------------------
    # serialization and display

    def to_json_terms(self) -> list[dict]:
        return [
            {"exp": {str(q): e for q, e in key}, "coef": str(coef)}
            for key, coef in self.terms()
        ]

    @classmethod
    def from_json_terms(cls, items: Iterable[Mapping]) -> "MultiPoly":
        terms: dict[Monomial, Fraction] = {}
        for item in items:
            key = tuple(sorted((int(q), int(e)) for q, e in item["exp"].items() if int(e) != 0))
            coef = parse_rational(item["coef"])
            if coef:
                terms[key] = terms.get(key, Fraction(0)) + coef
        return cls(terms)

    def __str__(self) -> str:
        if not self._ints:
            return "0"
        parts = []
        for key, coef in self.terms():
            mono = "*".join(f"x{q}" + (f"^{e}" if e > 1 else "") for q, e in key)
            if not mono:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(mono)
            elif coef == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{coef}*{mono}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


def _strip_content(ints: dict[Monomial, int]) -> Fraction:
    """Divide out the integer content and leading sign in place."""
    g = 0
    for v in ints.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = min(ints, key=monomial_order_key)
    if ints[lead] < 0:
        g = -g
    if g != 1:
        for k in ints:
            ints[k] //= g
    return Fraction(g)


def _normalize_fraction_terms(
    terms: Mapping[Monomial, Fraction],
) -> tuple[Fraction, dict[Monomial, int]]:
    clean: dict[Monomial, Fraction] = {}
    for key, coef in terms.items():
        coef = Fraction(coef)
        if not coef:
            continue
        for q, e in key:
            if q < 2 or e <= 0:
                raise BranchGasError(f"bad monomial entry (var={q}, exp={e})")
        clean[tuple(sorted(key))] = coef
    if not clean:
        return _ONE_FRAC, {}
    num_gcd = 0
    den_lcm = 1
    for c in clean.values():
        num_gcd = gcd(num_gcd, c.numerator)
        den_lcm = _lcm(den_lcm, c.denominator)
    content = Fraction(num_gcd, den_lcm)
    inv = 1 / content
    ints = {k: int(c * inv) for k, c in clean.items()}
    lead = min(ints, key=monomial_order_key)
    if ints[lead] < 0:
        content = -content
        ints = {k: -v for k, v in ints.items()}
    return content, ints


def rational_point(variables: Iterable[int], beta: int) -> dict[int, Fraction]:
    """Exact substitution values q**(-beta) for an integer beta."""
    if not isinstance(beta, int):
        raise BranchGasError("exact evaluation requires an integer beta")
    return {q: Fraction(1, q**beta) if beta >= 0 else Fraction(q ** (-beta)) for q in variables}


def binom2(n: int) -> int:
    """Number of interacting pairs among n particles; 0 for n < 2."""
    return n * (n - 1) // 2 if n >= 2 else 0


_ZERO = MultiPoly._raw(_ONE_FRAC, {})
_ONE = MultiPoly._raw(_ONE_FRAC, {_EMPTY: 1})


def _coerce(value) -> "MultiPoly":
    if isinstance(value, MultiPoly):
        return value
    if isinstance(value, (int, Fraction)):
        return MultiPoly.constant(value)
    return NotImplemented


__all__ = [
    "MultiPoly",
    "Monomial",
    "binom2",
    "monomial_degree",
    "monomial_div",
    "monomial_mul",
    "monomial_order_key",
    "parse_rational",
    "rational_point",
]
