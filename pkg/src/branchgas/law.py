"""Offspring laws for the branching environment.

A law is a finite-support distribution of the per-node child count Q with
exact rational probabilities.  Finite support keeps every symbolic object
in finitely many decay variables; q = 0 is forbidden (every node has a
child) and the law concentrated on q = 1 is rejected (the tree must branch
with positive probability).  q = 1 may appear in the support, it only
contributes constants.
"""

from __future__ import annotations

import json
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    BranchGasError,
    DegenerateLawError,
    DuplicateSupportError,
    InvalidProbabilityError,
    LawError,
    ProbabilitySumNotOneError,
    ZeroChildrenForbiddenError,
)
from .poly import MultiPoly, binom2, parse_rational


@dataclass(frozen=True)
class BranchingLaw:
    """Finite-support child-count distribution, entries sorted by q."""

    entries: tuple[tuple[int, Fraction], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, Fraction | int | str]]) -> "BranchingLaw":
        seen: dict[int, Fraction] = {}
        for q, p in pairs:
            if not isinstance(q, int):
                raise LawError(f"child count must be an integer, got {q!r}")
            if not isinstance(p, Fraction):
                try:
                    p = parse_rational(p)
                except BranchGasError as exc:
                    raise LawError(str(exc)) from exc
            if q in seen:
                raise DuplicateSupportError(f"child count {q} listed twice")
            if q == 0:
                raise ZeroChildrenForbiddenError("q = 0 is not allowed: every node has a child")
            if q < 0:
                raise LawError(f"child count must be positive, got {q}")
            if not (0 < p <= 1):
                raise InvalidProbabilityError(f"probability for q={q} must lie in (0, 1], got {p}")
            seen[q] = p
        if not seen:
            raise LawError("empty law")
        total = sum(seen.values())
        if total != 1:
            raise ProbabilitySumNotOneError(f"probabilities sum to {total}, not 1")
        if set(seen) == {1}:
            raise DegenerateLawError("law concentrated on q = 1: the tree never branches")
        return cls(tuple(sorted(seen.items())))

    # ------------------------------------------------------------------

    def support(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.entries)

    def prob(self, q: int) -> Fraction:
        for qq, p in self.entries:
            if qq == q:
                return p
        return Fraction(0)

    @property
    def max_q(self) -> int:
        return self.entries[-1][0]

    def mean(self) -> Fraction:
        """E[Q], exact."""
        return sum((p * q for q, p in self.entries), Fraction(0))

    def moment(self, n: int) -> MultiPoly:
        """E[Q**(1 - n) * var_Q**C(n,2)] as a polynomial.

        This is the weight a size-n block picks up when pushed one level
        down the tree, averaged over the child count; the q = 1 entry
        contributes the constant p_1.
        """
        if n < 1:
            raise LawError(f"moment index must be >= 1, got {n}")
        out = MultiPoly.zero()
        for q, p in self.entries:
            coef = p * Fraction(1, q ** (n - 1))
            b = binom2(n)
            if q == 1 or b == 0:
                out = out + MultiPoly.constant(coef)
            else:
                out = out + MultiPoly.var(q, b) * coef
        return out

    # ------------------------------------------------------------------
    # JSON law files: {"law": [{"q": 2, "p": "1/2"}, ...]}

    def to_json(self) -> dict:
        return {"law": [{"q": q, "p": str(p)} for q, p in self.entries]}

    @classmethod
    def from_json(cls, obj) -> "BranchingLaw":
        if not isinstance(obj, dict) or "law" not in obj:
            raise LawError('law file must be an object with a "law" array')
        pairs = []
        for item in obj["law"]:
            q = item.get("q")
            p = item.get("p")
            if isinstance(p, float):
                raise LawError(f"probability {p!r} is a float: write an exact fraction string")
            pairs.append((q, p))
        return cls.from_pairs(pairs)

    @classmethod
    def from_file(cls, path) -> "BranchingLaw":
        with open(path, encoding="utf-8") as fh:
            try:
                obj = json.load(fh, parse_float=_reject_float)
            except json.JSONDecodeError as exc:
                raise LawError(f"law file {path} is not valid JSON: {exc}") from exc
        return cls.from_json(obj)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{q}: {p}" for q, p in self.entries) + "}"


def _reject_float(text: str):
    raise LawError(f"decimal probability {text!r} rejected: write an exact fraction string")


def regular(q: int) -> BranchingLaw:
    """The deterministic law of the regular q-ary tree."""
    return BranchingLaw.from_pairs([(q, Fraction(1))])


def two_point(q: int, p: Fraction) -> BranchingLaw:
    """q children with probability p, a single child otherwise."""
    if p == 1:
        return regular(q)
    return BranchingLaw.from_pairs([(q, p), (1, 1 - p)])


__all__ = ["BranchingLaw", "regular", "two_point"]
