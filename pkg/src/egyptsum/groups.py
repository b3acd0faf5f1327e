"""Ordered groups with exact arithmetic.

A topology is never represented directly.  Each instance instead carries a
countable, decreasing, symmetric basis ``u_0 ⊇ u_1 ⊇ ...`` of open
neighbourhoods of the identity, queried through :meth:`GroupInstance.member`.
Metric instances use open balls of radius ``2**-k``; discrete instances use
``{0}`` at every level.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, cmp_to_key
from typing import Any, Callable, Iterable, Optional

from .errors import ParseError, UnsupportedCapability

METRIC = "metric"
ARCHIMEDEAN = "archimedean"
DISCRETE = "discrete"
# Elements are fractions.Fraction; enables the scaled-integer fast paths.
RATIONAL = "rational"


class Ordering(enum.Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"
    INCOMPARABLE = "INCOMPARABLE"


def _cmp_total(a, b) -> Ordering:
    if a < b:
        return Ordering.LT
    if a == b:
        return Ordering.EQ
    return Ordering.GT


@dataclass(frozen=True, eq=False)
class GroupInstance:
    """An ordered group with exact equality.

    ``compare`` may return ``Ordering.INCOMPARABLE``; the shipped instances
    are all totally ordered.  ``radius`` is present only for metric
    instances; ``magnitude`` for metric ones and for numeric discrete ones,
    where it is a size and says nothing about the topology.
    """

    name: str
    zero: Any
    add: Callable[[Any, Any], Any]
    neg: Callable[[Any], Any]
    compare: Callable[[Any, Any], Ordering]
    member: Callable[[int, Any], bool]
    capabilities: frozenset
    parse: Callable[[str], Any]
    format: Callable[[Any], str]
    radius: Optional[Callable[[int], Fraction]] = None
    magnitude: Optional[Callable[[Any], Fraction]] = None
    witness: Optional[Callable[[Any, int], Any]] = field(default=None, repr=False)
    # native sort key for totally ordered instances
    key: Optional[Callable[[Any], Any]] = field(default=None, repr=False)

    def has(self, capability: str) -> bool:
        return capability in self.capabilities

    def equals(self, a, b) -> bool:
        return a == b

    def sub(self, a, b):
        """``a - b`` computed as ``a + (-b)``."""
        return self.add(a, self.neg(b))

    def total(self, terms: Iterable):
        """Left-to-right sum; never reassociated."""
        acc = self.zero
        for t in terms:
            acc = self.add(acc, t)
        return acc

    def lt(self, a, b) -> bool:
        return self.compare(a, b) is Ordering.LT

    def le(self, a, b) -> bool:
        return self.compare(a, b) in (Ordering.LT, Ordering.EQ)

    def is_positive(self, a) -> bool:
        return self.compare(self.zero, a) is Ordering.LT

    def sort_key(self, a):
        if self.key is not None:
            return self.key(a)
        return cmp_to_key(self._strict_cmp)(a)

    def sorted(self, elems: Iterable) -> list:
        return sorted(elems, key=self.sort_key)

    def _strict_cmp(self, a, b) -> int:
        o = self.compare(a, b)
        if o is Ordering.INCOMPARABLE:
            raise ValueError(f"{self.name}: {a!r} and {b!r} are incomparable")
        return {Ordering.LT: -1, Ordering.EQ: 0, Ordering.GT: 1}[o]


_RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?")
_INTEGER_RE = re.compile(r"[+-]?\d+")
_PAIR_RE = re.compile(r"\(\s*([+-]?\d+)\s*,\s*([+-]?\d+)\s*\)")


def parse_rational(text: str) -> Fraction:
    s = str(text).strip()
    if not _RATIONAL_RE.fullmatch(s):
        raise ParseError(f"not an exact rational literal: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator: {text!r}") from None


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_integer(text: str) -> int:
    s = str(text).strip()
    if not _INTEGER_RE.fullmatch(s):
        raise ParseError(f"not an integer literal: {text!r}")
    return int(s)


def _parse_pair(text: str) -> tuple:
    m = _PAIR_RE.fullmatch(str(text).strip())
    if not m:
        raise ParseError(f"not a pair literal: {text!r}")
    return (int(m.group(1)), int(m.group(2)))


def _identity(a):
    return a


def _rational_member(k: int, g) -> bool:
    return abs(g) < Fraction(1, 2**k)


def _rational_witness(r, k):
    return Fraction(r) / k


@cache
def make_rationals() -> GroupInstance:
    """Additive rationals with the usual order and the ``|x|`` metric."""
    return GroupInstance(
        name="rationals",
        zero=Fraction(0),
        add=lambda a, b: a + b,
        neg=lambda a: -a,
        compare=_cmp_total,
        member=_rational_member,
        capabilities=frozenset({METRIC, ARCHIMEDEAN, RATIONAL}),
        parse=parse_rational,
        format=format_rational,
        radius=lambda k: Fraction(1, 2**k),
        magnitude=lambda a: abs(Fraction(a)),
        witness=_rational_witness,
        key=_identity,
    )


@cache
def make_integers() -> GroupInstance:
    """Additive integers with the discrete topology."""
    return GroupInstance(
        name="integers",
        zero=0,
        add=lambda a, b: a + b,
        neg=lambda a: -a,
        compare=_cmp_total,
        member=lambda k, g: g == 0,
        capabilities=frozenset({DISCRETE}),
        parse=_parse_integer,
        format=str,
        magnitude=abs,
        # every positive integer is >= 1
        witness=lambda r, k: 1,
        key=_identity,
    )


@cache
def make_lex_pairs() -> GroupInstance:
    """ZxZ, lexicographically ordered, with the discrete topology.

    The lexicographic order does not respect the product topology, so the
    discrete one is used instead.
    """
    return GroupInstance(
        name="lex_pairs",
        zero=(0, 0),
        add=lambda a, b: (a[0] + b[0], a[1] + b[1]),
        neg=lambda a: (-a[0], -a[1]),
        compare=_cmp_total,
        member=lambda k, g: g == (0, 0),
        capabilities=frozenset({DISCRETE}),
        parse=_parse_pair,
        format=lambda a: f"({a[0]},{a[1]})",
        key=_identity,
    )


GROUPS = {
    "rationals": make_rationals,
    "integers": make_integers,
    "lex_pairs": make_lex_pairs,
}


def get_group(name: str) -> GroupInstance:
    try:
        return GROUPS[name]()
    except KeyError:
        raise ParseError(f"unknown group {name!r}; expected one of {sorted(GROUPS)}") from None


def lower_witness(G: GroupInstance, r, k: int):
    """Return ``l`` such that any ``k`` positive elements summing to ``r``
    include one that is ``>= l``.

    Rationals use the pigeonhole bound ``r/k``; integers use 1.
    """
    if G.witness is None:
        raise UnsupportedCapability(f"{G.name} has no archimedean lower witness")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not G.is_positive(r):
        raise ValueError(f"{G.format(r)} is not in the positive cone")
    return G.witness(r, k)
