"""Sets locally cofinite at 0 (LCF0) and their finite truncations.

A set ``T`` is handled only through its truncations ``T \\ u_k``, which are
finite for every basic neighbourhood ``u_k`` of the identity.  For metric
groups the neighbourhood is the open ball of radius ``2**-k``, so an element
of magnitude exactly ``2**-k`` lies outside it and belongs to ``truncate(k)``.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import GroupMismatch, InvalidSpec, ParseError, UnsupportedCapability, ZeroElement
from .groups import METRIC, GroupInstance, make_rationals, parse_rational as q

# ---------------------------------------------------------------------------
# Discrete streams for weighted sets
# ---------------------------------------------------------------------------


class GeometricStream:
    """``start, start*ratio, start*ratio**2, ...`` with ``start > 0, ratio > 1``."""

    is_finite = False

    def __init__(self, start, ratio):
        self.start = Fraction(start)
        self.ratio = Fraction(ratio)
        if self.start <= 0 or self.ratio <= 1:
            raise InvalidSpec("geometric stream needs start > 0 and ratio > 1")

    def __iter__(self):
        v = self.start
        while True:
            yield v
            v *= self.ratio

    def __repr__(self):
        return f"GeometricStream({self.start}, {self.ratio})"

    def count_below(self, x) -> int:
        n, v = 0, self.start
        while v < x:
            n += 1
            v *= self.ratio
        return n

    def between(self, lo, hi) -> list:
        out = []
        for v in self:
            if v > hi:
                return out
            if v >= lo:
                out.append(v)

    def contains(self, b) -> bool:
        for v in self:
            if v >= b:
                return v == b


class ArithmeticStream:
    """``start, start+step, start+2*step, ...`` with ``start > 0, step > 0``."""

    is_finite = False

    def __init__(self, start, step):
        self.start = Fraction(start)
        self.step = Fraction(step)
        if self.start <= 0 or self.step <= 0:
            raise InvalidSpec("arithmetic stream needs start > 0 and step > 0")

    def __iter__(self):
        return (self.start + j * self.step for j in itertools.count())

    def __repr__(self):
        return f"ArithmeticStream({self.start}, {self.step})"

    def count_below(self, x) -> int:
        if x <= self.start:
            return 0
        return math.ceil((Fraction(x) - self.start) / self.step)

    def between(self, lo, hi) -> list:
        j0 = max(0, math.ceil((Fraction(lo) - self.start) / self.step))
        j1 = math.floor((Fraction(hi) - self.start) / self.step)
        return [self.start + j * self.step for j in range(j0, j1 + 1)]

    def contains(self, b) -> bool:
        j = (Fraction(b) - self.start) / self.step
        return j >= 0 and j.denominator == 1


class ListStream:
    """A bounded discrete ``B``; the resulting weighted set is finite."""

    is_finite = True

    def __init__(self, values):
        self.values = tuple(Fraction(v) for v in values)
        if any(v <= 0 for v in self.values):
            raise InvalidSpec("stream values must be positive")

    def __iter__(self):
        return iter(self.values)

    def __repr__(self):
        return f"ListStream({list(map(str, self.values))})"

    def count_below(self, x) -> int:
        return sum(1 for v in self.values if v < x)

    def between(self, lo, hi) -> list:
        return [v for v in self.values if lo <= v <= hi]

    def contains(self, b) -> bool:
        return b in self.values


@dataclass(frozen=True)
class WeightedSpec:
    """Finite weights ``A`` and a discrete increasing stream ``B``."""

    A: tuple
    B: object
    sample: int = 64

    def validate(self):
        if not self.A:
            raise InvalidSpec("A must be nonempty")
        if any(Fraction(a) <= 0 for a in self.A):
            raise InvalidSpec("A must contain positive rationals")
        prefix = list(itertools.islice(iter(self.B), self.sample))
        if not prefix or prefix[0] <= 0:
            raise InvalidSpec("B must be a stream of positive rationals")
        for j, (u, v) in enumerate(zip(prefix, prefix[1:])):
            if not u < v:
                raise InvalidSpec(f"B is not strictly increasing at position {j + 1}")
            if self.B.count_below(v) != j + 1:
                raise InvalidSpec(f"B.count_below disagrees with the stream at {v}")


# ---------------------------------------------------------------------------
# Truncation containers
# ---------------------------------------------------------------------------


class UnitFractionRange(Sequence):
    """``{1/m : 1 <= m <= top}`` in ascending order, without materializing it."""

    def __init__(self, top: int):
        self.top = max(0, top)

    def __len__(self):
        return self.top

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self.top))]
        if i < 0:
            i += self.top
        if not 0 <= i < self.top:
            raise IndexError(i)
        return Fraction(1, self.top - i)

    def __iter__(self):
        return (Fraction(1, m) for m in range(self.top, 0, -1))

    def __contains__(self, x):
        return isinstance(x, (Fraction, int)) and x > 0 and Fraction(x).numerator == 1 and Fraction(x).denominator <= self.top

    def __repr__(self):
        return f"UnitFractionRange(1/{self.top} .. 1)"


# ---------------------------------------------------------------------------
# Set descriptors
# ---------------------------------------------------------------------------


class Lcf0Set:
    """Base descriptor.  Subclasses supply ``truncate_at`` (metric groups) or
    ``elements`` (finite sets) and ``contains``.
    """

    def __init__(self, name: str, group: GroupInstance, positive: bool = False, elements=None):
        self.name = name
        self.group = group
        self.positive = positive
        # the whole set, when it is finite
        self.elements = None if elements is None else tuple(elements)
        self._cache = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    def truncate(self, k: int) -> Sequence:
        if k < 0:
            raise ValueError("k must be >= 0")
        try:
            return self._cache[k]
        except KeyError:
            return self._cache.setdefault(k, self._truncate(k))

    def _truncate(self, k):
        G = self.group
        if G.has(METRIC):
            return self.truncate_at(G.radius(k))
        if self.elements is not None:
            return tuple(G.sorted(x for x in self.elements if not G.member(k, x)))
        raise UnsupportedCapability(f"{self.name}: cannot truncate in {G.name}")

    def truncate_at(self, eps) -> Sequence:
        """Elements of magnitude ``>= eps``, sorted ascending."""
        G = self.group
        if self.elements is not None and G.has(METRIC):
            return tuple(G.sorted(x for x in self.elements if G.magnitude(x) >= eps))
        raise UnsupportedCapability(f"{self.name}: truncate_at needs a metric group")

    def contains(self, x) -> bool:
        if self.elements is not None:
            return x in self.elements
        raise UnsupportedCapability(f"{self.name} has no membership test")

    def in_truncation(self, k: int, x) -> bool:
        """Whether an element ``x`` of the set survives in ``truncate(k)``."""
        return not self.group.member(k, x)

    def window(self, lo, hi) -> list:
        """Elements ``t`` with ``lo <= t <= hi``, for positive ``lo``."""
        G = self.group
        if G.has(METRIC):
            pool = self.truncate_at(G.magnitude(lo))
        else:
            pool = self.truncate(1)
        return [t for t in pool if G.le(lo, t) and G.le(t, hi)]

    def iter_elements(self) -> Iterator:
        """Every element once: by decreasing magnitude level by level."""
        G = self.group
        if self.elements is not None:
            if G.has(METRIC):
                yield from sorted(self.elements, key=lambda x: (-G.magnitude(x), G.sort_key(x)))
            else:
                yield from G.sorted(self.elements)
            return
        if not G.has(METRIC):
            yield from self.truncate(1)
            return
        previous = ()
        for k in itertools.count():
            current = self.truncate(k)
            seen = set(previous)
            fresh = [x for x in current if x not in seen]
            yield from sorted(fresh, key=lambda x: (-G.magnitude(x), G.sort_key(x)))
            previous = current


class CustomSet(Lcf0Set):
    """A user-supplied descriptor.  Without ``contains`` the operations that
    need exact membership raise :class:`UnsupportedCapability`.
    """

    def __init__(self, name, group, truncate, contains=None, positive=False):
        super().__init__(name, group, positive)
        self._truncate_fn = truncate
        self._contains_fn = contains

    def _truncate(self, k):
        return self._truncate_fn(k)

    def in_truncation(self, k, x):
        return x in self.truncate(k)

    def contains(self, x):
        if self._contains_fn is None:
            raise UnsupportedCapability(f"{self.name} did not declare contains")
        return self._contains_fn(x)

    def iter_elements(self):
        # truncation levels, since truncate_at is unknown
        G = self.group
        seen = set()
        for k in itertools.count():
            for x in self.truncate(k):
                if x not in seen:
                    seen.add(x)
                    yield x
            if not G.has(METRIC) and k >= 1:
                return


class UnitFractions(Lcf0Set):
    def __init__(self, group):
        super().__init__("unit_fractions", group, positive=True)

    def truncate_at(self, eps):
        if eps <= 0:
            raise ValueError("eps must be positive")
        return UnitFractionRange(math.floor(1 / Fraction(eps)))

    def contains(self, x):
        return isinstance(x, (Fraction, int)) and x > 0 and Fraction(x).numerator == 1

    def window(self, lo, hi):
        m_lo = max(1, math.ceil(1 / Fraction(hi)))
        m_hi = math.floor(1 / Fraction(lo))
        return [Fraction(1, m) for m in range(m_hi, m_lo - 1, -1)]

    def iter_elements(self):
        return (Fraction(1, m) for m in itertools.count(1))


class WeightedSet(Lcf0Set):
    """``{a/b : a in A, b in B}``."""

    def __init__(self, group, spec: WeightedSpec):
        A = tuple(sorted({Fraction(a) for a in spec.A}))
        name = f"weighted(A={[str(a) for a in A]}, B={spec.B!r})"
        elements = None
        if spec.B.is_finite:
            elements = {a / b for a in A for b in spec.B}
        super().__init__(name, group, positive=True, elements=elements)
        self.A = A
        self.B = spec.B

    def truncate_at(self, eps):
        """Values ``a/b`` with ``b < a/eps``, so magnitude exactly ``eps`` is
        left out here, unlike the other built-ins.
        """
        if eps <= 0:
            raise ValueError("eps must be positive")
        out = set()
        for a in self.A:
            bound = a / Fraction(eps)
            for b in self.B.between(0, bound):
                if b < bound:
                    out.add(a / b)
        return tuple(sorted(out))

    def in_truncation(self, k, x):
        return self.group.magnitude(x) > self.group.radius(k)

    def window(self, lo, hi):
        out = set()
        for a in self.A:
            # lo <= a/b <= hi  <=>  a/hi <= b <= a/lo
            for b in self.B.between(a / Fraction(hi), a / Fraction(lo)):
                out.add(a / b)
        return sorted(out)

    def contains(self, x):
        if not isinstance(x, (Fraction, int)) or x <= 0:
            return False
        return any(self.B.contains(a / Fraction(x)) for a in self.A)

    def window(self, lo, hi):
        out = set()
        for a in self.A:
            for b in self.B.between(a / Fraction(hi), a / Fraction(lo)):
                out.add(a / b)
        return sorted(out)


class FiniteSet(Lcf0Set):
    def __init__(self, group, elems):
        super().__init__(
            "finite({})".format(",".join(group.format(x) for x in elems)),
            group,
            positive=all(group.is_positive(x) for x in elems),
            elements=elems,
        )
        self._members = frozenset(elems)

    def contains(self, x):
        return x in self._members


class NegatedSet(Lcf0Set):
    def __init__(self, of: Lcf0Set):
        G = of.group
        elements = None if of.elements is None else [G.neg(x) for x in of.elements]
        super().__init__(f"negate({of.name})", G, positive=False, elements=elements)
        self.of = of

    def _truncate(self, k):
        # the basis is symmetric, so -(T \ u_k) = (-T) \ u_k; negation
        # reverses a sorted sequence
        neg = self.group.neg
        return tuple(neg(x) for x in reversed(self.of.truncate(k)))

    def truncate_at(self, eps):
        neg = self.group.neg
        return tuple(neg(x) for x in reversed(self.of.truncate_at(eps)))

    def contains(self, x):
        return self.of.contains(self.group.neg(x))

    def in_truncation(self, k, x):
        return self.of.in_truncation(k, self.group.neg(x))

    def iter_elements(self):
        return (self.group.neg(x) for x in self.of.iter_elements())


class UnionSet(Lcf0Set):
    def __init__(self, first: Lcf0Set, second: Lcf0Set):
        if first.group is not second.group:
            raise GroupMismatch(f"{first.group.name} vs {second.group.name}")
        elements = None
        if first.elements is not None and second.elements is not None:
            elements = set(first.elements) | set(second.elements)
        super().__init__(
            f"union({first.name},{second.name})",
            first.group,
            positive=first.positive and second.positive,
            elements=elements,
        )
        self.parts = (first, second)

    def _merge(self, a, b):
        # both inputs are sorted and duplicate-free
        out = []
        for x in heapq.merge(a, b, key=self.group.sort_key):
            if not out or out[-1] != x:
                out.append(x)
        return tuple(out)

    def _truncate(self, k):
        return self._merge(self.parts[0].truncate(k), self.parts[1].truncate(k))

    def truncate_at(self, eps):
        return self._merge(self.parts[0].truncate_at(eps), self.parts[1].truncate_at(eps))

    def contains(self, x):
        return self.parts[0].contains(x) or self.parts[1].contains(x)

    def in_truncation(self, k, x):
        return any(T.contains(x) and T.in_truncation(k, x) for T in self.parts)

    def window(self, lo, hi):
        return self.group.sorted(set(self.parts[0].window(lo, hi)) | set(self.parts[1].window(lo, hi)))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _require_rationals(G):
    if G is not make_rationals():
        raise GroupMismatch(f"expected the rationals instance, got {G.name}")


def unit_fractions(G: Optional[GroupInstance] = None) -> Lcf0Set:
    """``{1/m : m >= 1}``."""
    G = G or make_rationals()
    _require_rationals(G)
    return UnitFractions(G)


def weighted(G: Optional[GroupInstance], spec: WeightedSpec) -> Lcf0Set:
    G = G or make_rationals()
    _require_rationals(G)
    spec.validate()
    return WeightedSet(G, spec)


def finite_set(G: GroupInstance, elems) -> Lcf0Set:
    elems = list(elems)
    if not elems:
        raise InvalidSpec("finite set must be nonempty")
    if any(G.equals(x, G.zero) for x in elems):
        raise ZeroElement(f"{G.format(G.zero)} cannot belong to an LCF0 set")
    if len(set(elems)) != len(elems):
        raise InvalidSpec("finite set elements must be distinct")
    return FiniteSet(G, elems)


def negate(T: Lcf0Set) -> Lcf0Set:
    return NegatedSet(T)


def union(T1: Lcf0Set, T2: Lcf0Set) -> Lcf0Set:
    return UnionSet(T1, T2)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    name: str
    depth: int
    passed: bool
    violation: Optional[str] = None
    level: Optional[int] = None
    witness: object = None
    contains_checked: bool = True

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def validate_lcf0(T: Lcf0Set, depth: int) -> ValidationReport:
    """Check both clauses of the LCF0 definition on truncations ``1..depth``.

    Violations are reported, never raised.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    G = T.group

    def fail(msg, k, x):
        return ValidationReport(T.name, depth, False, msg, k, x, contains_ok)

    def lookup(seq):
        # tuples would make the monotonicity check quadratic
        return seq if isinstance(seq, UnitFractionRange) else set(seq)

    contains_ok = True
    nxt = T.truncate(1)
    for k in range(1, depth + 1):
        cur, nxt = nxt, T.truncate(k + 1)
        nxt_lookup = lookup(nxt)
        for x in cur:
            if G.equals(x, G.zero):
                return fail("zero in truncation", k, x)
            if G.member(k, x):
                return fail("element inside the neighbourhood u_k", k, x)
            if T.positive and not G.is_positive(x):
                return fail("element outside the positive cone", k, x)
            if contains_ok:
                try:
                    if not T.contains(x):
                        return fail("contains() rejects a truncation element", k, x)
                except UnsupportedCapability:
                    contains_ok = False
            if x not in nxt_lookup:
                return fail("truncation not monotone in k", k, x)
        keys = [G.sort_key(x) for x in cur] if not isinstance(cur, UnitFractionRange) else None
        if keys is not None and any(not a < b for a, b in zip(keys, keys[1:])):
            return fail("truncation not sorted and duplicate-free", k, None)
    return ValidationReport(T.name, depth, True, contains_checked=contains_ok)


# ---------------------------------------------------------------------------
# Config fragments
# ---------------------------------------------------------------------------


def stream_from_config(obj) -> object:
    kind = obj.get("kind")
    if kind == "geometric":
        return GeometricStream(q(obj["start"]), q(obj["ratio"]))
    if kind == "arithmetic":
        return ArithmeticStream(q(obj["start"]), q(obj["step"]))
    if kind == "list":
        return ListStream([q(v) for v in obj["values"]])
    raise ParseError(f"unknown stream kind {kind!r}")


def set_from_config(G: GroupInstance, obj) -> Lcf0Set:
    """Build a descriptor from a JSON-style fragment such as
    ``{"kind": "unit_fractions"}``.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"set descriptor must be an object with 'kind': {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "unit_fractions":
            return unit_fractions(G)
        if kind == "weighted":
            A = tuple(q(a) for a in obj["A"])
            return weighted(G, WeightedSpec(A, stream_from_config(obj["B"])))
        if kind == "finite":
            return finite_set(G, [G.parse(e) for e in obj["elements"]])
        if kind == "negate":
            return negate(set_from_config(G, obj["of"]))
        if kind == "union":
            parts = [set_from_config(G, o) for o in obj["of"]]
            if len(parts) < 2:
                raise ParseError("union needs at least two sets")
            out = parts[0]
            for p in parts[1:]:
                out = union(out, p)
            return out
    except KeyError as e:
        raise ParseError(f"{kind} descriptor missing field {e}") from None
    raise ParseError(f"unknown set kind {kind!r}")
