"""Sumsets ``E_n = T_1 + ... + T_n`` of LCF0 sets.

Everything here is exact.  The main objects are

* :func:`build_net` -- the finite set ``F`` of 0-padded sums drawn from the
  truncations at resolution ``k``.  Every element of ``E'_n`` lies within
  ``n * 2**-k`` of ``F``;
* :func:`find_gap` -- open intervals certified disjoint from ``E_n``;
* :func:`enumerate_representations` -- all ordered representations of a
  target in a positive-cone spec;
* :func:`representation_census` and :func:`trichotomy_check` -- counts of
  truncation-restricted representations across resolutions, and the
  classification of a 3-term target by their growth.
"""

from __future__ import annotations

import bisect
import enum
import functools
import itertools
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceeded, GroupMismatch, SpecArityError, UnsupportedCapability
from .groups import ARCHIMEDEAN, DISCRETE, METRIC, RATIONAL, GroupInstance, lower_witness
from .lcf0 import Lcf0Set

DEFAULT_BUDGET = 10**8
# trichotomy: growth is a violation only once 2**-k <= magnitude(g) / VIOLATION_FACTOR
VIOLATION_FACTOR = 2**10


@dataclass(frozen=True, eq=False)
class SumSpec:
    group: GroupInstance
    sets: tuple

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if not self.sets:
            raise ValueError("a sum spec needs at least one set")
        for T in self.sets:
            if T.group is not self.group:
                raise GroupMismatch(f"{T.name} lives in {T.group.name}, not {self.group.name}")

    @property
    def n(self) -> int:
        return len(self.sets)

    @property
    def positive(self) -> bool:
        return all(T.positive for T in self.sets)

    @classmethod
    def repeat(cls, T: Lcf0Set, n: int) -> "SumSpec":
        return cls(T.group, (T,) * n)


@dataclass(frozen=True)
class Representation:
    target: object
    terms: tuple

    def verify(self, spec: SumSpec) -> bool:
        G = spec.group
        if len(self.terms) != spec.n:
            return False
        if not all(T.contains(a) for T, a in zip(spec.sets, self.terms)):
            return False
        return G.equals(G.total(self.terms), self.target)


# ---------------------------------------------------------------------------
# Nets
# ---------------------------------------------------------------------------


class _ScaledPoints(Sequence):
    """Sorted rationals stored as integer numerators over a common denominator."""

    def __init__(self, keys, scale):
        self.keys = keys
        self.scale = scale

    def __len__(self):
        return len(self.keys)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [Fraction(v, self.scale) for v in self.keys[i]]
        return Fraction(self.keys[i], self.scale)

    def __iter__(self):
        L = self.scale
        return (Fraction(v, L) for v in self.keys)


@dataclass(eq=False)
class SumsetNet:
    """Finite net ``F`` of ``E'_n`` at resolution ``k``.

    ``fattening`` is the uniform cover radius ``n * 2**-k`` (0 for discrete
    groups, where ``F`` is exactly ``E'_n``).  :meth:`pad` gives the sharper
    per-point bound: the largest number of zero-padded coordinates over all
    ways of writing the point, so every element of ``E'_n`` lies within
    ``pad(i) * 2**-k`` of some ``points[i]``.
    """

    spec: SumSpec
    k: int
    points: Sequence
    fattening: object
    radius: Optional[Fraction]
    _keys: list = field(repr=False)
    _layers: list = field(repr=False)
    _scale: Optional[int] = field(repr=False, default=None)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def _key(self, x):
        if self._scale is not None:
            return Fraction(x) * self._scale
        return self.spec.group.sort_key(x)

    def bisect_left(self, x) -> int:
        if self._scale is not None:
            return bisect.bisect_left(self._keys, self._key(x))
        return bisect.bisect_left(self._keys, self._key(x), key=self.spec.group.sort_key)

    def bisect_right(self, x) -> int:
        if self._scale is not None:
            return bisect.bisect_right(self._keys, self._key(x))
        return bisect.bisect_right(self._keys, self._key(x), key=self.spec.group.sort_key)

    def __contains__(self, x):
        i = self.bisect_left(x)
        return i < len(self) and self.spec.group.equals(self.points[i], x)

    def pad(self, i: int) -> int:
        v = self._keys[i]
        for c, layer in enumerate(self._layers):
            if v in layer:
                return self.spec.n - c
        raise AssertionError("net point missing from every layer")

    def nearest(self, x):
        """Closest net point and its distance (metric groups only)."""
        G = self.spec.group
        i = self.bisect_left(x)
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(self):
                d = G.magnitude(G.sub(x, self.points[j]))
                if best is None or d < best[1]:
                    best = (self.points[j], d)
        return best

    def count_between(self, lo, hi) -> int:
        """Number of net points in the open interval ``(lo, hi)``."""
        return max(0, self.bisect_left(hi) - self.bisect_right(lo))

    def reach(self, i: int):
        """Closed interval around ``points[i]`` guaranteed to hold every
        element of ``E'_n`` that reduces to it.
        """
        f = self.points[i]
        if self.radius is None:
            return f, f
        w = self.pad(i) * self.radius
        lo = f if self.spec.positive else f - w
        return lo, f + w


def _net_estimate(truncs) -> int:
    return math.prod(len(t) + 1 for t in truncs)


@functools.lru_cache(maxsize=4)
def build_net(spec: SumSpec, k: int, budget: int = DEFAULT_BUDGET) -> SumsetNet:
    """All sums ``s_1 + ... + s_n`` with ``s_i`` in ``truncate(T_i, k) ∪ {0}``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    G = spec.group
    truncs = [T.truncate(k) for T in spec.sets]
    estimate = _net_estimate(truncs)
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)

    scale = None
    if G.has(RATIONAL):
        scale = math.lcm(1, *(x.denominator for tr in truncs for x in tr))
        terms = [[x.numerator * (scale // x.denominator) for x in tr] for tr in truncs]
        zero = 0
        add = int.__add__
    else:
        terms = [list(tr) for tr in truncs]
        zero = G.zero
        add = G.add

    # layers[c] = values reachable with exactly c nonzero coordinates
    layers = [{zero}]
    for tr in terms:
        grown = [set(layer) for layer in layers] + [set()]
        for c, layer in enumerate(layers):
            grown[c + 1].update({add(v, t) for v in layer for t in tr})
        layers = grown

    values = set().union(*layers)
    if scale is not None:
        keys = sorted(values)
        points = _ScaledPoints(keys, scale)
    else:
        keys = G.sorted(values)
        points = keys
    if G.has(METRIC):
        radius = G.radius(k)
        fattening = spec.n * radius
    else:
        radius = None
        fattening = 0
    return SumsetNet(spec, k, points, fattening, radius, keys, layers, scale)


@dataclass
class PropertyReport:
    name: str
    passed: bool
    trials: int
    min_slack: object = None
    failures: list = field(default_factory=list)


def random_representation(spec: SumSpec, rng: random.Random, depth: int, shallow: int = None):
    """Random terms (with occasional zero coordinates) drawn from ``truncate(depth)``.

    When ``shallow`` is given, half of the draws come from ``truncate(shallow)``
    so that sums mix large and small terms.
    """
    G = spec.group
    terms = []
    for T in spec.sets:
        roll = rng.random()
        if roll < 0.125:
            terms.append(G.zero)
            continue
        pool = T.truncate(shallow if shallow is not None and roll < 0.5 else depth)
        terms.append(pool[rng.randrange(len(pool))])
    return tuple(terms)


def cover_soundness(spec: SumSpec, net: SumsetNet, trials: int, seed: int = 0, extra_depth: int = 8) -> PropertyReport:
    """Check the net property on random exact sums from ``E'_n``."""
    G = spec.group
    rng = random.Random(seed)
    report = PropertyReport(f"cover_soundness(k={net.k})", True, trials)
    for _ in range(trials):
        terms = random_representation(spec, rng, net.k + extra_depth, net.k)
        x = G.total(terms)
        if G.has(METRIC):
            _, d = net.nearest(x)
            slack = net.fattening - d
            ok = slack > 0
        else:
            slack = None
            ok = x in net
        if report.min_slack is None or (slack is not None and slack < report.min_slack):
            report.min_slack = slack
        if not ok:
            report.passed = False
            report.failures.append(terms)
    return report


# ---------------------------------------------------------------------------
# Gap certificates
# ---------------------------------------------------------------------------


@dataclass
class GapCertificate:
    """An open interval ``gap`` inside ``query`` that misses ``E_n``.

    ``component`` is the maximal uncovered interval of the fattened net
    containing ``gap`` (an endpoint is ``None`` when unbounded); it is also
    disjoint from ``E_n`` but may extend past the query.
    """

    query: tuple
    gap: tuple
    k: int
    component: tuple
    net_size: int


def _check_totally_ordered(G):
    if not (G.has(METRIC) or G.has(DISCRETE)):
        raise UnsupportedCapability(f"{G.name} is neither metric nor discrete")


def find_gap(spec: SumSpec, query, k_max: int, budget: int = DEFAULT_BUDGET, k_min: int = 1) -> Optional[GapCertificate]:
    """Search resolutions ``k_min..k_max`` for a certified gap in ``query``.

    Returns ``None`` when no resolution up to ``k_max`` suffices; that is not
    evidence that ``E_n`` is dense in the query.
    """
    G = spec.group
    _check_totally_ordered(G)
    alpha, beta = query
    if not G.lt(alpha, beta):
        raise ValueError("query interval must satisfy alpha < beta")
    for k in range(k_min, k_max + 1):
        net = build_net(spec, k, budget)
        cert = _scan_gap(net, alpha, beta)
        if cert is not None:
            return cert
    return None


def _scan_gap(net: SumsetNet, alpha, beta) -> Optional[GapCertificate]:
    G = net.spec.group
    key = G.sort_key
    lo_search = hi_search = None
    if net.radius is not None:
        lo_search = alpha - net.fattening
        if not net.spec.positive:
            hi_search = beta + net.fattening
    i0 = net.bisect_left(alpha if lo_search is None else lo_search)
    i1 = net.bisect_right(beta if hi_search is None else hi_search)
    covered = sorted((net.reach(i) for i in range(i0, i1)), key=lambda iv: key(iv[0]))

    gaps = []
    cursor = alpha
    for l, r in covered:
        if key(l) >= key(beta):
            break
        if key(l) > key(cursor):
            gaps.append((cursor, l))
        if key(r) > key(cursor):
            cursor = r
        if key(cursor) >= key(beta):
            break
    if key(cursor) < key(beta):
        gaps.append((cursor, beta))
    if not gaps:
        return None

    best = gaps[0]
    for g in gaps[1:]:
        if key(G.sub(g[1], g[0])) > key(G.sub(best[1], best[0])):
            best = g
    return GapCertificate((alpha, beta), best, net.k, _component(net, best), len(net))


def _component(net: SumsetNet, gap):
    """Extend a certified gap to the maximal uncovered interval around it."""
    G = net.spec.group
    key = G.sort_key
    a, b = gap
    # left end: largest right reach among points at or below a
    left = None
    i = net.bisect_right(a) - 1
    while i >= 0:
        f = net.points[i]
        if left is not None and net.radius is not None and key(f + net.fattening) <= key(left):
            break
        r = net.reach(i)[1]
        if left is None or key(r) > key(left):
            left = r
        if net.radius is None:
            break
        i -= 1
    # right end: smallest left reach among points at or above b
    right = None
    i = net.bisect_left(b)
    while i < len(net):
        f = net.points[i]
        if right is not None and (net.radius is None or key(f - net.fattening) >= key(right)):
            break
        l = net.reach(i)[0]
        if right is None or key(l) < key(right):
            right = l
        if net.radius is None or net.spec.positive:
            break
        i += 1
    return (left, right)


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


def _check_enumerable(spec: SumSpec):
    G = spec.group
    if not spec.positive:
        raise UnsupportedCapability("enumeration needs every set inside the positive cone")
    if not ((G.has(ARCHIMEDEAN) and G.has(METRIC)) or G.has(DISCRETE)):
        raise UnsupportedCapability(f"{G.name} has no enumeration bound")


class _Search:
    """Exact search for ordered tuples in ``T_1 x ... x T_n`` summing to ``g``.

    With ``k`` set, every term is further restricted to ``truncate(T_i, k)``.
    """

    def __init__(self, spec: SumSpec, g, k: Optional[int] = None, budget: int = DEFAULT_BUDGET):
        self.spec = spec
        self.G = spec.group
        self.g = g
        self.k = k
        self.budget = budget
        self.nodes = 0
        self.found = set()

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(self.nodes, self.budget)

    def _admissible(self, j, x) -> bool:
        T = self.spec.sets[j]
        if not self.G.is_positive(x) or not T.contains(x):
            return False
        return self.k is None or T.in_truncation(self.k, x)

    def run(self) -> set:
        if self.G.is_positive(self.g):
            if self.G.has(METRIC):
                self._max_term(self.g, tuple(range(self.spec.n)), {})
            else:
                self._sequential(0, self.g, ())
        return self.found

    def _max_term(self, r, open_pos, assigned):
        # some remaining position holds a term >= lower_witness(r, |open_pos|)
        self._tick()
        G = self.G
        if len(open_pos) == 1:
            j = open_pos[0]
            if self._admissible(j, r):
                self._record({**assigned, j: r})
            return
        lo = lower_witness(G, r, len(open_pos))
        if self.k is not None:
            lo = max(lo, G.radius(self.k))
        if not G.le(lo, r):
            return
        for j in open_pos:
            rest = tuple(p for p in open_pos if p != j)
            for t in self.spec.sets[j].window(lo, r):
                if G.lt(t, r):
                    self._max_term(G.sub(r, t), rest, {**assigned, j: t})

    def _sequential(self, i, r, prefix):
        self._tick()
        G = self.G
        if i == self.spec.n - 1:
            if self._admissible(i, r):
                self._record(dict(enumerate(prefix + (r,))))
            return
        for t in self.spec.sets[i].truncate(self.k or 1):
            if G.is_positive(t) and G.lt(t, r):
                self._sequential(i + 1, G.sub(r, t), prefix + (t,))

    def _record(self, assigned):
        terms = tuple(assigned[j] for j in range(self.spec.n))
        # the remainder arithmetic assumed commutativity; confirm left to right
        if self.G.equals(self.G.total(terms), self.g):
            self.found.add(terms)


def _sorted_reps(spec, g, tuples):
    key = spec.group.sort_key
    return [Representation(g, t) for t in sorted(tuples, key=lambda t: tuple(map(key, t)))]


def enumerate_representations(spec: SumSpec, g, budget: int = DEFAULT_BUDGET) -> list:
    """Every ordered representation of ``g``, sorted lexicographically."""
    _check_enumerable(spec)
    return _sorted_reps(spec, g, _Search(spec, g, None, budget).run())


@dataclass
class CensusReport:
    target: object
    schedule: tuple
    counts: tuple

    @property
    def stabilized(self) -> bool:
        return len(self.counts) >= 2 and self.counts[-1] == self.counts[-2]

    @property
    def growing(self) -> bool:
        return len(self.counts) >= 2 and self.counts[-1] > self.counts[-2]


def _lookup_count(spec: SumSpec, g, k: int, budget: int) -> int:
    """Exhaustive count over ``truncate(T_1,k) x ... x truncate(T_{n-1},k)``
    with an exact membership lookup for the last coordinate.
    """
    G = spec.group
    truncs = [T.truncate(k) for T in spec.sets]
    estimate = math.prod(len(t) for t in truncs[:-1])
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)
    last = truncs[-1]
    last = last if not isinstance(last, (list, tuple)) else frozenset(last)

    def walk(i, partial):
        if i == spec.n - 1:
            # x_n solves partial + x_n = g, i.e. x_n = -partial + g
            return 1 if G.add(G.neg(partial), g) in last else 0
        return sum(walk(i + 1, G.add(partial, t)) for t in truncs[i])

    return walk(0, G.zero)


def representation_census(spec: SumSpec, g, schedule, budget: int = DEFAULT_BUDGET) -> CensusReport:
    """Count representations of ``g`` with every term in ``truncate(T_i, k)``
    for each ``k`` in ``schedule``.
    """
    schedule = tuple(schedule)
    if not schedule or any(a >= b for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be nonempty and strictly increasing")
    G = spec.group
    pruned = spec.positive and ((G.has(ARCHIMEDEAN) and G.has(METRIC)) or G.has(DISCRETE))
    counts = []
    for k in schedule:
        if pruned:
            counts.append(len(_Search(spec, g, k, budget).run()))
        else:
            counts.append(_lookup_count(spec, g, k, budget))
    return CensusReport(g, schedule, tuple(counts))


class Verdict(enum.Enum):
    FINITE_STABLE = "FINITE_STABLE"
    MEMBER = "MEMBER"
    ZERO = "ZERO"
    VIOLATION = "VIOLATION"
    UNDETERMINED = "UNDETERMINED"


@dataclass(frozen=True)
class Trichotomy:
    verdict: Verdict
    index: Optional[int] = None  # 1-based, for MEMBER

    def __str__(self):
        if self.verdict is Verdict.MEMBER:
            return f"MEMBER({self.index})"
        return self.verdict.value


def trichotomy_check(spec: SumSpec, g, report: CensusReport, factor: int = VIOLATION_FACTOR) -> Trichotomy:
    """Classify a 3-term target: finitely many representations, a member of
    some ``T_j``, or zero.
    """
    if spec.n != 3:
        raise SpecArityError(f"trichotomy applies to 3-term sums, got n={spec.n}")
    G = spec.group
    if report.stabilized:
        return Trichotomy(Verdict.FINITE_STABLE)
    if G.equals(g, G.zero):
        return Trichotomy(Verdict.ZERO)
    for j, T in enumerate(spec.sets, start=1):
        if T.contains(g):
            return Trichotomy(Verdict.MEMBER, j)
    if report.growing and G.has(METRIC):
        if G.radius(report.schedule[-1]) * factor <= G.magnitude(g):
            return Trichotomy(Verdict.VIOLATION)
    return Trichotomy(Verdict.UNDETERMINED)
