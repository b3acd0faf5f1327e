"""Decreasing sequences in sumsets and the absence of increasing ones.

An infinite subset of ``E_n`` (positive cone, order respecting the topology)
accumulates somewhere, and only from above.  This module locates such an
accumulation point from samples, extracts a strictly decreasing sequence
converging to it, and counts net points just below a point to check that
nothing accumulates from beneath.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional

from .errors import ParseError, UnsupportedCapability
from .groups import METRIC, GroupInstance
from .sumset import DEFAULT_BUDGET, Representation, SumSpec, build_net

ORDERS = ("by-denominator-sum", "lexicographic")


class _Prefix:
    """Lazily materialized prefix of a set's element iteration."""

    def __init__(self, it: Iterator):
        self._it = it
        self.items = []
        self.exhausted = False

    def get(self, i):
        while len(self.items) <= i and not self.exhausted:
            try:
                self.items.append(next(self._it))
            except StopIteration:
                self.exhausted = True
        return self.items[i] if i < len(self.items) else None


def _compositions(total: int, parts: int):
    """Tuples of ``parts`` naturals summing to ``total``, lexicographically."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _index_tuples(n: int, order: str, sizes: Callable[[], Optional[list]]):
    for level in itertools.count():
        bound = sizes()
        if order == "by-denominator-sum":
            if bound is not None and level > sum(s - 1 for s in bound):
                return
            yield from _compositions(level, n)
        else:
            if bound is not None and level > max(s - 1 for s in bound):
                return
            for t in itertools.product(range(level + 1), repeat=n):
                if max(t) == level:
                    yield t


class ElementStream:
    """A restartable source of distinct elements, each with an optional
    :class:`Representation` witness.

    ``factory()`` must return a fresh iterator of ``(element, witness)``
    pairs every time it is called; see :meth:`from_iterable` for plain
    element sources.
    """

    def __init__(self, group: GroupInstance, factory: Callable[[], Iterator], spec: Optional[SumSpec] = None, name: str = "stream"):
        self.group = group
        self.factory = factory
        self.spec = spec
        self.name = name

    def __repr__(self):
        return f"<ElementStream {self.name}>"

    def scan(self, budget: Optional[int] = None):
        """Yield distinct ``(element, witness)`` pairs from a fresh pass,
        reading at most ``budget`` raw emissions.
        """
        seen = set()
        raw = self.factory()
        if budget is not None:
            raw = itertools.islice(raw, budget)
        for x, w in raw:
            if x not in seen:
                seen.add(x)
                yield x, w

    def take(self, count: int, budget: Optional[int] = None) -> list:
        return [x for x, _ in itertools.islice(self.scan(budget), count)]

    @classmethod
    def from_spec(cls, spec: SumSpec, order: str = "by-denominator-sum") -> "ElementStream":
        """Enumerate ``E_n`` through index tuples into each set's element order.

        ``by-denominator-sum`` walks tuples by increasing index sum;
        ``lexicographic`` walks shells of increasing maximal index, each shell
        in lexicographic order.
        """
        if order not in ORDERS:
            raise ParseError(f"unknown stream order {order!r}; expected one of {ORDERS}")
        G = spec.group

        def factory():
            prefixes = [_Prefix(T.iter_elements()) for T in spec.sets]

            def sizes():
                if all(p.exhausted for p in prefixes):
                    return [len(p.items) for p in prefixes]
                return None

            for idx in _index_tuples(spec.n, order, sizes):
                terms = []
                for p, i in zip(prefixes, idx):
                    x = p.get(i)
                    if x is None:
                        break
                    terms.append(x)
                else:
                    terms = tuple(terms)
                    x = G.total(terms)
                    yield x, Representation(x, terms)

        return cls(G, factory, spec, f"{order}({', '.join(T.name for T in spec.sets)})")

    @classmethod
    def from_iterable(cls, group: GroupInstance, factory: Callable[[], Iterator], name: str = "custom") -> "ElementStream":
        """Wrap a factory of bare elements (no witnesses)."""
        return cls(group, lambda: ((x, None) for x in factory()), None, name)


# ---------------------------------------------------------------------------
# Accumulation points
# ---------------------------------------------------------------------------


def _reduce(spec: SumSpec, terms, k):
    """Zero out the terms missing from ``truncate(k)``; returns (value, dropped count)."""
    G = spec.group
    kept = [t if T.in_truncation(k, t) else G.zero for T, t in zip(spec.sets, terms)]
    dropped = sum(1 for t in kept if G.equals(t, G.zero))
    return G.total(kept), dropped


def _snap(spec: SumSpec, witnesses, levels: int):
    # finest resolution at which every cluster sample loses a term and all
    # of them reduce to the same 0-padded sum, i.e. the same net point
    for k in range(levels, 0, -1):
        values = set()
        for w in witnesses:
            v, dropped = _reduce(spec, w.terms, k)
            if dropped == 0:
                break
            values.add(v)
            if len(values) > 1:
                break
        else:
            if len(values) == 1:
                return values.pop(), k
    return None, None


def find_accumulation_point(stream: ElementStream, samples: int, depth: int, scan_budget: Optional[int] = None):
    """Locate a cluster point of the stream, or ``None``.

    Draws ``samples`` distinct elements and bisects their hull ``depth``
    times, keeping the half with more points (the left one on ties) while it
    still holds at least two.  The cluster is then snapped to the common
    0-padded reduction of its witnesses when one exists; otherwise the lower
    end of the final interval is returned.  ``None`` means the stream ran
    dry before ``samples`` distinct elements appeared.
    """
    G = stream.group
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if not G.has(METRIC):
        return None
    budget = scan_budget if scan_budget is not None else 64 * samples
    drawn = list(itertools.islice(stream.scan(budget), samples))
    if len(drawn) < samples:
        return None
    drawn.sort(key=lambda p: G.sort_key(p[0]))
    lo, hi = drawn[0][0], drawn[-1][0]
    cluster = drawn
    for _ in range(depth):
        mid = (lo + hi) / 2
        left = [p for p in cluster if p[0] <= mid]
        right = [p for p in cluster if p[0] > mid]
        lo2, hi2, kept = (lo, mid, left) if len(left) >= len(right) else (mid, hi, right)
        if len(kept) < 2:
            break
        lo, hi, cluster = lo2, hi2, kept
    witnesses = [w for _, w in cluster]
    if stream.spec is not None and all(w is not None for w in witnesses):
        value, _ = _snap(stream.spec, witnesses, depth)
        if value is not None:
            return value
    return lo


# ---------------------------------------------------------------------------
# Decreasing sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecreasingTrace:
    g: object
    terms: tuple
    requested: int
    exhausted: bool = False
    witnesses: tuple = ()

    def verify(self, group: GroupInstance, spec: Optional[SumSpec] = None) -> bool:
        """Re-check the trace from its own contents."""
        if any(not group.lt(self.g, x) for x in self.terms):
            return False
        if any(not group.lt(b, a) for a, b in zip(self.terms, self.terms[1:])):
            return False
        if spec is not None:
            if len(self.witnesses) != len(self.terms):
                return False
            for x, w in zip(self.terms, self.witnesses):
                if w is None or not group.equals(w.target, x) or not w.verify(spec):
                    return False
        return True


def extract_decreasing(stream: ElementStream, g, L: int, budget: int = 10**5) -> DecreasingTrace:
    """Build ``s_1 > s_2 > ... > s_L > g`` from the stream.

    Each step restarts the stream and takes the first element strictly
    between ``g`` and the previous term, reading at most ``budget``
    emissions.  A step that finds nothing ends the trace with
    ``exhausted=True``.
    """
    G = stream.group
    terms, witnesses = [], []
    upper = None
    for _ in range(L):
        for x, w in stream.scan(budget):
            if G.lt(g, x) and (upper is None or G.lt(x, upper)):
                terms.append(x)
                witnesses.append(w)
                upper = x
                break
        else:
            return DecreasingTrace(g, tuple(terms), L, True, tuple(witnesses))
    return DecreasingTrace(g, tuple(terms), L, False, tuple(witnesses))


def below_accumulation_census(spec: SumSpec, g, eta, schedule, side: str = "below", budget: int = DEFAULT_BUDGET) -> tuple:
    """Count net points in ``(g - eta, g)`` (or ``(g, g + eta)`` with
    ``side="above"``) for each resolution in ``schedule``.
    """
    G = spec.group
    if G.magnitude is None:
        raise UnsupportedCapability(f"{G.name} has no magnitude to measure eta against")
    eta = Fraction(eta)
    if not eta > 0:
        raise ValueError("eta must be positive")
    if side not in ("below", "above"):
        raise ValueError("side must be 'below' or 'above'")
    if G.has(METRIC):
        lo, hi = (G.sub(g, eta), g) if side == "below" else (g, G.add(g, eta))
    else:
        # numeric discrete group: the bounds need not be group elements
        lo, hi = (g - eta, g) if side == "below" else (g, g + eta)
    return tuple(build_net(spec, k, budget).count_between(lo, hi) for k in schedule)
