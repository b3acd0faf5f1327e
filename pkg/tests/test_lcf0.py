import itertools
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from egyptsum import (
    ArithmeticStream,
    GeometricStream,
    GroupMismatch,
    InvalidSpec,
    ListStream,
    WeightedSpec,
    ZeroElement,
    finite_set,
    make_integers,
    make_lex_pairs,
    make_rationals,
    negate,
    union,
    unit_fractions,
    validate_lcf0,
    weighted,
)
from egyptsum.errors import ParseError, UnsupportedCapability
from egyptsum.lcf0 import CustomSet, set_from_config

from oracles import weighted_formula

Q = make_rationals()
Z = make_integers()
U = unit_fractions(Q)


def geometric(A, start=2, ratio=2):
    return weighted(Q, WeightedSpec(tuple(F(a) for a in A), GeometricStream(start, ratio)))


# --- unit fractions -------------------------------------------------------


def test_unit_fraction_truncation():
    assert list(U.truncate(2)) == [F(1, 4), F(1, 3), F(1, 2), F(1)]
    assert list(U.truncate_at(F(1, 4))) == [F(1, 4), F(1, 3), F(1, 2), F(1)]


def test_unit_fraction_membership():
    assert U.contains(F(1, 7))
    assert not U.contains(F(2, 7))
    assert not U.contains(F(-1, 7))


@given(st.fractions(min_value=F(1, 5000), max_value=F(3)))
def test_unit_fraction_count_is_floor_of_inverse(eps):
    assert len(U.truncate_at(eps)) == math.floor(1 / eps)


def test_unit_fraction_truncation_is_lazy_at_depth_32():
    t = U.truncate(32)
    assert len(t) == 2**32
    assert t[0] == F(1, 2**32) and t[-1] == 1
    assert F(1, 2**32) in t and F(1, 2**32 + 1) not in t


@settings(max_examples=300)
@given(st.integers(0, 31), st.data())
def test_unit_fraction_monotone_to_depth_32(k, data):
    small, big = U.truncate(k), U.truncate(k + 1)
    assert len(small) <= len(big)
    x = small[data.draw(st.integers(0, len(small) - 1))]
    assert x in big
    assert not Q.member(k, x)
    assert x != 0


# --- weighted sets ----------------------------------------------------------


def test_weighted_examples():
    assert list(geometric([1]).truncate_at(F(1, 5))) == [F(1, 4), F(1, 2)]
    assert list(geometric([1, 3]).truncate_at(F(1, 3))) == [F(3, 8), F(1, 2), F(3, 4), F(3, 2)]
    T = weighted(Q, WeightedSpec((F(2),), ArithmeticStream(1, 1)))
    assert T.contains(F(2, 5))
    assert not T.contains(F(3, 5))


def test_weighted_example_matches_formula_oracle():
    # b < a/eps for a in {1, 3}, b in {2, 4, 8, ...}, eps = 1/3
    expected = weighted_formula([1, 3], [2**j for j in range(1, 10)], F(1, 3))
    assert set(geometric([1, 3]).truncate_at(F(1, 3))) == expected


def test_weighted_boundary_follows_strict_formula():
    # b = 4 = a/eps is excluded by b < a/eps, although 1/4 is outside u_2
    T = geometric([1])
    assert F(1, 4) not in T.truncate(2)
    assert not T.in_truncation(2, F(1, 4))
    assert T.in_truncation(3, F(1, 4))
    assert T.window(F(1, 4), F(1, 2)) == [F(1, 4), F(1, 2)]


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.fractions(min_value=F(1, 8), max_value=F(8), max_denominator=12), min_size=1, max_size=3),
    st.fractions(min_value=F(1, 3), max_value=F(3), max_denominator=6),
    st.sampled_from([F(3, 2), F(2), F(3)]),
    st.integers(1, 10),
)
def test_weighted_truncation_matches_formula(A, start, ratio, k):
    T = weighted(Q, WeightedSpec(tuple(A), GeometricStream(start, ratio)))
    eps = F(1, 2**k)
    prefix = [start * ratio**j for j in range(200) if start * ratio**j <= 2 * max(A) / eps]
    expected = weighted_formula(A, prefix, eps)
    assert set(T.truncate(k)) == expected
    assert all(T.in_truncation(k, x) == (x in expected) for x in T.truncate(k + 1))


def test_weighted_values_are_deduplicated():
    T = geometric([1, 2])  # 2/4 == 1/2
    t = list(T.truncate(4))
    assert len(t) == len(set(t))
    assert t == sorted(t)


@pytest.mark.parametrize(
    "spec",
    [
        WeightedSpec((), GeometricStream(2, 2)),
        WeightedSpec((F(-1),), GeometricStream(2, 2)),
        WeightedSpec((F(1),), ListStream([3, 2])),
    ],
)
def test_weighted_invalid_specs(spec):
    with pytest.raises(InvalidSpec):
        weighted(Q, spec)


def test_stream_constructors_reject_bad_parameters():
    with pytest.raises(InvalidSpec):
        GeometricStream(2, 1)
    with pytest.raises(InvalidSpec):
        ArithmeticStream(0, 1)


@pytest.mark.parametrize(
    "B",
    [GeometricStream(F(1, 3), 3), ArithmeticStream(F(1, 2), F(2, 3)), ListStream([1, 5, 9])],
    ids=repr,
)
def test_count_below_matches_stream(B):
    prefix = list(itertools.islice(iter(B), 40))
    for x in [F(0), F(1, 2), F(1), F(7, 3), F(10), prefix[-1]]:
        assert B.count_below(x) == sum(1 for b in prefix if b < x)
    for b in prefix:
        assert B.contains(b)
    assert not B.contains(prefix[0] / 2)


def test_bounded_stream_gives_finite_set():
    T = weighted(Q, WeightedSpec((F(1),), ListStream([2, 3])))
    assert set(T.elements) == {F(1, 2), F(1, 3)}
    assert list(T.truncate(10)) == [F(1, 3), F(1, 2)]


# --- finite, negate, union --------------------------------------------------


def test_finite_set_examples():
    assert list(finite_set(Z, [1]).truncate(1)) == [1]
    assert list(finite_set(Q, [F(1, 2), F(-1, 3)]).truncate_at(F(1, 4))) == [F(-1, 3), F(1, 2)]
    with pytest.raises(ZeroElement):
        finite_set(Q, [F(0)])
    with pytest.raises(InvalidSpec):
        finite_set(Q, [F(1), F(1)])


def test_finite_set_drops_elements_inside_the_ball():
    T = finite_set(Q, [F(1, 100), F(1)])
    assert list(T.truncate(3)) == [F(1)]
    assert list(T.truncate(7)) == [F(1, 100), F(1)]


def test_finite_set_positive_flag():
    assert finite_set(Q, [F(1), F(2)]).positive
    assert not finite_set(Q, [F(1), F(-2)]).positive


def test_negate_examples():
    N = negate(U)
    assert list(N.truncate_at(F(1, 3))) == [F(-1), F(-1, 2), F(-1, 3)]
    assert N.contains(F(-1, 5))
    assert not N.contains(F(1, 5))
    assert not N.positive
    for k in range(8):
        assert list(negate(N).truncate(k)) == list(U.truncate(k))


def test_union_examples():
    three_halves = finite_set(Q, [F(3, 2)])
    assert list(union(U, three_halves).truncate_at(F(1, 2))) == [F(1, 2), F(1), F(3, 2)]
    assert list(union(U, negate(U)).truncate_at(F(1, 2))) == [F(-1), F(-1, 2), F(1, 2), F(1)]
    for k in range(8):
        assert list(union(U, U).truncate(k)) == list(U.truncate(k))


def test_union_group_mismatch():
    with pytest.raises(GroupMismatch):
        union(U, finite_set(Z, [1]))


# --- validation -----------------------------------------------------------


def test_validate_builtins():
    assert validate_lcf0(U, 10).passed
    assert validate_lcf0(geometric([1]), 10).passed


def test_validate_reports_zero_witness():
    def truncate(k):
        return [F(0), F(1)] if k == 3 else [F(1)]

    broken = CustomSet("broken", Q, truncate, contains=lambda x: x in (F(0), F(1)))
    report = validate_lcf0(broken, 5)
    assert not report.passed
    assert report.witness == 0
    assert report.level == 3


def test_validate_reports_non_monotone_truncation():
    broken = CustomSet("shrinking", Q, lambda k: [F(1)] if k < 4 else [F(2)], contains=lambda x: True)
    report = validate_lcf0(broken, 6)
    assert not report.passed and "monotone" in report.violation


def test_validate_without_contains_still_runs():
    T = CustomSet("opaque", Q, lambda k: [F(1)])
    report = validate_lcf0(T, 4)
    assert report.passed and not report.contains_checked
    with pytest.raises(UnsupportedCapability):
        T.contains(F(1))


BUILTINS = {
    "unit": U,
    "weighted_geometric": geometric([1, 3]),
    "weighted_arithmetic": weighted(Q, WeightedSpec((F(1, 2), F(5, 3)), ArithmeticStream(2, 7))),
    "finite": finite_set(Q, [F(1, 2), F(-1, 3), F(1, 1000)]),
}


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_combinators_preserve_lcf0_to_depth_16(name):
    T = BUILTINS[name]
    for S in (negate(T), union(T, negate(T))):
        assert validate_lcf0(S, 16).passed, S.name


def test_union_with_finite_set_validates():
    extra = finite_set(Q, [F(7, 3), F(1, 3)])
    for T in (BUILTINS["weighted_geometric"], BUILTINS["finite"], U):
        assert validate_lcf0(union(T, extra), 12).passed


@pytest.mark.parametrize("name", ["weighted_geometric", "finite"])
def test_small_builtins_monotone_to_depth_32(name):
    assert validate_lcf0(BUILTINS[name], 32).passed


def test_discrete_sets_validate():
    LEX = make_lex_pairs()
    T = finite_set(LEX, [(0, 1), (1, -5)])
    assert validate_lcf0(T, 8).passed
    assert list(T.truncate(1)) == [(0, 1), (1, -5)]


# --- element iteration ------------------------------------------------------


def test_iter_elements_orders_by_decreasing_magnitude():
    assert list(itertools.islice(U.iter_elements(), 4)) == [F(1), F(1, 2), F(1, 3), F(1, 4)]
    T = weighted(Q, WeightedSpec((F(1),), ArithmeticStream(2, 1)))
    assert list(itertools.islice(T.iter_elements(), 4)) == [F(1, 2), F(1, 3), F(1, 4), F(1, 5)]
    N = negate(U)
    assert list(itertools.islice(N.iter_elements(), 2)) == [F(-1), F(-1, 2)]


def test_iter_elements_of_finite_sets_terminates():
    assert list(finite_set(Q, [F(1, 3), F(-1)]).iter_elements()) == [F(-1), F(1, 3)]
    assert list(finite_set(Z, [3, 1]).iter_elements()) == [1, 3]


# --- config -------------------------------------------------------------------


def test_set_from_config_round_trip():
    cfg = {
        "kind": "union",
        "of": [
            {"kind": "weighted", "A": ["1", "3"], "B": {"kind": "geometric", "start": "2", "ratio": "2"}},
            {"kind": "negate", "of": {"kind": "unit_fractions"}},
        ],
    }
    T = set_from_config(Q, cfg)
    assert list(T.truncate_at(F(1, 3))) == [F(-1), F(-1, 2), F(-1, 3), F(3, 8), F(1, 2), F(3, 4), F(3, 2)]
    A = set_from_config(Q, {"kind": "weighted", "A": ["1"], "B": {"kind": "arithmetic", "start": "1", "step": "1"}})
    # same elements as the unit fractions, but the strict bound drops 1/4 at k=2
    assert list(A.truncate(2)) == [F(1, 3), F(1, 2), F(1)]
    assert list(A.truncate_at(F(1, 5))) == list(U.truncate_at(F(1, 4)))
    assert list(set_from_config(Z, {"kind": "finite", "elements": ["1"]}).truncate(1)) == [1]


@pytest.mark.parametrize(
    "cfg",
    [
        {"kind": "mystery"},
        {"kind": "finite"},
        {"kind": "weighted", "A": ["0.5"], "B": {"kind": "geometric", "start": "2", "ratio": "2"}},
        {"kind": "union", "of": [{"kind": "unit_fractions"}]},
        ["unit_fractions"],
    ],
)
def test_set_from_config_errors(cfg):
    with pytest.raises(ParseError):
        set_from_config(Q, cfg)
