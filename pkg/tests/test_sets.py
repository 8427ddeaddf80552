"""Interval-union algebra: exactness is everything downstream rests on."""
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from ndentropy.sets import (CIRCLE, INTERVAL, IntervalUnion, gap_between,
                            point_distance, union_all)


def U(*pairs):
    return IntervalUnion([(F(a), F(b)) for a, b in pairs])


def test_normalization_merges_touching_and_overlapping():
    assert U((0, "1/2"), ("1/2", 1)) == U((0, 1))
    assert U((0, "2/3"), ("1/3", 1)) == U((0, 1))
    assert U(("1/2", "1/2")) == IntervalUnion.empty()


def test_basic_algebra():
    a = U((0, "1/4"), ("1/2", "3/4"))
    b = U(("1/8", "5/8"))
    assert a.union(b) == U((0, "3/4"))
    assert a.intersect(b) == U(("1/8", "1/4"), ("1/2", "5/8"))
    assert a.difference(b) == U((0, "1/8"), ("5/8", "3/4"))
    assert a.complement() == U(("1/4", "1/2"), ("3/4", 1))
    assert a.length() == F(1, 2)


def test_contains_point_and_right_endpoint_glue():
    a = U(("1/4", "3/4"))
    assert a.contains_point(F(1, 4))
    assert not a.contains_point(F(3, 4))
    assert not a.contains_point(F(1))
    b = U(("3/4", 1))
    assert b.owns_right_endpoint()
    assert b.contains_point(F(1))


def test_subset_and_disjoint():
    a = U((0, "1/4"))
    b = U((0, "1/2"))
    assert a.is_subset(b)
    assert not b.is_subset(a)
    assert a.isdisjoint(U(("1/4", "1/2")))


def test_translate_mod1_wraps():
    a = U(("3/4", 1))
    assert a.translate_mod1(F(1, 2)) == U(("1/4", "1/2"))
    b = U(("7/8", 1), (0, "1/8"))
    assert b.translate_mod1(F(1, 8)) == U((0, "1/4"))


def test_gap_between_interval_and_circle():
    a = U((0, "1/8"))
    b = U(("1/2", "5/8"))
    assert gap_between(INTERVAL, a, b) == F(3, 8)
    assert gap_between(CIRCLE, a, b) == F(3, 8)
    c = U(("7/8", 1))
    assert gap_between(INTERVAL, a, c) == F(3, 4)
    assert gap_between(CIRCLE, a, c) == 0  # wraps around through 1 ~ 0


def test_point_distance():
    assert point_distance(INTERVAL, F(1, 8), F(7, 8)) == F(3, 4)
    assert point_distance(CIRCLE, F(1, 8), F(7, 8)) == F(1, 4)


# -- property tests ---------------------------------------------------------

frac = st.integers(0, 64).map(lambda n: F(n, 64))


@st.composite
def unions(draw):
    n = draw(st.integers(0, 4))
    pairs = []
    for _ in range(n):
        a, b = sorted((draw(frac), draw(frac)))
        pairs.append((a, b))
    return IntervalUnion(pairs)


@settings(max_examples=120, deadline=None)
@given(unions(), unions())
def test_de_morgan(a, b):
    assert a.union(b).complement() == a.complement().intersect(b.complement())


@settings(max_examples=120, deadline=None)
@given(unions(), unions())
def test_difference_is_intersection_with_complement(a, b):
    assert a.difference(b) == a.intersect(b.complement())


@settings(max_examples=120, deadline=None)
@given(unions(), unions())
def test_lengths_add_up(a, b):
    assert a.union(b).length() + a.intersect(b).length() == a.length() + b.length()
