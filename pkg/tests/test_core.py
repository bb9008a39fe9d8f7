from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gshift.core import (
    Point,
    canonical_form,
    canonicalize,
    dyadic,
    enumerate_points,
    first_mismatch,
    format_word,
    metric,
    parse_word,
    primitive_root,
    replace_last,
    shift,
)

words = st.lists(st.integers(0, 3), min_size=1, max_size=5).map(tuple)
points = st.builds(Point, words, st.lists(st.integers(0, 3), max_size=5).map(tuple))


def explicit(x: Point, n: int):
    """The last ``n`` symbols, spelled out by repeating the period by hand."""
    reps = n // len(x.period) + 1
    return (x.period * reps + x.transient)[-n:]


def test_parse_and_format_words():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word("1.12.3") == (1, 12, 3)
    assert format_word((1, 12, 3)) == "1.12.3"
    with pytest.raises(ValueError):
        parse_word("")
    with pytest.raises(ValueError):
        parse_word("0x")


def test_primitive_root():
    assert primitive_root((0, 1, 0, 1)) == (0, 1)
    assert primitive_root((0, 0, 0)) == (0,)
    assert primitive_root((0, 1, 1)) == (0, 1, 1)


def test_canonical_form_absorbs_periodic_continuation():
    # ...0101 followed by 0 is ...01010, i.e. period 10 with nothing after it
    assert canonical_form((0, 1), (0,)) == ((1, 0), ())
    assert canonical_form((0,), (0, 0, 1)) == ((0,), (1,))
    assert Point((0, 0), (0,)) == Point((0,))


def test_point_parse_roundtrip_and_display():
    x = Point.parse("0|1")
    assert x == Point((0,), (1,))
    assert str(x) == "(0)^inf.1"
    assert Point.parse(x.spec_string()) == x
    assert Point.parse("01").spec_string() == "01"


def test_indexing_and_suffix():
    x = Point((0, 1), (1, 1))  # ...010111
    assert [x[j] for j in range(0, -6, -1)] == [1, 1, 1, 0, 1, 0]
    assert x.suffix(4) == (0, 1, 1, 1)
    assert x.last == 1
    with pytest.raises(IndexError):
        x[1]


def test_shift_append_replace():
    x = Point.parse("0|1")
    assert x.shift() == Point((0,))
    assert x.append(0) == Point((0,), (1, 0))
    assert replace_last(x, 0) == Point((0,))
    assert shift(Point((0, 1))) == Point((1, 0))


def test_metric_values():
    x, y = Point.parse("0|1"), Point.parse("0|11")
    assert first_mismatch(x, y) == 1
    assert metric(x, y) == Fraction(1, 2)
    assert metric(x, x) == 0
    assert metric(Point((0,)), Point((1,))) == 1
    assert dyadic(3) == Fraction(1, 8)


def test_enumerate_points_unique_and_canonical():
    pts = list(enumerate_points([0, 1], 5))
    assert len(pts) == len(set(pts))
    assert pts[:2] == [Point((0,)), Point((1,))]
    assert all(canonicalize(p) == p for p in pts)


@given(points)
def test_canonicalize_idempotent(x):
    assert canonicalize(canonicalize(x)) == x
    assert canonical_form(x.period, x.transient) == (x.period, x.transient)


@given(points, st.integers(1, 20))
def test_suffix_matches_explicit_spelling(x, n):
    assert x.suffix(n) == explicit(x, n)


@given(points, st.integers(0, 3))
def test_shift_undoes_append(x, a):
    assert x.append(a).shift() == x
    assert x.append(a).last == a


@given(points)
def test_append_of_shift_restores(x):
    assert x.shift().append(x.last) == x


@given(points, points)
def test_metric_symmetric_and_matches_explicit(x, y):
    d = metric(x, y)
    assert d == metric(y, x)
    assert (d == 0) == (x == y)
    if x != y:
        l = first_mismatch(x, y)
        n = l + 1
        assert explicit(x, n)[-l:] == explicit(y, n)[-l:] if l else True
        assert explicit(x, n)[0] != explicit(y, n)[0]


@settings(max_examples=200)
@given(points, points, points)
def test_ultrametric_inequality(x, y, z):
    assert metric(x, z) <= max(metric(x, y), metric(y, z))
