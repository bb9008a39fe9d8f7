import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gshift.core import Point
from gshift.subshift import (
    DisjointFamilies,
    EmptySubshift,
    EvenShift,
    FiniteForbidden,
    SpecParseError,
    SymbolRule,
    essential_graph,
    is_declared_finite_type,
    normalize,
    parse_fraction,
    parse_spec,
    reduce_forbidden,
    suffix_language,
    suffix_language_sizes,
)
from oracles import admissible, even_language, even_ok, random_forbidden, sft_language

GOLDEN = FiniteForbidden(2, frozenset({(1, 1)}))


def test_golden_mean_language_is_fibonacci():
    assert suffix_language_sizes(GOLDEN, 10) == [2, 3, 5, 8, 13, 21, 34, 55, 89, 144]
    assert suffix_language(GOLDEN, 2) == {(0, 0), (0, 1), (1, 0)}


def test_membership_of_points():
    assert GOLDEN.contains(Point.parse("0|1"))
    assert GOLDEN.contains(Point.parse("01"))
    assert not GOLDEN.contains(Point.parse("0|11"))
    assert not GOLDEN.contains(Point.parse("1"))


def test_reduce_forbidden_drops_superwords():
    assert reduce_forbidden({(1, 1), (0, 1, 1), (1, 0)}) == frozenset({(1, 1), (1, 0)})


def test_empty_subshift_is_reported():
    with pytest.raises(EmptySubshift):
        normalize(FiniteForbidden(2, frozenset({(0,), (1,)})))
    with pytest.raises(EmptySubshift):
        normalize(FiniteForbidden(2, frozenset({(0, 0), (1, 1), (0, 1)})))
    with pytest.raises(EmptySubshift):
        SymbolRule(frozenset())


def test_essential_graph_trims_dead_ends():
    # with 11 and 010 forbidden only ...000 survives
    g = essential_graph(FiniteForbidden(2, frozenset({(1, 1), (0, 1, 0)})))
    assert g.vertices == frozenset({(0, 0)})
    assert g.edges == frozenset({(0, 0, 0)})


def test_essential_graph_fixpoint():
    g = essential_graph(GOLDEN)
    assert essential_graph(FiniteForbidden(2, frozenset({(1, 1)}))) == g
    for v in g.vertices:
        assert any(e[1:] == v for e in g.edges)
        assert any(e[:-1] == v for e in g.edges)


def test_even_shift_membership_and_language():
    even = EvenShift()
    assert even.contains(Point.parse("0|1"))
    assert even.contains(Point.parse("0|1001"))
    assert not even.contains(Point.parse("0|101"))
    assert not even.contains(Point.parse("01"))
    assert even.suffix_language(3) == {w for w in even_language(3)}
    assert (1, 0, 1) not in even.suffix_language(3)
    assert not is_declared_finite_type(even)
    assert is_declared_finite_type(GOLDEN)


def test_symbol_rule_reduction():
    s = SymbolRule(frozenset({0, 2}), frozenset({(2, 2)}))
    assert s.other == 1
    assert s.reduce(0) == 0 and s.reduce(2) == 1 and s.reduce(7) == 2
    assert s.contains(Point.parse("02"))
    assert not s.contains(Point.parse("0|22"))
    assert not s.contains(Point.parse("0|5"))
    assert s.suffix_language(2, horizon=9) == {(0, 0), (0, 2), (2, 0)}
    assert suffix_language_sizes(s, 3, 9) == [2, 3, 5]


def test_disjoint_families_layout():
    fam = DisjointFamilies(((0, 1), (0,)))
    # R = 3: generator 0 uses 2 letters, generator 1 one letter
    assert fam.block_base(0, 1) == 1 and fam.block_base(1, 1) == 3
    assert fam.block_base(0, 2) == 4
    assert fam.forbidden_word(0, 2) == (4, 5, 4, 5)
    assert fam.forbidden_word(1, 3) == (9, 9, 9)
    assert fam.word_for(5) == (4, 5, 4, 5)
    assert fam.word_for(0) is None
    assert fam.contains(Point.parse("0|45"))
    assert not fam.contains(Point.parse("0|4545"))
    assert not fam.contains(Point.parse("45"))
    assert fam.contains(Point.parse("0|5454"))
    assert fam.in_suffix_language((5, 4, 5))


def test_spec_parser_presentations():
    sf = parse_spec("# golden\nalphabet finite 2\nforbidden 11\n")
    assert sf.spec == GOLDEN and sf.weights == ("uniform",)
    assert isinstance(parse_spec("alphabet finite 2\nbuiltin even").spec, EvenShift)
    sf = parse_spec("alphabet countable\nallow 0 1\nforbidden 11\nweights geometric 1/3")
    assert sf.spec == SymbolRule(frozenset({0, 1}), frozenset({(1, 1)}))
    assert sf.weights == ("geometric", Fraction(1, 3))
    sf = parse_spec("alphabet countable\nfamily 01 0")
    assert sf.spec == DisjointFamilies(((0, 1), (0,)))
    assert sf.weights == ("geometric", Fraction(1, 2))


@pytest.mark.parametrize(
    "text, line",
    [
        ("alphabet finite 2\nforbiden 11", 2),
        ("forbidden 11", 1),
        ("alphabet finite 2\nforbidden 11\nforbidden 00", 3),
        ("alphabet finite 2\nweights geometric 3/2", 2),
        ("alphabet finite 2\nallow 0", 2),
        ("alphabet finite 2\nforbidden 2", 2),
        ("alphabet countable\nweights uniform\nallow 0", 3),
    ],
)
def test_spec_parser_errors_carry_line_numbers(text, line):
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert info.value.line == line


def test_parse_fraction():
    assert parse_fraction("1/4") == Fraction(1, 4)
    with pytest.raises(ValueError):
        parse_fraction("0.25")


def test_random_specs_language_matches_brute_force():
    rng = random.Random(11)
    for _ in range(25):
        n, f = random_forbidden(rng)
        spec = normalize(FiniteForbidden(n, f))
        for k in range(1, 7):
            assert spec.suffix_language(k) == sft_language(n, f, k), (n, f, k)
        assert suffix_language_sizes(spec, 6) == [len(sft_language(n, f, k)) for k in range(1, 7)]


forbidden_lists = st.frozensets(st.lists(st.integers(0, 2), min_size=1, max_size=3).map(tuple), max_size=3)


@settings(max_examples=60, deadline=None)
@given(forbidden_lists, st.integers(1, 6))
def test_suffix_language_is_factorial_and_extendable(forbidden, n):
    try:
        spec = normalize(FiniteForbidden(3, forbidden))
    except EmptySubshift:
        return
    longer = spec.suffix_language(n + 1)
    words = spec.suffix_language(n)
    assert {w[1:] for w in longer} == words  # every word extends to the left
    assert {w[:-1] for w in longer} == words  # K = shift(K): every word extends to the right
    assert all(admissible(w, forbidden) for w in words)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=4).map(tuple),
       st.lists(st.integers(0, 1), max_size=6).map(tuple))
def test_even_shift_points_match_run_parity(period, transient):
    x = Point(period, transient)
    spelled = x.period * (12 // len(x.period) + 2) + x.transient
    expected = even_ok(spelled) and (1 not in x.period or even_ok(x.period * 3))
    assert EvenShift().contains(x) == expected
