"""Symbols, words and eventually periodic points of the one-sided sequence space.

A point ``x = (..., x_{-2}, x_{-1}, x_0)`` is stored as a periodic block that
repeats forever to the left, followed by a finite transient whose last entry
sits at position 0.  Words are plain tuples of non-negative integers, with the
last entry at position 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

Word = tuple[int, ...]


def parse_word(text: str) -> Word:
    """Parse ``"0110"`` or, when symbols reach 10, ``"1.12.3"``."""
    text = text.strip()
    if not text:
        raise ValueError("empty word")
    parts = text.split(".") if "." in text else list(text)
    try:
        word = tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"bad word {text!r}") from None
    if any(s < 0 for s in word):
        raise ValueError(f"bad word {text!r}")
    return word


def format_word(word: Sequence[int]) -> str:
    if any(s >= 10 for s in word):
        return ".".join(str(s) for s in word)
    return "".join(str(s) for s in word)


def word_replace_last(w: Word, a: int) -> Word:
    if not w:
        raise ValueError("word must be nonempty")
    return w[:-1] + (a,)


def primitive_root(block: Word) -> Word:
    n = len(block)
    for d in range(1, n + 1):
        if n % d == 0 and block[:d] * (n // d) == block:
            return block[:d]
    return block


def canonical_form(period: Sequence[int], transient: Sequence[int] = ()) -> tuple[Word, Word]:
    """Reduce the period to its primitive root and absorb transient symbols
    that merely continue the periodic tail."""
    period = primitive_root(tuple(period))
    transient = tuple(transient)
    if not period:
        raise ValueError("period must be nonempty")
    # the symbol following ...PP is P[0]; absorbing it rotates the period left
    i = 0
    p = period
    while i < len(transient) and transient[i] == p[0]:
        p = p[1:] + p[:1]
        i += 1
    return p, transient[i:]


def symbol_at(period: Sequence[int], transient: Sequence[int], j: int) -> int:
    """Symbol at position ``j <= 0``."""
    k = -j
    nt = len(transient)
    if k < nt:
        return transient[nt - 1 - k]
    k -= nt
    return period[len(period) - 1 - (k % len(period))]


def suffix_of(period: Sequence[int], transient: Sequence[int], n: int) -> Word:
    """The length-``n`` word at positions ``-n+1 .. 0``."""
    if n <= len(transient):
        return tuple(transient[len(transient) - n:])
    return tuple(symbol_at(period, transient, j) for j in range(-n + 1, 1))


@dataclass(frozen=True)
class Point:
    """Eventually periodic left-infinite sequence, always held in canonical form."""

    period: Word
    transient: Word = ()

    def __post_init__(self):
        p, t = canonical_form(self.period, self.transient)
        object.__setattr__(self, "period", p)
        object.__setattr__(self, "transient", t)

    @classmethod
    def parse(cls, text: str) -> "Point":
        """``"01"`` is the point ``...0101``; ``"0|1"`` is ``...0001``."""
        if "|" in text:
            p, t = text.split("|", 1)
            return cls(parse_word(p), parse_word(t) if t.strip() else ())
        return cls(parse_word(text))

    def __str__(self) -> str:
        t = format_word(self.transient) if self.transient else ""
        return f"({format_word(self.period)})^inf{'.' + t if t else ''}"

    def spec_string(self) -> str:
        """Inverse of :meth:`parse`."""
        if self.transient:
            return f"{format_word(self.period)}|{format_word(self.transient)}"
        return format_word(self.period)

    def __getitem__(self, j: int) -> int:
        if j > 0:
            raise IndexError("positions are non-positive")
        return symbol_at(self.period, self.transient, j)

    @property
    def last(self) -> int:
        return self[0]

    def suffix(self, n: int) -> Word:
        if n < 1:
            raise ValueError("n must be positive")
        return suffix_of(self.period, self.transient, n)

    def symbols(self) -> frozenset[int]:
        return frozenset(self.period) | frozenset(self.transient)

    def append(self, a: int) -> "Point":
        return Point(self.period, self.transient + (a,))

    def extend(self, word: Iterable[int]) -> "Point":
        return Point(self.period, self.transient + tuple(word))

    def shift(self) -> "Point":
        if self.transient:
            return Point(self.period, self.transient[:-1])
        # drop the final copy's last symbol: ...PP P[:-1]
        return Point(self.period, self.period[:-1])

    def replace_last(self, a: int) -> "Point":
        return self.shift().append(a)


def canonicalize(x: Point) -> Point:
    # Point construction already canonicalizes; kept as an explicit operation.
    return Point(x.period, x.transient)


def point_suffix(x: Point, n: int) -> Word:
    return x.suffix(n)


def append(x: Point, a: int) -> Point:
    return x.append(a)


def shift(x: Point) -> Point:
    return x.shift()


def replace_last(x: Point, a: int) -> Point:
    return x.replace_last(a)


def first_mismatch(x: Point, y: Point) -> int | None:
    """``min{|j| : x_j != y_j}``, or None when the points are equal."""
    if x == y:
        return None
    bound = max(len(x.transient), len(y.transient)) + lcm(len(x.period), len(y.period))
    for l in range(bound + 1):
        if x[-l] != y[-l]:
            return l
    raise AssertionError("distinct canonical points must differ within the bound")


def dyadic(k: int) -> Fraction:
    return Fraction(1, 1 << k)


def metric(x: Point, y: Point) -> Fraction:
    l = first_mismatch(x, y)
    return Fraction(0) if l is None else dyadic(l)


def enumerate_points(alphabet: Sequence[int], max_size: int):
    """Canonical eventually periodic points ordered by ``|period| + |transient|``,
    then period length, then lexicographically.  Each point appears once."""
    from itertools import product

    seen = set()
    for size in range(1, max_size + 1):
        for plen in range(1, size + 1):
            tlen = size - plen
            for p in product(alphabet, repeat=plen):
                if primitive_root(p) != p:
                    continue
                for t in product(alphabet, repeat=tlen):
                    if canonical_form(p, t) != (p, t):
                        continue
                    x = Point(p, t)
                    if x not in seen:
                        seen.add(x)
                        yield x
