"""Subshift specifications, membership oracles and suffix languages.

Four shapes of subshift are supported:

* :class:`FiniteForbidden` -- ``X_F`` for a finite list ``F`` over a finite alphabet;
* :class:`EvenShift` -- the binary even shift (a sofic, non-finite-type shift);
* :class:`SymbolRule` -- a countable alphabet where only a finite set of symbols
  is allowed, optionally with a finite forbidden overlay on those symbols;
* :class:`DisjointFamilies` -- a countable alphabet with infinitely many forbidden
  words of unbounded length, no two of which share a symbol.

The first three are compiled to a deterministic labeled graph
(:class:`Automaton`).  ``K`` is the set of labels of left-infinite paths in that
graph after trimming to its essential part, which makes ``K`` the largest
subshift (``K = shift(K)``) inside ``X_F``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
import math
from typing import Iterator, Sequence

from .core import Point, Word, format_word, parse_word, symbol_at

INF = math.inf


class EmptySubshift(ValueError):
    """The specification defines the empty set."""


class SpecParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def has_factor(word: Sequence[int], factor: Sequence[int]) -> bool:
    n, k = len(word), len(factor)
    return any(tuple(word[i:i + k]) == tuple(factor) for i in range(n - k + 1))


def reduce_forbidden(forbidden) -> frozenset[Word]:
    """Drop every word that contains another forbidden word as a factor."""
    words = sorted(set(forbidden), key=lambda w: (len(w), w))
    kept: list[Word] = []
    for w in words:
        if not any(has_factor(w, v) for v in kept):
            kept.append(w)
    return frozenset(kept)


# ---------------------------------------------------------------------------
# Labeled graphs over bitmask state sets
# ---------------------------------------------------------------------------


class Automaton:
    """Deterministic labeled graph; sets of states are int bitmasks.

    ``delta[s][a]`` is the target of the ``a``-edge out of ``s`` or -1.
    """

    def __init__(self, n_symbols: int, delta: Sequence[Sequence[int]], labels=None):
        self.n_symbols = n_symbols
        self.delta = tuple(tuple(row) for row in delta)
        self.n_states = len(self.delta)
        self.full = (1 << self.n_states) - 1
        self.labels = labels
        self._step: dict[tuple[int, int], int] = {}

    def step(self, mask: int, a: int) -> int:
        key = (mask, a)
        out = self._step.get(key)
        if out is None:
            out = 0
            if 0 <= a < self.n_symbols:
                s, m = 0, mask
                while m:
                    if m & 1:
                        t = self.delta[s][a]
                        if t >= 0:
                            out |= 1 << t
                    m >>= 1
                    s += 1
            self._step[key] = out
        return out

    def read(self, mask: int, word: Sequence[int]) -> int:
        for a in word:
            if not mask:
                return 0
            mask = self.step(mask, a)
        return mask

    def enabled(self, a: int) -> int:
        """States with an outgoing ``a``-edge."""
        return sum(1 << s for s in range(self.n_states) if 0 <= a < self.n_symbols and self.delta[s][a] >= 0)

    def tail_states(self, period: Sequence[int]) -> int:
        """States ending a left-infinite path labeled ``...PPP``."""
        mask = self.full
        while True:
            nxt = self.read(mask, period)
            if nxt == mask:
                return mask
            mask = nxt

    def point_states(self, period: Sequence[int], transient: Sequence[int]) -> int:
        return self.read(self.tail_states(period), transient)

    @cached_property
    def reach(self) -> tuple[int, ...]:
        """All nonempty ``read(full, z)`` over words ``z`` (including the empty word)."""
        seen = {self.full}
        order = [self.full]
        i = 0
        while i < len(order):
            m = order[i]
            i += 1
            for a in range(self.n_symbols):
                t = self.step(m, a)
                if t and t not in seen:
                    seen.add(t)
                    order.append(t)
        return tuple(sorted(order))

    def words(self, n: int, mask: int | None = None) -> Iterator[Word]:
        """Words of length ``n`` labeling some path from ``mask``."""
        start = self.full if mask is None else mask

        def rec(m, prefix):
            if len(prefix) == n:
                yield tuple(prefix)
                return
            for a in range(self.n_symbols):
                t = self.step(m, a)
                if t:
                    prefix.append(a)
                    yield from rec(t, prefix)
                    prefix.pop()

        yield from rec(start, [])


@dataclass(frozen=True)
class TransitionGraph:
    """Essential ``M``-block presentation: vertices are ``(M-1)``-blocks, edges ``M``-blocks."""

    memory: int
    vertices: frozenset[Word]
    edges: frozenset[Word]

    def successors(self, v: Word) -> list[Word]:
        return sorted(e[1:] for e in self.edges if e[:-1] == v)


def _prune(vertices: set[Word], edges: set[Word]) -> tuple[set[Word], set[Word]]:
    while True:
        has_out = {e[:-1] for e in edges}
        has_in = {e[1:] for e in edges}
        keep = vertices & has_out & has_in
        new_edges = {e for e in edges if e[:-1] in keep and e[1:] in keep}
        if keep == vertices and new_edges == edges:
            return vertices, edges
        vertices, edges = keep, new_edges


# ---------------------------------------------------------------------------
# Specifications
# ---------------------------------------------------------------------------


class _AutomatonShift:
    """Shared behaviour of the specs that compile to an :class:`Automaton`.

    Subclasses provide ``automaton`` and the symbol maps ``reduce``/``expand``
    between real symbols and the automaton's label indices.
    """

    countable = False

    def reduce(self, a: int) -> int:
        return a

    def expand(self, i: int, horizon: int | None = None) -> list[int]:
        return [i]

    def reduce_word(self, w: Sequence[int]) -> Word:
        return tuple(self.reduce(a) for a in w)

    def expand_word(self, w: Sequence[int], horizon: int | None = None) -> Iterator[Word]:
        for combo in product(*(self.expand(i, horizon) for i in w)):
            yield tuple(combo)

    def symbols(self, horizon: int | None = None) -> list[int]:
        return list(range(self.alphabet_size))

    def state_mask(self, period: Sequence[int], transient: Sequence[int]) -> int:
        aut = self.automaton
        return aut.point_states(self.reduce_word(period), self.reduce_word(transient))

    def contains(self, x: Point) -> bool:
        return self.state_mask(x.period, x.transient) != 0

    def in_suffix_language(self, w: Sequence[int]) -> bool:
        return self.automaton.read(self.automaton.full, self.reduce_word(w)) != 0

    def suffix_language(self, n: int, horizon: int | None = None) -> set[Word]:
        if n < 1:
            raise ValueError("n must be positive")
        out: set[Word] = set()
        for w in self.automaton.words(n):
            out.update(self.expand_word(w, horizon))
        return out


@dataclass(frozen=True)
class FiniteForbidden(_AutomatonShift):
    """``X_F`` over ``{0, ..., n-1}`` for a finite forbidden list ``F``."""

    n: int
    forbidden: frozenset[Word] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("alphabet must be nonempty")
        object.__setattr__(self, "forbidden", frozenset(tuple(w) for w in self.forbidden))
        for w in self.forbidden:
            if not w:
                raise ValueError("forbidden words must be nonempty")
            if any(not 0 <= s < self.n for s in w):
                raise ValueError(f"forbidden word {format_word(w)} leaves the alphabet")

    @property
    def alphabet_size(self) -> int:
        return self.n

    @property
    def memory(self) -> int:
        return max((len(w) for w in self.forbidden), default=1)

    def factor_admissible(self, w: Sequence[int]) -> bool:
        if any(not 0 <= s < self.n for s in w):
            return False
        return not any(has_factor(w, f) for f in self.forbidden)

    @cached_property
    def graph(self) -> TransitionGraph:
        m = self.memory
        alphabet = range(self.n)
        vertices = {v for v in product(alphabet, repeat=m - 1) if self.factor_admissible(v)}
        edges = {e for e in product(alphabet, repeat=m) if self.factor_admissible(e)}
        vertices, edges = _prune(vertices, edges)
        if not vertices:
            raise EmptySubshift("no bi-extendable blocks survive")
        return TransitionGraph(m, frozenset(vertices), frozenset(edges))

    @cached_property
    def automaton(self) -> Automaton:
        g = self.graph
        states = sorted(g.vertices)
        index = {v: i for i, v in enumerate(states)}
        delta = [[-1] * self.n for _ in states]
        for e in g.edges:
            delta[index[e[:-1]]][e[-1]] = index[e[1:]]
        return Automaton(self.n, delta, labels=states)


@dataclass(frozen=True)
class EvenShift(_AutomatonShift):
    """Binary sequences with an even number of 0s between any two 1s."""

    # follower-set states: no 1 seen yet / even run since the last 1 / odd run
    FREE, EVEN, ODD = 0, 1, 2

    @property
    def alphabet_size(self) -> int:
        return 2

    def factor_admissible(self, w: Sequence[int]) -> bool:
        if any(s not in (0, 1) for s in w):
            return False
        ones = [i for i, s in enumerate(w) if s == 1]
        return all((j - i - 1) % 2 == 0 for i, j in zip(ones, ones[1:]))

    @cached_property
    def automaton(self) -> Automaton:
        delta = [
            [self.FREE, self.EVEN],
            [self.ODD, self.EVEN],
            [self.EVEN, -1],
        ]
        return Automaton(2, delta, labels=("free", "even", "odd"))


@dataclass(frozen=True)
class SymbolRule(_AutomatonShift):
    """Countable alphabet; only the finite set ``allowed`` may appear, subject to
    an optional finite forbidden ``overlay`` over those symbols.

    Every disallowed symbol behaves identically, so the automaton carries a
    single extra label standing for all of them.
    """

    allowed: frozenset[int]
    overlay: frozenset[Word] = field(default_factory=frozenset)
    countable = True

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))
        object.__setattr__(self, "overlay", frozenset(tuple(w) for w in self.overlay))
        if not self.allowed:
            raise EmptySubshift("no symbols are allowed")
        for w in self.overlay:
            if not w or any(s not in self.allowed for s in w):
                raise ValueError(f"overlay word {format_word(w)} uses a disallowed symbol")

    alphabet_size = None

    @cached_property
    def _order(self) -> tuple[int, ...]:
        return tuple(sorted(self.allowed))

    @cached_property
    def other(self) -> int:
        """Smallest disallowed symbol; represents the whole disallowed class."""
        s = 0
        while s in self.allowed:
            s += 1
        return s

    @cached_property
    def _index(self) -> dict[int, int]:
        return {a: i for i, a in enumerate(self._order)}

    def reduce(self, a: int) -> int:
        return self._index.get(a, len(self._order))

    def expand(self, i: int, horizon: int | None = None) -> list[int]:
        if i < len(self._order):
            return [self._order[i]]
        if horizon is None:
            return [self.other]
        return [s for s in range(horizon + 1) if s not in self.allowed]

    def symbols(self, horizon: int | None = None) -> list[int]:
        if horizon is None:
            return sorted(self.allowed | {self.other})
        return list(range(horizon + 1))

    def factor_admissible(self, w: Sequence[int]) -> bool:
        if any(s not in self.allowed for s in w):
            return False
        return not any(has_factor(w, f) for f in self.overlay)

    @cached_property
    def reduced(self) -> FiniteForbidden:
        k = len(self._order)
        over = {self.reduce_word(w) for w in self.overlay} | {(k,)}
        return FiniteForbidden(k + 1, frozenset(over))

    @property
    def memory(self) -> int:
        return self.reduced.memory

    @property
    def automaton(self) -> Automaton:
        return self.reduced.automaton


@dataclass(frozen=True)
class DisjointFamilies:
    """Countable alphabet with forbidden words ``g_j`` repeated ``i`` times,
    ``i = 1, 2, ...``, each copy relabeled onto its own block of fresh symbols.

    Symbol 0 lies in no forbidden word.  Block ``(j, i)`` starts at
    ``1 + (i - 1) * R + r_0 + ... + r_{j-1}`` where ``r_j`` is the number of
    letters of generator ``j`` and ``R`` their sum.
    """

    generators: tuple[Word, ...]
    countable = True
    alphabet_size = None

    def __post_init__(self):
        gens = tuple(tuple(g) for g in self.generators)
        if not gens or any(not g for g in gens):
            raise ValueError("need at least one nonempty generator")
        object.__setattr__(self, "generators", gens)

    @cached_property
    def _widths(self) -> tuple[int, ...]:
        return tuple(max(g) + 1 for g in self.generators)

    def block_base(self, j: int, i: int) -> int:
        return 1 + (i - 1) * sum(self._widths) + sum(self._widths[:j])

    def forbidden_word(self, j: int, i: int) -> Word:
        base = self.block_base(j, i)
        return tuple(base + c for c in self.generators[j]) * i

    def word_for(self, s: int) -> Word | None:
        """The unique forbidden word using symbol ``s``, if any."""
        if s < 1:
            return None
        total = sum(self._widths)
        i, off = divmod(s - 1, total)
        for j, w in enumerate(self._widths):
            if off < w:
                if off not in self.generators[j]:
                    return None
                return self.forbidden_word(j, i + 1)
            off -= w
        raise AssertionError

    def symbols(self, horizon: int | None = None) -> list[int]:
        if horizon is None:
            raise ValueError("countable alphabet needs a symbol horizon")
        return list(range(horizon + 1))

    def forbidden_upto(self, horizon: int) -> set[Word]:
        out = set()
        for s in range(1, horizon + 1):
            f = self.word_for(s)
            if f is not None and max(f) <= horizon:
                out.add(f)
        return out

    def factor_admissible(self, w: Sequence[int]) -> bool:
        w = tuple(w)
        for k, s in enumerate(w):
            f = self.word_for(s)
            if f is not None and s == f[0] and w[k:k + len(f)] == f:
                return False
        return True

    in_suffix_language = factor_admissible  # 0^inf w lies in K iff w is admissible

    def contains(self, x: Point) -> bool:
        return self.longest_admissible_suffix(x.period, x.transient) == INF

    def longest_admissible_suffix(self, period: Sequence[int], transient: Sequence[int]) -> float:
        """Length of the longest admissible suffix; ``inf`` for points of ``K``."""
        longest = max((len(f) for f in map(self.word_for, set(period) | set(transient)) if f), default=0)
        window = len(transient) + longest + 2 * len(period)
        syms = [symbol_at(period, transient, -j) for j in range(window - 1, -1, -1)]
        best = INF
        for k in range(window):
            f = self.word_for(syms[k])
            if f is not None and syms[k] == f[0] and tuple(syms[k:k + len(f)]) == f:
                # an occurrence starting at k excludes every suffix reaching k
                best = window - k - 1
        if best == INF:
            return INF
        # occurrences inside the periodic part repeat, so any hit is final
        return best

    def suffix_language(self, n: int, horizon: int | None = None) -> set[Word]:
        if horizon is None:
            raise ValueError("countable alphabet needs a symbol horizon")
        out = set()

        def rec(prefix):
            if len(prefix) == n:
                out.add(tuple(prefix))
                return
            for s in range(horizon + 1):
                prefix.append(s)
                if self.factor_admissible(prefix):
                    rec(prefix)
                prefix.pop()

        rec([])
        return out


Spec = FiniteForbidden | EvenShift | SymbolRule | DisjointFamilies


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def normalize(spec):
    """Reduce forbidden lists so no word contains another; reject empty ``K``."""
    if isinstance(spec, FiniteForbidden):
        out = FiniteForbidden(spec.n, reduce_forbidden(spec.forbidden))
        out.graph  # raises EmptySubshift
        return out
    if isinstance(spec, SymbolRule):
        out = SymbolRule(spec.allowed, reduce_forbidden(spec.overlay))
        out.reduced.graph
        return out
    return spec


def factor_admissible(spec, w: Sequence[int]) -> bool:
    return spec.factor_admissible(w)


def contains(spec, x: Point) -> bool:
    return spec.contains(x)


def essential_graph(spec: FiniteForbidden) -> TransitionGraph:
    if not isinstance(spec, FiniteForbidden):
        raise TypeError("essential graphs are built for finite forbidden lists only")
    return normalize(spec).graph


def suffix_language(spec, n: int, horizon: int | None = None) -> set[Word]:
    return spec.suffix_language(n, horizon)


def suffix_language_sizes(spec, n_max: int, horizon: int | None = None) -> list[int]:
    """``|L_n(K)|`` for ``n = 1 .. n_max``, counting symbols up to ``horizon``.

    Automaton presentations are counted by dynamic programming over state sets,
    so large depths stay cheap; the disjoint-family class is enumerated.
    """
    if isinstance(spec, DisjointFamilies):
        return [len(spec.suffix_language(n, horizon)) for n in range(1, n_max + 1)]
    aut = spec.automaton
    mult = [len(spec.expand(i, horizon)) for i in range(aut.n_symbols)]
    layer = {aut.full: 1}
    sizes = []
    for _ in range(n_max):
        nxt: dict[int, int] = {}
        for mask, c in layer.items():
            for a in range(aut.n_symbols):
                t = aut.step(mask, a)
                if t and mult[a]:
                    nxt[t] = nxt.get(t, 0) + c * mult[a]
        layer = nxt
        sizes.append(sum(layer.values()))
    return sizes


def is_declared_finite_type(spec) -> bool:
    return isinstance(spec, FiniteForbidden)


# ---------------------------------------------------------------------------
# Spec files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecFile:
    spec: object
    weights: tuple  # ("uniform",) or ("geometric", Fraction)


def parse_spec(text: str) -> SpecFile:
    lines = [
        (i, ln.strip())
        for i, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise SpecParseError("empty spec file")
    lineno, first = lines[0]
    head = first.split()
    if head[:1] != ["alphabet"] or len(head) < 2:
        raise SpecParseError("first directive must be 'alphabet'", lineno)
    if head[1] == "finite" and len(head) == 3:
        try:
            n = int(head[2])
        except ValueError:
            raise SpecParseError(f"bad alphabet size {head[2]!r}", lineno) from None
        countable = False
    elif head[1] == "countable" and len(head) == 2:
        n, countable = None, True
    else:
        raise SpecParseError("expected 'alphabet finite <n>' or 'alphabet countable'", lineno)

    forbidden = None
    allow = None
    families = None
    builtin = None
    weights = None
    for lineno, ln in lines[1:]:
        tok = ln.split()
        cmd, args = tok[0], tok[1:]
        try:
            if cmd == "forbidden" and forbidden is None:
                forbidden = [parse_word(a) for a in args]
            elif cmd == "builtin" and builtin is None:
                if args != ["even"]:
                    raise SpecParseError("only 'builtin even' is known", lineno)
                builtin = "even"
            elif cmd == "allow" and allow is None:
                if not countable:
                    raise SpecParseError("'allow' needs a countable alphabet", lineno)
                allow = [int(a) for a in args]
            elif cmd == "family" and families is None:
                if not countable:
                    raise SpecParseError("'family' needs a countable alphabet", lineno)
                families = [parse_word(a) for a in args]
            elif cmd == "weights" and weights is None:
                if args == ["uniform"]:
                    weights = ("uniform",)
                elif len(args) == 2 and args[0] == "geometric":
                    q = parse_fraction(args[1])
                    if not 0 < q < 1:
                        raise SpecParseError("geometric ratio must lie in (0,1)", lineno)
                    weights = ("geometric", q)
                else:
                    raise SpecParseError(f"bad weights {' '.join(args)!r}", lineno)
            else:
                raise SpecParseError(f"unknown or repeated directive {cmd!r}", lineno)
        except ValueError as e:
            if isinstance(e, SpecParseError):
                raise
            raise SpecParseError(str(e), lineno) from None

    last = lines[-1][0]
    try:
        if builtin == "even":
            if countable or n != 2 or forbidden or allow or families:
                raise SpecParseError("'builtin even' needs 'alphabet finite 2' and nothing else", last)
            spec = EvenShift()
        elif countable:
            if allow is not None and families is None:
                spec = SymbolRule(frozenset(allow), frozenset(forbidden or ()))
            elif families is not None and allow is None and forbidden is None:
                spec = DisjointFamilies(tuple(families))
            else:
                raise SpecParseError("countable specs need 'allow' (optionally with 'forbidden') or 'family'", last)
        else:
            if allow is not None or families is not None:
                raise SpecParseError("'allow'/'family' need a countable alphabet", last)
            spec = FiniteForbidden(n, frozenset(forbidden or ()))
        spec = normalize(spec)
    except EmptySubshift:
        raise
    except ValueError as e:
        if isinstance(e, SpecParseError):
            raise
        raise SpecParseError(str(e), last) from None
    if weights is None:
        weights = ("geometric", Fraction(1, 2)) if countable else ("uniform",)
    elif weights[0] == "uniform" and countable:
        raise SpecParseError("uniform weights need a finite alphabet", last)
    return SpecFile(spec, weights)


def parse_fraction(text: str) -> Fraction:
    if "/" not in text:
        raise ValueError(f"expected p/q, got {text!r}")
    p, q = text.split("/", 1)
    return Fraction(int(p), int(q))


def load_spec(path) -> SpecFile:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
