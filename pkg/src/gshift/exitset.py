"""Exit points, witness words and distances to the exit set.

An exit point is ``x`` outside ``K`` with ``shift(x)`` in ``K``.  A word ``w`` of
length ``m`` is an exit witness when its cylinder meets the closure of the exit
set; since cylinders are open this happens exactly when ``w`` is the
length-``m`` suffix of an exit point.  Witness words are suffix-closed, so for
any point the witnessed suffix lengths form an initial segment ``1..k`` and the
distance to the exit set is ``2**-k`` (zero when ``k`` is unbounded).

For automaton-backed specs the witness language is recognized by a forward
automaton whose states are tuples ``read(Z, v)`` over the reachable state sets
``Z``; ``v.a`` is a witness iff some coordinate is nonempty and dies on ``a``.
:class:`ExitTracker` follows every suffix of a growing point through that
automaton at once, which gives exit depths for all one-symbol extensions and
decides closure membership for eventually periodic points exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import math
from typing import Sequence

from .core import Point, Word, dyadic, enumerate_points, format_word, suffix_of
from .subshift import DisjointFamilies, FiniteForbidden, SymbolRule, INF

EXACT = "exact"
DEPTH_BOUNDED = "depth-bounded"


class UndeterminedDepth(RuntimeError):
    """An answer lies beyond the probe depth and no certificate settles it."""

    def __init__(self, message: str, partial=None, undetermined=None):
        super().__init__(message)
        self.partial = partial
        self.undetermined = undetermined


# ---------------------------------------------------------------------------
# Witness language for automaton-backed specs
# ---------------------------------------------------------------------------


class ExitLanguage:
    def __init__(self, spec):
        self.spec = spec
        self.aut = spec.automaton
        self.sets = self.aut.reach
        self.init = tuple(self.sets)
        self._step: dict = {}
        self._acc: dict = {}

    def step(self, st: tuple, b: int) -> tuple:
        key = (st, b)
        out = self._step.get(key)
        if out is None:
            out = tuple(self.aut.step(d, b) if d else 0 for d in st)
            self._step[key] = out
        return out

    @staticmethod
    def alive(st: tuple) -> bool:
        return any(st)

    def accepted(self, st: tuple) -> frozenset[int]:
        """Reduced symbols ``a`` with ``v.a`` a witness, ``v`` leading to ``st``."""
        out = self._acc.get(st)
        if out is None:
            aut = self.aut
            out = frozenset(
                a for a in range(aut.n_symbols)
                if any(d and not aut.step(d, a) for d in st)
            )
            self._acc[st] = out
        return out

    def is_witness(self, word: Sequence[int]) -> bool:
        """``word`` (in reduced symbols) is an exit witness."""
        st = self.init
        for b in word[:-1]:
            st = self.step(st, b)
            if not self.alive(st):
                return False
        return word[-1] in self.accepted(st)

    def witnesses(self, m: int) -> set[Word]:
        out = set()

        def rec(st, prefix):
            if len(prefix) == m - 1:
                for a in self.accepted(st):
                    out.add(tuple(prefix) + (a,))
                return
            for b in range(self.aut.n_symbols):
                nxt = self.step(st, b)
                if self.alive(nxt):
                    prefix.append(b)
                    rec(nxt, prefix)
                    prefix.pop()

        rec(self.init, [])
        return out

    def read_period(self, states: dict, period: Sequence[int]) -> dict:
        out: dict = {}
        for st, ln in states.items():
            for b in period:
                st = self.step(st, b)
                if not self.alive(st):
                    break
            else:
                ln = ln + len(period)
                if out.get(st, -1) < ln:
                    out[st] = ln
        return out


def exit_language(spec) -> ExitLanguage:
    lang = _LANGS.get(spec)
    if lang is None:
        lang = _LANGS[spec] = ExitLanguage(spec)
    return lang


_LANGS: dict = {}


class ExitTracker:
    """Exit depths of ``x.a`` for every symbol ``a``, maintained as ``x`` grows.

    ``entries`` maps each forward state to the longest suffix of ``x`` reaching
    it; suffixes starting arbitrarily deep in the periodic tail get length inf.
    """

    def __init__(self, spec, period: Sequence[int], transient: Sequence[int] = ()):
        self.spec = spec
        self.lang = exit_language(spec)
        self.period = tuple(period)
        self.history = list(transient)
        rp = spec.reduce_word(self.period)
        self._mask = spec.automaton.tail_states(rp)
        self.entries = self._tail_entries(rp)
        self._depths = None
        for b in transient:
            self._advance(b)

    def _tail_entries(self, rp: Word) -> dict:
        lang = self.lang
        init = lang.init

        def suffixes_of_period() -> dict:
            out = {init: 0}
            for k in range(1, len(rp) + 1):
                st = init
                for b in rp[len(rp) - k:]:
                    st = lang.step(st, b)
                    if not lang.alive(st):
                        break
                else:
                    out[st] = max(out.get(st, -1), k)
            return out

        base = suffixes_of_period()
        # A_k: states of suffixes of P^k; increasing to A_inf
        reached = set(base)
        while True:
            grown = reached | set(lang.read_period({s: 0 for s in reached}, rp))
            if grown == reached:
                break
            reached = grown
        # B_j = P-image^j(A_inf) decreases to the states of arbitrarily deep suffixes
        deep, rounds = reached, 0
        while True:
            nxt = set(lang.read_period({s: 0 for s in deep}, rp))
            if nxt == deep:
                break
            deep, rounds = nxt, rounds + 1
        # everything outside `deep` comes from suffixes shorter than rounds+1 periods
        entries = {init: 0}
        for _ in range(rounds + 1):
            moved = lang.read_period(entries, rp)
            entries = dict(base)
            for st, ln in moved.items():
                if entries.get(st, -1) < ln:
                    entries[st] = ln
        for st in deep:
            entries[st] = INF
        return entries

    def _advance(self, b: int) -> None:
        r = self.spec.reduce(b)
        step = self.lang.step
        new = {self.lang.init: 0}
        for st, ln in self.entries.items():
            nxt = step(st, r)
            if any(nxt) and new.get(nxt, -1) <= ln:
                new[nxt] = ln + 1
        self.entries = new
        self._depths = None
        self._mask = self.spec.automaton.step(self._mask, r) if self._mask else 0

    def push(self, b: int) -> None:
        self.history.append(b)
        self._advance(b)

    @property
    def in_k(self) -> bool:
        return self._mask != 0

    def extends(self, a: int) -> bool:
        """``x.a`` lies in ``K``."""
        return bool(self._mask) and self.spec.automaton.step(self._mask, self.spec.reduce(a)) != 0

    def exit_depths(self) -> tuple:
        """Exit depth of ``x.a`` for every automaton label ``a``, in label order."""
        if self._depths is None:
            best = [0] * self.lang.aut.n_symbols
            accepted = self.lang.accepted
            for st, ln in self.entries.items():
                for r in accepted(st):
                    if ln >= best[r]:
                        best[r] = ln + 1
            self._depths = tuple(best)
        return self._depths

    def exit_depth(self, a: int) -> float:
        return self.exit_depths()[self.spec.reduce(a)]

    def distance(self, a: int) -> Fraction:
        k = self.exit_depth(a)
        return Fraction(0) if k == INF else dyadic(k)

    def suffix(self, n: int) -> Word:
        return suffix_of(self.period, self.history, n)


class FamilyTracker:
    """:class:`ExitTracker` counterpart for :class:`DisjointFamilies`.

    Here the closure of the exit set is the exit set itself: ``x.a`` is within
    distance zero only when the word of ``a`` ends ``x.a`` and ``x`` is in ``K``.
    """

    def __init__(self, spec: DisjointFamilies, period: Sequence[int], transient: Sequence[int] = ()):
        self.spec = spec
        self.period = tuple(period)
        self.history = list(transient)
        self.admissible = spec.longest_admissible_suffix(self.period, self.history)
        self._depths = None

    def _ends_with(self, word: Sequence[int], extra: int | None = None) -> int:
        """Length of the longest suffix of ``word`` matching the end of ``x.extra``."""
        n = 0
        j = 0
        if extra is not None:
            if word[-1] != extra:
                return 0
            n, j = 1, 0
        else:
            j = 0
        while n < len(word):
            if word[len(word) - 1 - n] != self._at(-j):
                break
            n += 1
            j += 1
        return n

    def _at(self, j: int) -> int:
        k = -j
        h = self.history
        if k < len(h):
            return h[len(h) - 1 - k]
        k -= len(h)
        p = self.period
        return p[len(p) - 1 - (k % len(p))]

    def push(self, b: int) -> None:
        f = self.spec.word_for(b)
        self.history.append(b)
        if f is not None and self._ends_with(f) == len(f):
            self.admissible = min(self.admissible + 1, len(f) - 1)
        else:
            self.admissible = self.admissible + 1

    @property
    def in_k(self) -> bool:
        return self.admissible == INF

    def extends(self, a: int) -> bool:
        if not self.in_k:
            return False
        f = self.spec.word_for(a)
        return f is None or self._ends_with(f, a) < len(f)

    def exit_depth(self, a: int) -> float:
        f = self.spec.word_for(a)
        if f is None:
            return 0
        matched = self._ends_with(f, a)
        if matched < len(f):
            return matched
        return max(len(f), self.admissible + 1)

    def distance(self, a: int) -> Fraction:
        k = self.exit_depth(a)
        return Fraction(0) if k == INF else dyadic(k)

    def exit_depths(self, count: int) -> tuple:
        """Exit depths of ``x.a`` for ``a < count``."""
        key = (len(self.history), count)
        if self._depths is None or self._depths[0] != key:
            self._depths = (key, tuple(self.exit_depth(a) for a in range(count)))
        return self._depths[1]

    def suffix(self, n: int) -> Word:
        return suffix_of(self.period, self.history, n)


def tracker(spec, x: Point | None = None, period=None, transient=()):
    if x is not None:
        period, transient = x.period, x.transient
    if isinstance(spec, DisjointFamilies):
        return FamilyTracker(spec, period, transient)
    return ExitTracker(spec, period, transient)


# ---------------------------------------------------------------------------
# Witness tables
# ---------------------------------------------------------------------------


@dataclass
class WitnessTable:
    """Per-depth exit-witness words up to ``depth``, enumerated lazily.

    Automaton-backed specs store words over the automaton's labels (every
    disallowed symbol of a :class:`SymbolRule` shares one label), so lookups are
    exact for any symbol.  :class:`DisjointFamilies` tables hold real words
    with symbols up to ``horizon``.
    """

    spec: object
    depth: int
    horizon: int = 32
    _cache: dict = field(default_factory=dict, repr=False)

    def _reduced(self, m: int) -> frozenset[Word]:
        if m not in self._cache:
            spec = self.spec
            if isinstance(spec, DisjointFamilies):
                self._cache[m] = frozenset(_family_witnesses(spec, m, self.horizon))
            else:
                self._cache[m] = frozenset(exit_language(spec).witnesses(m))
        return self._cache[m]

    def words(self, m: int) -> set[Word]:
        """``W_m`` in real symbols (disallowed symbols expanded up to ``horizon``)."""
        if not 1 <= m <= self.depth:
            raise ValueError(f"depth {m} outside 1..{self.depth}")
        ws = self._reduced(m)
        if isinstance(self.spec, DisjointFamilies):
            return set(ws)
        out = set()
        for w in ws:
            out.update(self.spec.expand_word(w, self.horizon if self.spec.countable else None))
        return out

    def lookup(self, word: Sequence[int]) -> bool | None:
        m = len(word)
        if not 1 <= m <= self.depth:
            return None
        if isinstance(self.spec, DisjointFamilies):
            if max(word) > self.horizon:
                return None
            return _is_family_witness(self.spec, tuple(word), self.horizon)
        return self.spec.reduce_word(word) in self._reduced(m)

    def status(self, m: int) -> str:
        spec = self.spec
        if isinstance(spec, FiniteForbidden) and self.depth >= m + len(spec.graph.vertices):
            return EXACT
        return DEPTH_BOUNDED

    def dump(self) -> str:
        lines = ["m\tword\tstatus"]
        for m in range(1, self.depth + 1):
            st = self.status(m)
            for w in sorted(self.words(m)):
                lines.append(f"{m}\t{format_word(w)}\t{st}")
        return "\n".join(lines) + "\n"


def _family_witnesses(spec: DisjointFamilies, m: int, horizon: int) -> set[Word]:
    out = set()
    for a in range(1, horizon + 1):
        f = spec.word_for(a)
        if f is None or f[-1] != a or max(f) > horizon:
            continue
        if m < len(f):
            out.add(f[len(f) - m:])
            continue
        # f ends the word and everything before it is admissible
        for pre in spec.suffix_language(m - len(f), horizon) if m > len(f) else [()]:
            w = pre + f
            if spec.factor_admissible(w[:-1]):
                out.add(w)
    return out


def _is_family_witness(spec: DisjointFamilies, w: Word, horizon: int) -> bool:
    """Membership in ``_family_witnesses(spec, len(w), horizon)`` without enumerating it."""
    f = spec.word_for(w[-1])
    if f is None or f[-1] != w[-1] or max(f) > horizon:
        return False
    if len(w) < len(f):
        return f[len(f) - len(w):] == w
    # every factor-admissible word is a suffix of a point of K
    return w[len(w) - len(f):] == f and spec.factor_admissible(w[:-1])


def build_table(spec, depth: int = 16, horizon: int = 32) -> WitnessTable:
    return WitnessTable(spec, depth, horizon)


def exit_witnesses(spec, m: int, depth: int, horizon: int = 32) -> tuple[set[Word], str]:
    if m > depth:
        raise ValueError("m must not exceed the probe depth")
    table = WitnessTable(spec, depth, horizon)
    return table.words(m), table.status(m)


# ---------------------------------------------------------------------------
# Distances, n(x) and the one-step extension sets
# ---------------------------------------------------------------------------


def exit_depth(spec, x: Point) -> float:
    """``max{m : suffix(x, m) is a witness}``; inf on the closure of the exit set."""
    return tracker(spec, x.shift()).exit_depth(x.last)


def distance_to_exit(spec, x: Point, table: WitnessTable | None = None) -> Fraction:
    k = exit_depth(spec, x)
    return Fraction(0) if k == INF else dyadic(k)


def in_exit_closure(spec, x: Point) -> bool:
    return exit_depth(spec, x) == INF


def n_of_x(spec, x: Point, table: WitnessTable | None = None) -> float:
    """Smallest ``n >= 1`` with ``C(x_[-n,0])`` missing the closure of the exit set."""
    k = exit_depth(spec, x)
    return INF if k == INF else max(1, k)


def delta_plus(spec, x: Point, table: WitnessTable, horizon: int | None = None) -> frozenset[int]:
    """Symbols ``a`` escaping the exit closure after ``x``, read off the witness table.

    ``a`` is included once some ``x_[-n,0] a`` (``n < depth``) is not a witness
    word.  Raises :class:`UndeterminedDepth` when some symbol never escapes
    within the table's depth.
    """
    symbols = spec.symbols(horizon if spec.countable else None)
    # finite type: past the memory, x.a stays witnessed for every longer suffix
    # as long as x itself lies in K
    settled = (
        isinstance(spec, (FiniteForbidden, SymbolRule))
        and table.depth > spec.memory
        and spec.contains(x)
    )
    members, open_ = set(), set()
    for a in symbols:
        for n in range(1, table.depth):
            w = x.suffix(n) + (a,)
            hit = table.lookup(w)
            if hit is None:
                break
            if not hit:
                members.add(a)
                break
        else:
            if not settled:
                open_.add(a)
            continue
        if a not in members:
            open_.add(a)
    if open_:
        raise UndeterminedDepth(
            f"{len(open_)} symbols undecided at depth {table.depth}",
            partial=frozenset(members),
            undetermined=frozenset(open_),
        )
    return frozenset(members)


# ---------------------------------------------------------------------------
# Topological verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Disjoint:
    """``K`` misses the closure of the exit set.

    ``depth`` is the smallest ``M`` with no witness of length ``M`` occurring
    as a suffix of a point of ``K``; ``gap = 2**-(M-1)`` is then the exact
    distance between ``K`` and the exit set, and ``bound = 2**-M`` the cruder
    estimate in terms of ``M`` alone.  ``depth`` is None for structural
    certificates, where the gap may be zero.
    """

    depth: int | None
    gap: Fraction

    @property
    def bound(self) -> Fraction | None:
        return None if self.depth is None else dyadic(self.depth)


@dataclass(frozen=True)
class Meets:
    witness: Point


@dataclass(frozen=True)
class Unknown:
    depth: int


@dataclass(frozen=True)
class Closed:
    pass


@dataclass(frozen=True)
class NotClosed:
    witness: Point


def search_alphabet(spec, horizon: int | None = None) -> list[int]:
    if isinstance(spec, SymbolRule):
        return sorted(spec.allowed | {spec.other})
    if isinstance(spec, DisjointFamilies):
        return list(range(min(horizon or 4, 4) + 1))
    return list(range(spec.alphabet_size))


def closure_meets_k(spec, table: WitnessTable, search_size: int = 6):
    if isinstance(spec, DisjointFamilies):
        # no two forbidden words share a symbol: the exit set is closed
        return Disjoint(None, Fraction(0))
    for m in range(1, table.depth + 1):
        ws = table._reduced(m)
        if not any(spec.automaton.read(spec.automaton.full, w) for w in ws):
            return Disjoint(m, dyadic(m - 1))
    for x in enumerate_points(search_alphabet(spec), search_size):
        if spec.contains(x) and in_exit_closure(spec, x):
            return Meets(x)
    return Unknown(table.depth)


def exit_set_closed(spec, table: WitnessTable, search_size: int = 6):
    verdict = closure_meets_k(spec, table, search_size)
    if isinstance(verdict, Disjoint):
        return Closed()
    if isinstance(verdict, Meets):
        return NotClosed(verdict.witness)
    return verdict


def exit_points(spec, count: int, max_size: int = 8, horizon: int | None = None) -> list[Point]:
    """First ``count`` eventually periodic exit points in enumeration order."""
    alphabet = search_alphabet(spec, horizon)
    if isinstance(spec, DisjointFamilies):
        alphabet = list(range((horizon or 4) + 1))
    out = []
    for y in enumerate_points(alphabet, max_size):
        if not spec.contains(y):
            continue
        for a in alphabet:
            x = y.append(a)
            if not spec.contains(x) and x not in out:
                out.append(x)
                if len(out) >= count:
                    return out
    return out
