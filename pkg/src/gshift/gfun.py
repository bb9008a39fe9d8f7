"""Continuous g-functions that leave a subshift invariant, and their checks.

Two constructions are provided.  :func:`build_krieger` uses the reciprocal of
the depth ``n(x)`` at which the cylinder around ``x`` clears the exit closure;
it needs a finite alphabet.  :func:`build_weighted` works for countable
alphabets too: inside each block class that meets the exit closure, every
non-escape symbol gets ``weight * distance-to-exit`` and the escape symbol takes
the remaining mass; outside those classes ``g`` is just the weight.

All values are exact fractions.  Sums over a countable alphabet are truncated
at a symbol horizon and carried as enclosures whose width is the weight tail.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .core import Point, Word, enumerate_points, format_word
from .exitset import (
    Disjoint,
    Meets,
    Unknown,
    UndeterminedDepth,
    WitnessTable,
    closure_meets_k,
    exit_points,
    in_exit_closure,
    search_alphabet,
    tracker,
)
from .subshift import DisjointFamilies, EvenShift, FiniteForbidden, SymbolRule, INF


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, v) -> "Interval":
        v = Fraction(v)
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class Weights:
    """Positive weights summing to one: uniform on ``n`` symbols, or
    ``(1-q) q^a`` on the non-negative integers."""

    kind: str
    n: int | None = None
    q: Fraction | None = None

    @classmethod
    def uniform(cls, n: int) -> "Weights":
        return cls("uniform", n=n)

    @classmethod
    def geometric(cls, q) -> "Weights":
        q = Fraction(q)
        if not 0 < q < 1:
            raise ValueError("ratio must lie in (0, 1)")
        return cls("geometric", q=q)

    @classmethod
    def for_spec(cls, spec, declared=None) -> "Weights":
        if declared is not None and declared[0] == "geometric":
            return cls.geometric(declared[1])
        if spec.alphabet_size is None:
            return cls.geometric(Fraction(1, 2))
        return cls.uniform(spec.alphabet_size)

    def __call__(self, a: int) -> Fraction:
        if self.kind == "uniform":
            return Fraction(1, self.n) if 0 <= a < self.n else Fraction(0)
        return (1 - self.q) * self.q ** a

    def tail(self, horizon: int) -> Fraction:
        """Total weight of the symbols above ``horizon``."""
        if self.kind == "uniform":
            return Fraction(max(0, self.n - 1 - horizon), self.n)
        return self.q ** (horizon + 1)

    def horizon_for(self, eps: Fraction, at_least: int = 0) -> int:
        if self.kind == "uniform":
            return self.n - 1
        return max(at_least, _geometric_horizon(self.q, eps))

    def describe(self) -> str:
        return f"uniform({self.n})" if self.kind == "uniform" else f"geometric({self.q})"


@lru_cache(maxsize=None)
def _geometric_horizon(q: Fraction, eps: Fraction) -> int:
    h = 0
    while q ** (h + 1) > eps:
        h += 1
    return h


@dataclass(frozen=True)
class GCertificate:
    """Escape symbols per class of ``m``-block witnesses.

    A class is the ``(m-1)``-prefix shared by the witness words ``w`` of one
    set ``U(w)``; ``escape[p] = b`` means ``p.b`` is not a witness.  ``default``
    (when set) is an escape valid for every prefix at once.
    """

    m: int
    classes: dict = field(default_factory=dict)
    default: int | None = None

    def escape(self, prefix: Word) -> int | None:
        return self.classes.get(prefix, self.default)

    def describe(self) -> str:
        parts = [f"{format_word(p) or '()'}->{b}" for p, b in sorted(self.classes.items())]
        if self.default is not None:
            parts.append(f"*->{self.default}")
        return f"m={self.m} " + (" ".join(parts) if parts else "(no classes)")


@dataclass(frozen=True)
class Refuted:
    witness: Point


def _witness_classes(spec, table: WitnessTable, m: int):
    """Prefixes of the length-``m`` witnesses, or None when there are infinitely many."""
    if isinstance(spec, DisjointFamilies):
        return None
    prefixes = set()
    for w in table._reduced(m):
        prefixes.update(spec.expand_word(w[:-1]))
    return prefixes


def certify_property_g(spec, table: WitnessTable, m_max: int = 8, horizon: int = 32):
    """First depth ``m >= 2`` at which every witness class has an escape symbol
    ``b <= horizon``; smallest ``b`` per class."""
    symbols = spec.symbols(horizon if spec.countable else None)
    top = min(m_max, table.depth)
    for m in range(2, top + 1):
        if isinstance(spec, DisjointFamilies):
            # 0 lies in no forbidden word, so p.0 is never a witness
            assert table.lookup((1,) * (m - 1) + (0,)) is False
            return GCertificate(m, {}, default=0)
        classes = _witness_classes(spec, table, m)
        escapes = {}
        for p in sorted(classes):
            for b in symbols:
                if table.lookup(p + (b,)) is False:
                    escapes[p] = b
                    break
            else:
                break
        else:
            return GCertificate(m, escapes)
    alphabet = search_alphabet(spec, horizon)
    if not isinstance(spec, DisjointFamilies):
        # finite alphabets and the symmetric countable class are fully covered
        for x in enumerate_points(alphabet, 6):
            tr = tracker(spec, x)
            if all(tr.exit_depth(a) == INF for a in alphabet):
                return Refuted(x)
    return Unknown(table.depth)


# ---------------------------------------------------------------------------
# g-functions
# ---------------------------------------------------------------------------


class GFunction:
    """Base class; subclasses define :meth:`_successors`.

    ``successors(x)`` gives enclosures of ``g(x.a)`` for the listed symbols and
    an exact bound on ``sum g(x.a)`` over the unlisted ones.
    """

    kind = "g"

    def __init__(self, spec, weights: Weights | None = None):
        self.spec = spec
        self.weights = weights or Weights.for_spec(spec)
        self._cache: dict = {}

    def symbols_for(self, eps: Fraction, at_least: int = 0) -> list[int]:
        if self.spec.alphabet_size is not None:
            return list(range(self.spec.alphabet_size))
        return list(range(self.weights.horizon_for(eps, at_least) + 1))

    def successors(self, x: Point, eps=Fraction(1, 1 << 20)):
        return self.successors_of(tracker(self.spec, x), Fraction(eps))

    def successors_of(self, tr, eps: Fraction):
        key = self._key(tr, eps)
        if key is not None:
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        out = self._successors(tr, eps)
        if key is not None:
            self._cache[key] = out
        return out

    def _key(self, tr, eps):
        return None

    def eval(self, x: Point, eps=Fraction(1, 1 << 20)) -> Interval:
        values, _ = self.successors(x.shift(), eps)
        for a, v in values:
            if a == x.last:
                return v
        # beyond the horizon: refine until the symbol is listed
        values, _ = self.successors_of(tracker(self.spec, x.shift()), self._eps_listing(x.last, eps))
        return dict(values)[x.last]

    def _eps_listing(self, a: int, eps: Fraction) -> Fraction:
        e = eps
        while self.weights.horizon_for(e) < a:
            e /= 2
        return e


def _profile(spec, tr, count: int = 0):
    """Exit depths of ``x.a`` per automaton label (per symbol below ``count`` for
    disjoint families); together with the escape they fix every successor value."""
    if isinstance(spec, DisjointFamilies):
        return tr.exit_depths(count)
    return tr.exit_depths()


class KriegerG(GFunction):
    """``g(x) = (1/n(x)) / sum_a 1/n(x^{*,a})`` with ``1/inf = 0``."""

    kind = "krieger"

    def __init__(self, spec, table: WitnessTable):
        if spec.alphabet_size is None:
            raise ValueError("the reciprocal construction needs a finite alphabet")
        super().__init__(spec)
        self.table = table

    def _key(self, tr, eps):
        return _profile(self.spec, tr)

    def _successors(self, tr, eps):
        recips = []
        for a in range(self.spec.alphabet_size):
            k = tr.exit_depth(a)
            recips.append(Fraction(0) if k == INF else Fraction(1, max(1, k)))
        total = sum(recips)
        if total == 0:
            raise UndeterminedDepth("every successor lies in the exit closure")
        return [(a, Interval.exact(r / total)) for a, r in enumerate(recips)], Fraction(0)


class WeightedG(GFunction):
    kind = "weighted"

    def __init__(self, spec, cert: GCertificate, weights: Weights | None = None):
        super().__init__(spec, weights)
        self.cert = cert

    def escape_for(self, tr) -> int | None:
        m = self.cert.m
        return self.cert.escape(tr.suffix(m - 1) if m > 1 else ())

    def _key(self, tr, eps):
        m = self.cert.m
        prefix = tr.suffix(m - 1) if m > 1 else ()
        if isinstance(self.spec, DisjointFamilies):
            b = self.escape_for(tr)
            count = len(self.symbols_for(eps, at_least=b or 0))
            return (b, _profile(self.spec, tr, count), eps)
        return (prefix, _profile(self.spec, tr), eps if self.spec.countable else None)

    def _successors(self, tr, eps):
        lam = self.weights
        b = self.escape_for(tr)
        symbols = self.symbols_for(eps, at_least=b or 0)
        tail = lam.tail(symbols[-1])
        if b is None:
            return [(a, Interval.exact(lam(a))) for a in symbols], tail
        out = []
        spent = Fraction(0)
        for a in symbols:
            if a == b:
                continue
            v = lam(a) * tr.distance(a)
            spent += v
            out.append((a, Interval.exact(v)))
        # unlisted symbols contribute weight * distance, with distance <= 1
        out.append((b, Interval(1 - spent - tail, 1 - spent)))
        out.sort(key=lambda t: t[0])
        return out, tail

    def lower_bound(self, x: Point) -> Fraction:
        """Positive lower bound for ``g(x)`` off the exit closure."""
        tr = tracker(self.spec, x.shift())
        b = self.escape_for(tr)
        a = x.last
        if b is None:
            return self.weights(a)
        if a == b:
            return self.weights(b)
        return self.weights(a) * tr.distance(a)

    def symmetric_value(self, x: Point) -> Fraction:
        """Exact ``g(x)`` for a :class:`SymbolRule`, summing the disallowed
        symbols in closed form (they all sit at the same distance)."""
        spec = self.spec
        if not isinstance(spec, SymbolRule) or self.weights.kind != "geometric":
            raise TypeError("closed form needs a SymbolRule with geometric weights")
        tr = tracker(spec, x.shift())
        b = self.escape_for(tr)
        a0 = x.last
        lam = self.weights
        if b is None:
            return lam(a0)
        if a0 != b:
            return lam(a0) * tr.distance(a0)
        allowed_mass = sum(lam(s) for s in spec.allowed)
        other_mass = 1 - allowed_mass  # geometric series identity
        spent = sum(lam(s) * tr.distance(s) for s in spec.allowed if s != b)
        spent += tr.distance(spec.other) * (other_mass - (lam(b) if b not in spec.allowed else 0))
        return 1 - spent


class BaselineG(GFunction):
    """``g(x) = weight(x_0)``; invariant only for the full shift."""

    kind = "baseline"

    def _key(self, tr, eps):
        return ("baseline", eps)

    def _successors(self, tr, eps):
        symbols = self.symbols_for(eps)
        return [(a, Interval.exact(self.weights(a))) for a in symbols], self.weights.tail(symbols[-1])


def build_krieger(spec, table: WitnessTable) -> KriegerG:
    return KriegerG(spec, table)


def build_weighted(spec, cert: GCertificate, weights: Weights | None = None) -> WeightedG:
    return WeightedG(spec, cert, weights)


def eval_g(g: GFunction, x: Point, eps=Fraction(1, 1 << 20)) -> Interval:
    return g.eval(x, Fraction(eps))


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    point: Point | None
    lo: Fraction | None
    hi: Fraction | None
    ok: bool

    def tsv(self) -> str:
        pt = self.point.spec_string() if self.point is not None else "-"
        lo = "-" if self.lo is None else str(self.lo)
        hi = "-" if self.hi is None else str(self.hi)
        return f"check\t{self.name}\t{pt}\t{lo}\t{hi}\t{'pass' if self.ok else 'fail'}"


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, *args) -> None:
        self.checks.append(Check(*args))

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        return self

    def tsv(self) -> str:
        return "".join(c.tsv() + "\n" for c in self.checks)


def verify_sum_one(g: GFunction, x: Point, eps=Fraction(1, 1 << 20), horizon: int | None = None) -> Report:
    eps = Fraction(eps)
    tr = tracker(g.spec, x)
    inner = eps / 2
    values, tail = g.successors_of(tr, inner)
    total = Interval(sum(v.lo for _, v in values), sum(v.hi for _, v in values) + tail)
    report = Report()
    report.add("sum_one", x, total.lo, total.hi, 1 in total and total.width <= eps)
    return report


def verify_invariance(g: GFunction, spec, table: WitnessTable | None = None, sample: int = 50) -> Report:
    report = Report()
    for x in exit_points(spec, sample, horizon=8):
        v = g.eval(x)
        report.add("invariance", x, v.lo, v.hi, v.lo == 0 and v.hi == 0)
    return report


def sample_points(spec, count: int, max_size: int = 7) -> list[Point]:
    alphabet = search_alphabet(spec)
    out = []
    for x in enumerate_points(alphabet, max_size):
        out.append(x)
        if len(out) >= count:
            break
    return out


def verify_strict(g: GFunction, spec, table: WitnessTable | None = None, samples: int = 200) -> Report:
    """Zero exactly on the exit closure; above the positive lower bound elsewhere."""
    report = Report()
    pts = sample_points(spec, samples) + exit_points(spec, 10, horizon=8)
    for x in pts:
        v = g.eval(x)
        if in_exit_closure(spec, x):
            report.add("strict_zero", x, v.lo, v.hi, v.lo == 0 and v.hi == 0)
        else:
            # the reciprocal construction is exact, so its value is its own bound
            bound = g.lower_bound(x) if isinstance(g, WeightedG) else v.lo
            report.add("strict_positive", x, v.lo, v.hi, bound > 0 and v.lo >= bound)
    return report


@dataclass(frozen=True)
class Holds:
    gap: Fraction


@dataclass(frozen=True)
class FailsAt:
    point: Point


@dataclass(frozen=True)
class NotApplicable:
    witness: Point


def verify_strictly_positive(g: GFunction, spec, table: WitnessTable, samples: int = 200):
    verdict = closure_meets_k(spec, table)
    if isinstance(verdict, Meets):
        return NotApplicable(verdict.witness)
    for x in sample_points(spec, samples):
        if spec.contains(x) and g.eval(x).hi == 0:
            return FailsAt(x)
    if isinstance(verdict, Disjoint):
        return Holds(verdict.gap)
    return verdict
