"""The Markov process that appends one symbol per step with probabilities ``g``.

Uniform draws are 64-bit integers ``k`` from numpy's PCG64, read as the exact
rational ``k / 2**64``; the symbol is chosen by comparing against exact
cumulative sums (or enclosures, refined until the draw is separated from them).
A symbol with ``g = 0`` owns an empty slice of ``[0, 1)`` and is never drawn.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import Point
from .exitset import UndeterminedDepth, tracker
from .gfun import GFunction

RNG_ALGORITHM = "PCG64"
SCALE = 1 << 64
MIN_EPS = Fraction(1, 1 << 256)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def draw(rng: np.random.Generator) -> int:
    return int(rng.bit_generator.random_raw())


def _cuts(values) -> list[tuple[int, int, int]]:
    """``(symbol, low cut, high cut)`` in units of ``2**-64``.

    ``k`` certainly lies below the cumulative sum through a symbol iff
    ``k < low cut`` and certainly above the sum before it iff ``k >= high cut``
    of the previous entry (``ceil`` keeps the integer tests exact).
    """
    out = []
    lo = hi = Fraction(0)
    for a, v in values:
        lo, hi = lo + v.lo, hi + v.hi
        out.append((a, -((-lo * SCALE) // 1), -((-hi * SCALE) // 1)))
    return out


_CUTS: dict = {}


def _choose(values, k: int, complete: bool = False):
    """Symbol whose slice holds ``k / 2**64``, or None if an enclosure straddles it.

    ``complete`` says the listed symbols carry all the mass, so the last slice
    ends exactly at one whatever its enclosure says.
    """
    key = id(values)
    hit = _CUTS.get(key)
    if hit is None or hit[0] is not values:
        if len(_CUTS) > 4096:
            _CUTS.clear()
        hit = _CUTS[key] = (values, _cuts(values))
    cuts = hit[1]
    prev_hi = 0
    for i, (a, lo_cut, hi_cut) in enumerate(cuts):
        if k < lo_cut or (complete and i == len(cuts) - 1):
            return a if k >= prev_hi else None
        prev_hi = hi_cut
    return None


def step(g: GFunction, tr, rng: np.random.Generator, eps=Fraction(1, 1 << 20)) -> int:
    """Draw the next symbol after the point held by ``tr`` and append it."""
    k = draw(rng)
    if not isinstance(eps, Fraction):
        eps = Fraction(eps)
    while True:
        values, tail = g.successors_of(tr, eps)
        a = _choose(values, k, complete=tail == 0)
        if a is not None:
            tr.push(a)
            return a
        eps /= 2
        if eps < MIN_EPS:
            raise UndeterminedDepth("draw not separated from the enclosures")


@dataclass
class Trajectory:
    initial: Point
    symbols: list = field(default_factory=list)
    in_k: bytearray = field(default_factory=bytearray)
    seed: int = 0
    first_exit: int | None = None

    def point(self, t: int) -> Point:
        return self.initial.extend(self.symbols[:t])

    def dump(self) -> str:
        return "".join(f"{t} {a} {k}\n" for t, (a, k) in enumerate(zip(self.symbols, self.in_k), start=1))


def run(g: GFunction, spec, x0: Point, steps: int, seed: int = 0, eps=Fraction(1, 1 << 20)) -> Trajectory:
    if not spec.contains(x0):
        raise ValueError("initial point must lie in K")
    rng = make_rng(seed)
    eps = Fraction(eps)
    tr = tracker(spec, x0)
    traj = Trajectory(x0, seed=seed)
    inside = True
    for t in range(1, steps + 1):
        prev = inside
        a = step(g, tr, rng, eps)
        inside = tr.in_k
        traj.symbols.append(a)
        traj.in_k.append(1 if inside else 0)
        if prev and not inside and traj.first_exit is None:
            traj.first_exit = t
    return traj


@dataclass
class InvarianceReport:
    runs: int
    steps: int
    exits: int
    histogram: dict
    seeds: list

    @property
    def invariant(self) -> bool:
        return self.exits == 0

    def summary(self) -> str:
        verdict = "Invariant" if self.invariant else "NotInvariant"
        hist = " ".join(f"{t}:{c}" for t, c in sorted(self.histogram.items()))
        return f"{verdict} runs={self.runs} steps={self.steps} exits={self.exits}" + (f" first_exit_times={hist}" if hist else "")


def run_seeds(seed: int, runs: int) -> list[int]:
    """Per-run seeds spawned deterministically from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(runs)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def empirical_invariance(g: GFunction, spec, x0: Point, steps: int, runs: int, seed: int = 0,
                         keep=None) -> InvarianceReport:
    seeds = run_seeds(seed, runs)
    hist: Counter = Counter()
    exits = 0
    for i, s in enumerate(seeds):
        traj = run(g, spec, x0, steps, s)
        if keep is not None:
            keep(i, traj)
        if traj.first_exit is not None:
            exits += 1
            hist[traj.first_exit] += 1
    return InvarianceReport(runs, steps, exits, dict(hist), seeds)
