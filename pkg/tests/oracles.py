"""Brute-force reference answers, written without the package's automata.

Every routine here works on explicit words: admissibility is a substring scan,
left-extendability is a fixpoint over blocks, and exit words are read off the
last symbol appended to an admissible word.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product


def admissible(word, forbidden) -> bool:
    w = tuple(word)
    return not any(
        w[i:i + len(f)] == f for f in forbidden for i in range(len(w) - len(f) + 1)
    )


def essential_blocks(n_alph, forbidden, width):
    """Admissible ``width``-blocks lying inside some bi-infinite admissible word.

    Points of the subshift satisfy ``K = shift(K)``, so every finite piece must
    extend without end to the left and, through preimages, to the right.
    """
    blocks = {b for b in product(range(n_alph), repeat=width) if admissible(b, forbidden)}
    while True:
        keep = {
            b for b in blocks
            if any(admissible((a,) + b, forbidden) and ((a,) + b)[:width] in blocks for a in range(n_alph))
            and any(admissible(b + (a,), forbidden) and (b + (a,))[1:] in blocks for a in range(n_alph))
        }
        if keep == blocks:
            return blocks
        blocks = keep


def sft_language(n_alph, forbidden, n):
    """All length-``n`` words that end some point of the subshift."""
    width = max([len(f) for f in forbidden] + [1])
    blocks = essential_blocks(n_alph, forbidden, width)
    out = set()

    def grow(w):
        if len(w) >= n:
            out.add(w[len(w) - n:])
            return
        for a in range(n_alph):
            v = w + (a,)
            if v[-width:] in blocks:
                grow(v)

    for b in blocks:
        grow(b)
    return out


@lru_cache(maxsize=None)
def _sft_exit_tails(n_alph, forbidden, depth):
    width = max([len(f) for f in forbidden] + [1])
    blocks = essential_blocks(n_alph, forbidden, width)
    tails = set()
    for v in sft_language(n_alph, forbidden, max(depth, width)):
        for a in range(n_alph):
            w = v + (a,)
            if w[len(w) - width:] not in blocks:
                tails.add(w[len(w) - depth - 1:])
    return frozenset(tails)


def sft_exit_words(n_alph, forbidden, m, depth=12):
    """Length-``m`` suffixes of exit points, from words ``v.a`` with ``|v| = depth``.

    ``y.a`` leaves the subshift exactly when its final block is not essential:
    either ``a`` completes a forbidden word or it leads into a dead end.
    """
    assert m <= depth + 1
    return {w[len(w) - m:] for w in _sft_exit_tails(n_alph, frozenset(forbidden), depth)}


def even_ok(word) -> bool:
    """Every run of 0s squeezed between two 1s has even length."""
    ones = [i for i, s in enumerate(word) if s == 1]
    return all((j - i - 1) % 2 == 0 for i, j in zip(ones, ones[1:]))


def even_words(n):
    """``(word, zeros since the last 1 or None)`` for every length-``n`` word
    passing :func:`even_ok`."""
    layer = [((), None)]
    for _ in range(n):
        nxt = []
        for w, run in layer:
            nxt.append((w + (0,), None if run is None else run + 1))
            if run is None or run % 2 == 0:
                nxt.append((w + (1,), 0))
        layer = nxt
    return layer


def even_language(n):
    return {w for w, _ in even_words(n)}


def even_exit_words(m, depth=20):
    """Exit points of the even shift end ``1 0^k 1`` with ``k`` odd, or ``0^k 1``
    with an unbounded run of 0s to the left of a window of odd-tail length."""
    out = set()
    for v, run in even_words(depth):
        # all-zero windows come from ...1 0^k with k odd and k > depth
        if run is None or run % 2 == 1:
            out.add((v + (1,))[depth + 1 - m:])
    return out


def exit_depth_from_words(word_sets, x):
    """Largest ``m`` with ``x.suffix(m)`` in ``word_sets[m]``; 0 if none."""
    k = 0
    for m in sorted(word_sets):
        if x.suffix(m) in word_sets[m]:
            k = m
        else:
            break
    return k


def random_forbidden(rng: random.Random, max_alph=3, max_len=4):
    """A random forbidden list whose subshift is nonempty (checked by brute force)."""
    while True:
        n = rng.randint(1, max_alph) if max_alph > 1 else 1
        n = max(n, 2) if rng.random() < 0.8 else n
        count = rng.randint(0, 3)
        words = set()
        for _ in range(count):
            length = rng.randint(1, max_len)
            words.add(tuple(rng.randrange(n) for _ in range(length)))
        words = frozenset(words)
        width = max([len(f) for f in words] + [1])
        if essential_blocks(n, words, width):
            return n, words
