"""Words in a free group F_n.

A word is a tuple of nonzero ints: ``i`` is the i-th generator (1-based) and
``-i`` its inverse. All functions return freely reduced tuples.
"""

from __future__ import annotations

import re
import string
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import BadWord, ParseError

FreeWord = tuple

DEFAULT_LABELS = tuple(string.ascii_lowercase)


def letter_key(x: int):
    """Order a < A < b < B < ..."""
    return (abs(x), x < 0)


def word_key(w: Sequence[int]):
    return tuple(letter_key(x) for x in w)


def reduce_word(w: Sequence[int]) -> FreeWord:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(*words: Sequence[int]) -> FreeWord:
    return reduce_word([x for w in words for x in w])


def inverse(w: Sequence[int]) -> FreeWord:
    return tuple(-x for x in reversed(w))


def power(w: Sequence[int], n: int) -> FreeWord:
    base = tuple(w) if n >= 0 else inverse(w)
    return reduce_word(base * abs(n))


def conjugate(w: Sequence[int], u: Sequence[int]) -> FreeWord:
    """u w u^-1."""
    return multiply(u, w, inverse(u))


def cyclic_reduce(w: Sequence[int]) -> FreeWord:
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return reduce_word(w) == tuple(w) and (len(w) < 2 or w[0] != -w[-1])


def canonical_cyclic(w: Sequence[int]) -> FreeWord:
    """Representative of the conjugacy class of w or w^-1.

    The lexicographically least rotation (under ``letter_key``) among the
    rotations of the cyclic reduction of w and of its inverse.
    """
    c = cyclic_reduce(w)
    if not c:
        return c
    best = None
    for v in (c, inverse(c)):
        for k in range(len(v)):
            r = v[k:] + v[:k]
            if best is None or word_key(r) < word_key(best):
                best = r
    return best


def check_rank(w: Sequence[int], rank: int) -> FreeWord:
    for x in w:
        if not isinstance(x, int) or x == 0 or abs(x) > rank:
            raise BadWord(f"letter {x!r} is not a generator of F_{rank}")
    return tuple(w)


def substitute(w: Sequence[int], images: Sequence[Sequence[int]]) -> FreeWord:
    """Image of w under the morphism sending generator i to images[i-1]."""
    out: list[int] = []
    for x in w:
        piece = images[x - 1] if x > 0 else inverse(images[-x - 1])
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*?)(?:\^(-?\d+))?$")


def parse_word(text: str, labels: Sequence[str] = DEFAULT_LABELS) -> FreeWord:
    """Parse ``"a b A"``, ``"x1 x2^-1"``, ``"abA"`` or ``"1"`` (identity).

    A capitalised label denotes the inverse generator when the capitalised
    form is not itself a label.
    """
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    tokens = text.replace("*", " ").replace(".", " ").split()
    if len(tokens) == 1 and tokens[0] not in index and "^" not in tokens[0]:
        # run-together single-letter labels such as "abA"
        if all(ch in index or ch.lower() in index for ch in tokens[0]):
            tokens = list(tokens[0])
    out: list[int] = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise ParseError(f"bad token {tok!r} in word {text!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name in index:
            letter = index[name]
        elif name.lower() in index and name != name.lower():
            letter = -index[name.lower()]
        else:
            raise BadWord(f"unknown generator {name!r} in word {text!r}")
        out.extend([letter if exp > 0 else -letter] * abs(exp))
    return reduce_word(out)


def format_word(w: Sequence[int], labels: Sequence[str] = DEFAULT_LABELS) -> str:
    if not w:
        return "1"
    parts = []
    for x in w:
        lab = labels[abs(x) - 1]
        if x > 0:
            parts.append(lab)
        elif len(lab) == 1 and lab.upper() not in labels:
            parts.append(lab.upper())
        else:
            parts.append(f"{lab}^-1")
    return " ".join(parts)


def ball(rank: int, max_length: int, conjugacy: bool = False) -> Iterator[FreeWord]:
    """Nonidentity reduced words of length <= max_length, in shortlex order.

    With ``conjugacy=True`` only the ``canonical_cyclic`` representative of
    each conjugacy class (up to inversion) is produced.
    """
    if rank < 1 or max_length < 1:
        raise ValueError("rank and max_length must be positive")
    if conjugacy:
        yield from _class_reps(rank, max_length)
        return
    letters = sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)
    layer = [()]
    for _ in range(max_length):
        layer = [w + (x,) for w in layer for x in letters if not w or w[-1] != -x]
        yield from layer


@lru_cache(maxsize=16)
def _class_reps(rank: int, max_length: int) -> tuple:
    # Letters are coded 0..2n-1 in letter_key order; code c and c ^ 1 are inverse.
    letters = sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)], key=letter_key)
    out = []
    for length in range(1, max_length + 1):
        found = []
        stack = [(c,) for c in range(2 * rank)]
        while stack:
            w = stack.pop()
            k = len(w)
            if k == length:
                if k >= 2 and w[0] == w[-1] ^ 1:
                    continue
                inv = tuple(c ^ 1 for c in reversed(w))
                if all(w <= w[i:] + w[:i] for i in range(1, k)) and all(
                    w <= inv[i:] + inv[:i] for i in range(k)
                ):
                    found.append(w)
                continue
            for c in range(2 * rank):
                if c == w[-1] ^ 1:
                    continue
                v = w + (c,)
                # a rotation starting inside v that already beats v's prefix rules v out
                if all(v[i:] >= v[: k + 1 - i] for i in range(1, k + 1)):
                    stack.append(v)
        found.sort()
        out.extend(tuple(letters[c] for c in w) for w in found)
    return tuple(out)
