"""Correlation sets, right extension sets and the prefix codes built on them.

Sets of words are returned as ``frozenset[str]``; the empty word is ``""``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

EPSILON = ""


def _overlap_tails(h1: str, h2: str, max_overlap: int) -> list[str]:
    # tails e of h2 such that a suffix of h1 of length k = |h2| - |e| equals h2[:k]
    tails = []
    for k in range(1, min(max_overlap, len(h2) - 1) + 1):
        if h1.endswith(h2[:k]):
            tails.append(h2[k:])
    return tails


@lru_cache(maxsize=4096)
def correlation_set(h1: str, h2: str) -> frozenset[str]:
    """All ``e`` with ``h1 e = e' h2`` and ``0 < |e| < |h2|``, plus ε when ``h1 == h2``.

    >>> sorted(correlation_set("aabaa", "aab"))
    ['ab', 'b']
    """
    if not h1 or not h2:
        raise ValueError("correlation sets need nonempty words")
    tails = set(_overlap_tails(h1, h2, len(h1)))
    if h1 == h2:
        tails.add(EPSILON)
    return frozenset(tails)


def autocorrelation_set(w: str) -> frozenset[str]:
    """``correlation_set(w, w)``; always contains ε."""
    return correlation_set(w, w)


@lru_cache(maxsize=4096)
def right_extension_set(h1: str, h2: str) -> frozenset[str]:
    """All ``e`` with ``h1 e = e' h2``, ``e'`` nonempty and ``0 < |e| < |h2|``."""
    if not h1 or not h2:
        raise ValueError("extension sets need nonempty words")
    return frozenset(_overlap_tails(h1, h2, len(h1) - 1))


def prefix_code(words: Iterable[str]) -> frozenset[str]:
    """Elements of ``words - {ε}`` that have no proper prefix in that set."""
    nonempty = {c for c in words if c}
    return frozenset(
        c for c in nonempty if not any(d != c and c.startswith(d) for d in nonempty)
    )


class _Trie:
    """Prefix tree keeping only words that have no stored proper prefix."""

    def __init__(self):
        self.root: dict = {}

    def insert(self, word: str) -> bool:
        node = self.root
        for a in word:
            if "$" in node:
                return False  # a stored word is a prefix: drop
            node = node.setdefault(a, {})
        if "$" in node:
            return False
        # any stored extension of `word` is removed
        node.clear()
        node["$"] = word
        return True

    def words(self) -> list[str]:
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            for key, child in node.items():
                if key == "$":
                    out.append(child)
                else:
                    stack.append(child)
        return out


def shift_tails(h1: str, h2: str) -> list[str]:
    """Trailing suffixes obtained by sliding ``h2`` rightwards along ``h1``.

    Shifts are visited in increasing order, so the tails come out shortest first.
    """
    return list(reversed(_overlap_tails(h1, h2, len(h1))))


def prefix_code_by_trie(h1: str, h2: str | None = None) -> frozenset[str]:
    """Build the prefix code of ``correlation_set(h1, h2)`` by shifting and trie insertion.

    Each new trailing suffix is pushed down the trie; it is dropped when the
    walk meets a stored word, otherwise inserted.
    """
    if h2 is None:
        h2 = h1
    trie = _Trie()
    for tail in shift_tails(h1, h2):
        trie.insert(tail)
    return frozenset(trie.words())


def suffix_chain_factors(code: Iterable[str]) -> list[str]:
    """Return ``q1, ..., qk`` such that the code is ``{q1, q2 q1, ..., qk ... q1}``.

    Raises ``ValueError`` when the sorted code words do not form a suffix chain.
    """
    ordered = sorted(code, key=len)
    factors = []
    previous = ""
    for word in ordered:
        if not word.endswith(previous) or len(word) == len(previous):
            raise ValueError(f"{word!r} does not extend {previous!r} on the left")
        factors.append(word[: len(word) - len(previous)])
        previous = word
    return factors


def count_factorizations(word: str, code: Iterable[str]) -> int:
    """Number of ways to write ``word`` as a concatenation of code words."""
    code = [c for c in code if c]
    ways = [0] * (len(word) + 1)
    ways[0] = 1
    for i in range(1, len(word) + 1):
        ways[i] = sum(ways[i - len(c)] for c in code if len(c) <= i and word.endswith(c, 0, i))
    return ways[len(word)]


def correlation_matrix(words: Sequence[str]) -> list[list[frozenset[str]]]:
    return [[correlation_set(a, b) for b in words] for a in words]


def extension_matrix(words: Sequence[str]) -> list[list[frozenset[str]]]:
    return [[right_extension_set(a, b) for b in words] for a in words]


def prefix_code_matrix(words: Sequence[str]) -> list[list[frozenset[str]]]:
    """Entry ``(i, j)`` is the prefix-free part of the correlation set of ``(w_i, w_j)``."""
    return [[prefix_code(correlation_set(a, b)) for b in words] for a in words]


def _inner_occurrence(text: str, words: Sequence[str]) -> bool:
    # an occurrence that neither starts at 0 nor ends at len(text)
    for w in words:
        start = text.find(w, 1)
        while start != -1:
            if start + len(w) < len(text):
                return True
            start = text.find(w, start + 1)
    return False


def clump_step_matrix(words: Sequence[str]) -> list[list[frozenset[str]]]:
    """Overlapping steps between consecutive occurrences inside a clump.

    Entry ``(i, j)`` keeps the ``m`` in the correlation set of ``(w_i, w_j)``
    such that ``w_i m`` holds no occurrence of any word strictly inside it.
    For a single word this coincides with :func:`prefix_code`; for several
    words it also discards steps that skip over an occurrence of a third word.
    """
    return [
        [
            frozenset(
                m for m in correlation_set(a, b)
                if m and not _inner_occurrence(a + m, words)
            )
            for b in words
        ]
        for a in words
    ]
