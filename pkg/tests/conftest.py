import sys
from collections import namedtuple
from fractions import Fraction
from itertools import product

import pytest

from clumpstat.model import TextModel

UNIFORM = TextModel.uniform("ab")
BIASED = TextModel.bernoulli("ab", {"a": Fraction(1, 3), "b": Fraction(2, 3)})
STICKY = TextModel.markov(
    "ab",
    {"a": Fraction(1, 2), "b": Fraction(1, 2)},
    {
        ("a", "a"): Fraction(3, 4),
        ("a", "b"): Fraction(1, 4),
        ("b", "a"): Fraction(1, 4),
        ("b", "b"): Fraction(3, 4),
    },
)

SINGLE_WORDS = ("aa", "aaa", "aba", "abaabaaba", "bababa")
WORD_SETS = (("aba", "bba"), ("aabaa", "baab"))
CONFIGURATIONS = tuple((w,) for w in SINGLE_WORDS) + WORD_SETS


NaiveTally = namedtuple("NaiveTally", "counts spans coverage sizes")


def naive_scan(text, words):
    """Occurrence intervals merged whenever they share a position.

    Written independently of the package scanner; spans are 0-based and
    half-open, ``sizes`` counts the occurrences in each clump.
    """
    hits = []
    counts = []
    for w in words:
        found = [(i, i + len(w)) for i in range(len(text) - len(w) + 1) if text[i : i + len(w)] == w]
        counts.append(len(found))
        hits.extend(found)
    hits.sort()
    spans = []
    for start, end in hits:
        if spans and start < spans[-1][1]:
            spans[-1][1] = max(spans[-1][1], end)
            spans[-1][2] += 1
        else:
            spans.append([start, end, 1])
    return NaiveTally(
        tuple(counts),
        [(s, e) for s, e, _ in spans],
        sum(e - s for s, e, _ in spans),
        [k for _, _, k in spans],
    )


def naive_law(model, words, n, statistic):
    """Exact distribution of ``statistic(NaiveTally)`` by brute force."""
    law = {}
    for letters in product(model.alphabet.letters, repeat=n):
        text = "".join(letters)
        p = Fraction(1)
        prev = None
        for a in text:
            p *= model.letter_prob(a, prev)
            prev = a
        key = statistic(naive_scan(text, words))
        law[key] = law.get(key, 0) + p
    return {k: v for k, v in sorted(law.items()) if v}


@pytest.fixture(params=[UNIFORM, BIASED], ids=["uniform", "biased"])
def bernoulli_model(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
