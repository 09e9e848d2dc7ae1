from fractions import Fraction
from itertools import product

import pytest

from clumpstat.clumps import (
    clump_count_gf,
    clump_kernel,
    clump_size_distribution,
    clump_statistics_gf,
    clump_text_gf,
    coverage_stats,
    expected_clumps,
    expected_clumps_gf,
    kclump_gf,
    moment_series,
)
from clumpstat.model import word_probability
from clumpstat.symbolic import series_coefficients, series_values

from conftest import BIASED, UNIFORM, naive_law, naive_scan

HORIZON = 10


def _law(table, n, var):
    return {k: v for k, v in table.distribution(n, var).items() if v}


@pytest.mark.parametrize("words", [("aa",), ("aba",), ("bababa",), ("aba", "bba"), ("aabaa", "baab"), ("ab", "ba")])
def test_views_match_enumeration(bernoulli_model, words):
    g = clump_statistics_gf(bernoulli_model, words, 2)
    views = {
        "u": (g.clump_count(), lambda nt: len(nt.spans)),
        "x": (g.occurrences(), lambda nt: sum(nt.counts)),
        "t": (g.coverage(), lambda nt: nt.coverage),
        "v": (g.kclumps(), lambda nt: nt.sizes.count(2)),
    }
    for var, (f, stat) in views.items():
        table = series_coefficients(f, HORIZON)
        for n in range(HORIZON + 1):
            assert _law(table, n, var) == naive_law(bernoulli_model, words, n, stat), (var, n)


def test_closed_forms_agree(bernoulli_model):
    for w in ("aa", "aba", "abaabaaba"):
        assert clump_count_gf(bernoulli_model, w) == clump_text_gf(bernoulli_model, w).clump_count()
        for k in (1, 2, 3):
            assert kclump_gf(bernoulli_model, w, k) == clump_text_gf(bernoulli_model, w, k).kclumps()


def test_kernel_counts_single_clump_words(bernoulli_model):
    for w in ("aa", "aba", "abaab"):
        sizes = clump_kernel(bernoulli_model, w).size_series(HORIZON)
        for s in range(HORIZON + 1):
            whole = sum(
                (word_probability(bernoulli_model, "".join(c)) for c in product("ab", repeat=s)
                 if naive_scan("".join(c), (w,)).spans == [(0, s)]),
                Fraction(0),
            )
            assert sizes[s] == whole


def test_mean_clumps(bernoulli_model):
    for w in ("aa", "aab", "abaabaaba"):
        f = clump_count_gf(bernoulli_model, w)
        via_derivative = series_values(f.diff("u").subs(u=1), 15)
        assert series_values(expected_clumps_gf(bernoulli_model, w), 15) == via_derivative
        for n in range(9):
            law = naive_law(bernoulli_model, (w,), n, lambda nt: len(nt.spans))
            assert expected_clumps(bernoulli_model, w, n) == sum(k * p for k, p in law.items())


def test_aa_mean_is_linear():
    assert [expected_clumps(UNIFORM, "aa", n) for n in range(2, 12)] == [Fraction(n, 8) for n in range(2, 12)]


def test_moment_series_matches_enumeration():
    f = clump_count_gf(BIASED, "aba")
    for n, (mean, var) in enumerate(moment_series(f, "u", 9)):
        law = naive_law(BIASED, ("aba",), n, lambda nt: len(nt.spans))
        m = sum(k * p for k, p in law.items())
        assert mean == m
        assert var == sum(k * k * p for k, p in law.items()) - m * m


def test_coverage_stats():
    mean, fraction = coverage_stats(UNIFORM, "aa", 6)
    law = naive_law(UNIFORM, ("aa",), 6, lambda nt: nt.coverage)
    assert mean == sum(k * p for k, p in law.items())
    assert fraction == mean / 6


def test_clump_size_law():
    law = clump_size_distribution(UNIFORM, "aa", 12)
    assert not law.divergent
    # one clump of aa of length s is a^s: weight 2^-s, total mass 1/2
    assert law.weights == {s: Fraction(1, 2 ** s) for s in range(2, 13)}
    assert law.normalization == Fraction(1, 2)
    assert law.probabilities[2] == Fraction(1, 2)
    assert law.captured_mass < law.normalization
    assert law.interpretation


def test_clump_size_law_divergent_mass():
    # every letter is a; the prefix code {a} has mass 1
    from clumpstat.model import TextModel

    certain = TextModel.bernoulli("ab", {"a": 1, "b": 0})
    law = clump_size_distribution(certain, "aa", 6)
    assert law.divergent
    with pytest.raises(ArithmeticError):
        law.probabilities


def test_views_reject_unknown_marks():
    g = clump_statistics_gf(UNIFORM, ["aa"])
    with pytest.raises(ValueError):
        g.view("q")
    with pytest.raises(ValueError):
        g.kclumps()


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        clump_text_gf(UNIFORM, "aa", 0)
