from fractions import Fraction

import mpmath
import pytest

from clumpstat.asymptotics import (
    NoRealRoot,
    clump_count_series_gf,
    dominant_root,
    growth_rates,
    mean_slope_limit,
    no_clump_gf,
    poisson_approximation,
    poisson_tail_gf,
    rare_word_advisory,
    u_coefficient,
)
from clumpstat.automaton import build_clump_automaton, clump_count_moments
from clumpstat.clumps import clump_count_gf
from clumpstat.model import TextModel
from clumpstat.symbolic import series_values

from conftest import BIASED, STICKY, UNIFORM, naive_law


def test_root_of_aa_is_golden():
    # the denominator of aa under the uniform model is 1 - z/2 - z^2/4 up to scale
    root = dominant_root(UNIFORM, "aa")
    with mpmath.workdps(60):
        assert abs(root.rho - (mpmath.sqrt(5) - 1)) < mpmath.mpf(10) ** -38
    assert root.lower <= root.upper and root.width < Fraction(1, 10 ** 38)


def test_root_of_ab_is_exact_and_double():
    root = dominant_root(UNIFORM, "ab")
    assert root.exact and root.rho == 2
    with pytest.raises(ArithmeticError):
        poisson_approximation(UNIFORM, "ab", 50, 1, root=root)


def test_no_root_without_sign_change():
    certain = TextModel.bernoulli("ab", {"a": 1, "b": 0})
    with pytest.raises(NoRealRoot):
        dominant_root(certain, "aa")


@pytest.mark.parametrize("w", ["aa", "aba", "abaabaaba"])
def test_tail_gf_is_u_coefficient(bernoulli_model, w):
    f = clump_count_gf(bernoulli_model, w)
    assert u_coefficient(f, 0) == no_clump_gf(bernoulli_model, w)
    for k in range(1, 5):
        assert u_coefficient(f, k) == poisson_tail_gf(bernoulli_model, w, k)


def test_tail_gf_matches_enumeration():
    for k in range(3):
        gf = no_clump_gf(BIASED, "aba") if k == 0 else poisson_tail_gf(BIASED, "aba", k)
        values = series_values(gf, 10)
        for n in range(11):
            law = naive_law(BIASED, ("aba",), n, lambda nt: len(nt.spans))
            assert values[n] == law.get(k, 0)


def test_tail_requires_positive_k():
    with pytest.raises(ValueError):
        poisson_tail_gf(UNIFORM, "aa", 0)


def test_approximation_improves_for_rare_word():
    root = dominant_root(UNIFORM, "abababab")
    gaps = []
    for n in (100, 200, 400):
        c = poisson_approximation(UNIFORM, "abababab", n, 1, root=root)
        assert c.exact == series_values(poisson_tail_gf(UNIFORM, "abababab", 1), n)[n]
        gaps.append(abs(c.ratio - 1))
    assert gaps[0] > gaps[1] > gaps[2]
    with mpmath.workdps(80):
        assert abs(c.p_at_rho - (c.rho - 1)) < mpmath.mpf(10) ** -30


def test_approximation_beyond_horizon_has_no_exact_value():
    c = poisson_approximation(UNIFORM, "abababab", 5000, 0, horizon=100)
    assert c.exact is None and c.ratio is None and c.approximation > 0


def test_rare_word_advisory():
    assert rare_word_advisory(UNIFORM, "aa", 1000) is not None
    assert rare_word_advisory(UNIFORM, "abababababab", 1000) is None


def test_growth_of_aa():
    rates = growth_rates(UNIFORM, ["aa"], 200)
    assert rates.mean_slope == 0.125 == float(mean_slope_limit(UNIFORM, "aa"))
    exact = clump_count_moments(build_clump_automaton(["aa"], "ab"), UNIFORM, 200)
    assert rates.variance_slope == float(exact[200][1] - exact[199][1])
    assert rates.mean_residual < 1e-12


def test_growth_under_markov_uses_automaton():
    rates = growth_rates(STICKY, ["aa"], 150)
    exact = clump_count_moments(build_clump_automaton(["aa"], "ab"), STICKY, 150)
    assert list(rates.means) == [m for m, _ in exact]
    assert list(rates.variances) == [v for _, v in exact]


def test_series_gf_dispatch():
    assert clump_count_series_gf(UNIFORM, "aa") == clump_count_gf(UNIFORM, "aa")
    f = clump_count_series_gf(UNIFORM, ["aba", "bba"])
    assert f.variables <= {"z", "u"}


def test_growth_needs_long_range():
    with pytest.raises(ValueError):
        growth_rates(UNIFORM, ["aa"], 50)
