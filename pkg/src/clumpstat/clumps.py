"""Clump generating functions for one word or a reduced word set.

Marking variables: ``z`` length, ``x`` (or ``x1 .. xr``) occurrences, ``t``
covered positions, ``u`` clumps and ``v`` clumps holding exactly ``k``
occurrences.  Coverage is tracked by evaluating each clump's length
polynomials at ``z * t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .correlation import clump_step_matrix
from .languages import (
    multi_word_languages,
    occurrence_vars,
    require_bernoulli,
    single_word_languages,
    weighted_polynomial,
    word_weight,
)
from .model import ReducedWordSet, TextModel, validate_reduced_set, word_probability
from .symbolic import RationalFunction, matrix_inverse, mat_mul, rf_substitute, series_values, solve_linear

Z = RationalFunction.var("z")
T = RationalFunction.var("t")
U = RationalFunction.var("u")
V = RationalFunction.var("v")

MARK_VARIABLES = ("x", "t", "u", "v")


def _covered(f: RationalFunction) -> RationalFunction:
    """Evaluate a length polynomial at ``z * t`` so covered positions get marked."""
    return rf_substitute(f, "z", Z * T)


def _check_k(k: int | None) -> None:
    if k is not None and k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


@dataclass(frozen=True)
class ClumpKernel:
    """Generating function of one clump of ``word`` in ``z``, ``x`` and ``t``."""

    word: str
    code: RationalFunction  # weighted prefix code, in z
    kernel: RationalFunction

    def size_series(self, horizon: int) -> list[Fraction]:
        """``[z^s]`` of the kernel with ``x = t = 1``."""
        return series_values(self.kernel.subs(x=1, t=1), horizon)


def _kernel(weight, code, k: int | None, x=None):
    """``x W / (1 - x K)``, plus ``(v - 1) x^k W K^(k-1)`` when ``k`` is given."""
    x = RationalFunction.var("x") if x is None else x
    kern = x * weight / (1 - x * code)
    if k is not None:
        kern = kern + (V - 1) * x ** k * weight * code ** (k - 1)
    return kern


def clump_kernel(model: TextModel, w: str) -> ClumpKernel:
    lang = single_word_languages(model, w)
    return ClumpKernel(w, lang.code, _kernel(_covered(lang.weight), _covered(lang.code), None))


@dataclass(frozen=True)
class ClumpStatisticsGF:
    """Text generating function marking occurrences, clumps and coverage.

    ``gf`` lives in ``z``, the occurrence variables, ``t``, ``u`` and, when
    ``kclump_size`` is set, ``v``.
    """

    words: tuple[str, ...]
    gf: RationalFunction
    kclump_size: int | None = None

    @property
    def occurrence_vars(self) -> tuple[str, ...]:
        return occurrence_vars(len(self.words))

    @property
    def marks(self) -> tuple[str, ...]:
        return self.occurrence_vars + ("t", "u") + (("v",) if self.kclump_size else ())

    def view(self, *keep: str) -> RationalFunction:
        """Set every mark not listed in ``keep`` to 1."""
        unknown = set(keep) - set(self.marks) - {"x"}
        if unknown:
            raise ValueError(f"unknown marks {sorted(unknown)}")
        f = self.gf
        if "x" in keep and len(self.words) > 1:
            x = RationalFunction.var("x")
            f = f.subs(**{name: x for name in self.occurrence_vars})
        return f.subs(**{m: 1 for m in self.marks if m not in keep})

    def clump_count(self) -> RationalFunction:
        return self.view("u")

    def occurrences(self) -> RationalFunction:
        """Total occurrences, marked by ``x`` whatever the number of words."""
        return self.view("x")

    def coverage(self) -> RationalFunction:
        return self.view("t")

    def kclumps(self) -> RationalFunction:
        if not self.kclump_size:
            raise ValueError("this generating function does not mark k-clumps")
        return self.view("v")


def clump_text_gf(model: TextModel, w: str, k: int | None = None) -> ClumpStatisticsGF:
    """Substitute the clump kernel into the occurrence decomposition of texts.

    Between clumps, a minimal-language word that does not overlap ``w`` is a
    gap followed by the next clump; removing its trailing ``w`` leaves the gap.
    """
    _check_k(k)
    lang = single_word_languages(model, w)
    clump = U * _kernel(_covered(lang.weight), _covered(lang.code), k)
    gap = (lang.minimal - lang.code) / lang.weight
    head = lang.right / lang.weight
    gf = lang.avoiding + head * clump / (1 - gap * clump) * lang.ultimate
    return ClumpStatisticsGF((w,), gf, k)


def clump_count_gf(model: TextModel, w: str) -> RationalFunction:
    """Texts by length and number of clumps (variable ``u``), in closed form."""
    lang = single_word_languages(model, w)
    return lang.avoiding + U * lang.right * lang.ultimate / (1 - U * lang.minimal + (U - 1) * lang.code)


def expected_clumps_gf(model: TextModel, w: str) -> RationalFunction:
    """``sum_n E[clumps in a text of length n] z^n``."""
    lang = single_word_languages(model, w)
    return lang.weight * (1 - lang.code) / (1 - Z) ** 2


def expected_clumps(model: TextModel, w: str, n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be >= 0")
    return series_values(expected_clumps_gf(model, w), n)[n]


def kclump_gf(model: TextModel, w: str, k: int) -> RationalFunction:
    """Texts by length and number of clumps with exactly ``k`` occurrences (``v``)."""
    if k is None or k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    lang = single_word_languages(model, w)
    kern = lang.weight * (1 / (1 - lang.code) + (V - 1) * lang.code ** (k - 1))
    gap = (lang.minimal - lang.code) / lang.weight
    return lang.avoiding + (lang.right / lang.weight) * kern / (1 - gap * kern) * lang.ultimate


def coverage_gf(model: TextModel, w: str) -> RationalFunction:
    """Texts by length and number of positions covered by clumps (``t``)."""
    return clump_text_gf(model, w).coverage()


def expected_coverage_gf(stats: ClumpStatisticsGF) -> RationalFunction:
    return stats.coverage().diff("t").subs(t=1)


def coverage_stats(model: TextModel, w: str, n: int) -> tuple[Fraction, Fraction]:
    """Expected covered positions and probability that a position is covered."""
    if n < 1:
        raise ValueError("n must be >= 1")
    mean = series_values(expected_coverage_gf(clump_text_gf(model, w)), n)[n]
    return mean, mean / n


def moment_series(f: RationalFunction, var: str, horizon: int) -> list[tuple[Fraction, Fraction]]:
    """``(mean, variance)`` of the statistic marked by ``var`` for ``n = 0 .. horizon``.

    ``f`` must involve only ``z`` and ``var``.
    """
    d1 = f.diff(var)
    d2 = d1.diff(var).subs(**{var: 1})
    first = series_values(d1.subs(**{var: 1}), horizon)
    second = series_values(d2, horizon)
    return [(a, b + a - a * a) for a, b in zip(first, second)]


@dataclass(frozen=True)
class ClumpSizeLaw:
    """Clump lengths weighted by the clump kernel.

    ``weights[s]`` is the kernel coefficient of ``z^s``; ``normalization`` is
    the total kernel mass ``P(w) / (1 - K(1))`` where ``K`` is the weighted
    prefix code.  This reads the stationary law of a clump's length as
    proportional to kernel weights, which is an interpretation rather than a
    derived formula.
    """

    word: str
    weights: dict[int, Fraction]
    normalization: Fraction | None
    divergent: bool

    interpretation = "clump length law taken proportional to the clump kernel weights"

    @property
    def probabilities(self) -> dict[int, Fraction]:
        if self.divergent:
            raise ArithmeticError("kernel mass diverges; only unnormalized weights exist")
        return {s: w / self.normalization for s, w in self.weights.items()}

    @property
    def captured_mass(self) -> Fraction:
        """Sum of the listed weights, a partial sum of the normalization."""
        return sum(self.weights.values(), Fraction(0))


def clump_size_distribution(model: TextModel, w: str, max_size: int) -> ClumpSizeLaw:
    if max_size < len(w):
        raise ValueError(f"max_size must be >= |w| = {len(w)}")
    kern = clump_kernel(model, w)
    series = kern.size_series(max_size)
    weights = {s: c for s, c in enumerate(series) if c}
    code_mass = kern.code.subs(z=1).constant()
    if code_mass >= 1:
        return ClumpSizeLaw(w, weights, None, True)
    return ClumpSizeLaw(w, weights, word_probability(model, w) / (1 - code_mass), False)


# -- several words -------------------------------------------------------------


@dataclass(frozen=True)
class MultiWordClumpMatrices:
    """Matrices of the multi-word clump decomposition (all with marks)."""

    steps: list  # weighted overlap steps between consecutive occurrences, in z
    star: list  # (I - marked steps)^-1, in z t and the occurrence variables
    clumps: list  # clump from w_i to w_j, marked
    gaps: list  # non-overlapping minimal words with the trailing word removed


def multi_word_clump_matrices(
    model: TextModel, words: ReducedWordSet | Sequence[str], k: int | None = None, langs=None
) -> MultiWordClumpMatrices:
    _check_k(k)
    require_bernoulli(model)
    words = validate_reduced_set(words, model.alphabet).words
    langs = langs or multi_word_languages(model, words)
    r = len(words)
    xs = [RationalFunction.var(name) for name in occurrence_vars(r)]
    steps = [[weighted_polynomial(model, cell) for cell in row] for row in clump_step_matrix(words)]
    marked = [[xs[j] * _covered(steps[i][j]) for j in range(r)] for i in range(r)]
    star = matrix_inverse([[(1 if i == j else 0) - marked[i][j] for j in range(r)] for i in range(r)])
    heads = [xs[i] * _covered(word_weight(model, w)) for i, w in enumerate(words)]
    clumps = [[U * heads[i] * star[i][j] for j in range(r)] for i in range(r)]
    if k is not None:
        power = [[RationalFunction(1 if i == j else 0) for j in range(r)] for i in range(r)]
        for _ in range(k - 1):
            power = mat_mul(power, marked)
        clumps = [
            [clumps[i][j] + U * (V - 1) * heads[i] * power[i][j] for j in range(r)] for i in range(r)
        ]
    gaps = [
        [(langs.minimal[i][j] - steps[i][j]) / langs.weights[j] for j in range(r)] for i in range(r)
    ]
    return MultiWordClumpMatrices(steps, star, clumps, gaps)


def multi_word_clump_gf(
    model: TextModel, words: ReducedWordSet | Sequence[str], k: int | None = None
) -> ClumpStatisticsGF:
    """Clump statistics for a reduced set.

    A text is a not-language prefix, then clumps separated by gaps, then an
    ultimate-language suffix.  Consecutive occurrences inside a clump are
    linked by overlap steps whose concatenation holds no other occurrence.
    """
    require_bernoulli(model)
    words = validate_reduced_set(words, model.alphabet).words
    langs = multi_word_languages(model, words)
    mats = multi_word_clump_matrices(model, words, k, langs)
    r = len(words)
    # (I - gaps * clumps) y = ultimate
    chain = mat_mul(mats.gaps, mats.clumps)
    system = [[(1 if i == j else 0) - chain[i][j] for j in range(r)] for i in range(r)]
    y = [row[0] for row in solve_linear(system, [[u] for u in langs.ultimate])]
    gf = langs.avoiding
    for i in range(r):
        head = langs.right[i] / langs.weights[i]
        for j in range(r):
            gf = gf + head * mats.clumps[i][j] * y[j]
    return ClumpStatisticsGF(tuple(words), gf, k)


def clump_statistics_gf(
    model: TextModel, words: ReducedWordSet | Sequence[str] | str, k: int | None = None
) -> ClumpStatisticsGF:
    """Single-word closed forms for one word, the matrix construction otherwise."""
    if isinstance(words, str):
        words = [words]
    words = validate_reduced_set(words, model.alphabet).words
    if len(words) == 1:
        return clump_text_gf(model, words[0], k)
    return multi_word_clump_gf(model, words, k)


__all__ = [
    "ClumpKernel",
    "ClumpSizeLaw",
    "ClumpStatisticsGF",
    "MultiWordClumpMatrices",
    "clump_count_gf",
    "clump_kernel",
    "clump_size_distribution",
    "clump_statistics_gf",
    "clump_text_gf",
    "coverage_gf",
    "coverage_stats",
    "expected_clumps",
    "expected_clumps_gf",
    "expected_coverage_gf",
    "kclump_gf",
    "moment_series",
    "multi_word_clump_gf",
    "multi_word_clump_matrices",
]
