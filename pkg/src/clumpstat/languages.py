"""Right / Minimal / Ultimate / Not language generating functions.

All functions here work in the Bernoulli model, where a word ``e`` of length
``L`` contributes ``P(e) z**L`` to a generating function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .correlation import autocorrelation_set, correlation_set, prefix_code
from .model import ModelError, ReducedWordSet, TextModel, validate_reduced_set, word_probability
from .symbolic import RationalFunction, matrix_inverse, monomial, poly, solve_linear


def occurrence_vars(r: int) -> tuple[str, ...]:
    """Names of the occurrence-marking variables for ``r`` words."""
    if r == 1:
        return ("x",)
    if r > 12:
        raise ValueError("at most 12 words are supported")
    return tuple(f"x{i}" for i in range(1, r + 1))


def require_bernoulli(model: TextModel) -> None:
    if not model.is_bernoulli:
        raise ModelError("language generating functions are only available for Bernoulli models")


def word_weight(model: TextModel, word: str, length_vars: Sequence[str] = ("z",)) -> RationalFunction:
    """``P(word) * prod(v**|word|)`` over the given variables."""
    return RationalFunction(monomial(word_probability(model, word), **{v: len(word) for v in length_vars}))


def weighted_polynomial(
    model: TextModel, words: Iterable[str], length_vars: Sequence[str] = ("z",)
) -> RationalFunction:
    """Sum of :func:`word_weight` over a finite word set (ε contributes 1)."""
    total = poly(0)
    for e in words:
        total += monomial(word_probability(model, e), **{v: len(e) for v in length_vars})
    return RationalFunction(total)


@dataclass(frozen=True)
class SingleWordLanguages:
    word: str
    weight: RationalFunction  # P(w) z^|w|
    correlation: RationalFunction
    code: RationalFunction  # weighted prefix code of the autocorrelation set
    denominator: RationalFunction
    right: RationalFunction
    minimal: RationalFunction
    ultimate: RationalFunction
    avoiding: RationalFunction  # texts with no occurrence


def single_word_languages(model: TextModel, w: str) -> SingleWordLanguages:
    require_bernoulli(model)
    if len(w) < 2:
        raise ValueError(f"word {w!r} must have length >= 2")
    z = RationalFunction.var("z")
    weight = word_weight(model, w)
    C = weighted_polynomial(model, autocorrelation_set(w))
    K = weighted_polynomial(model, prefix_code(autocorrelation_set(w)))
    D = weight + (1 - z) * C
    return SingleWordLanguages(
        word=w,
        weight=weight,
        correlation=C,
        code=K,
        denominator=D,
        right=weight / D,
        minimal=1 + (z - 1) / D,
        ultimate=1 / D,
        avoiding=C / D,
    )


def occurrence_gf(model: TextModel, w: str) -> RationalFunction:
    """Bivariate GF of texts by length (``z``) and occurrences of ``w`` (``x``)."""
    lang = single_word_languages(model, w)
    z, x = RationalFunction.var("z"), RationalFunction.var("x")
    return 1 / (1 - z + lang.weight * (1 - x) / (x + (1 - x) * lang.correlation))


@dataclass(frozen=True)
class MultiWordLanguages:
    words: ReducedWordSet
    weights: list  # P(w_i) z^|w_i|
    correlation: list  # diagonal includes 1 for ε
    minimal: list
    right: list
    ultimate: list
    avoiding: RationalFunction

    def identity_residuals(self) -> list[RationalFunction]:
        """The four defining identities, each as ``lhs - rhs`` (all zero when consistent)."""
        z = RationalFunction.var("z")
        r = len(self.words)
        out = []
        inv = matrix_inverse([[(1 if i == j else 0) - self.minimal[i][j] for j in range(r)] for i in range(r)])
        for i in range(r):
            for j in range(r):
                delta = 1 if i == j else 0
                lhs = inv[i][j] - delta
                rhs = self.weights[j] / (1 - z) + self.correlation[i][j] - delta
                out.append(lhs - rhs)
        for i in range(r):
            out.append(z * self.ultimate[i] - (sum(self.minimal[i], RationalFunction(0)) + self.ultimate[i] - 1))
        for j in range(r):
            lhs = z * self.right[j] - (self.right[j] - self.weights[j])
            rhs = sum((self.weights[i] * self.minimal[i][j] for i in range(r)), RationalFunction(0))
            out.append(lhs - rhs)
        for j in range(r):
            lhs = self.avoiding * self.weights[j]
            rhs = self.right[j] + sum(
                (self.right[i] * (self.correlation[i][j] - (1 if i == j else 0)) for i in range(r)),
                RationalFunction(0),
            )
            out.append(lhs - rhs)
        return out


def multi_word_languages(model: TextModel, words: ReducedWordSet | Sequence[str]) -> MultiWordLanguages:
    """Solve the language identities for a reduced set.

    Order: the minimal matrix first, then right, ultimate and not languages;
    every identity is re-checked exactly before returning.
    """
    require_bernoulli(model)
    words = validate_reduced_set(words, model.alphabet)
    r = len(words)
    z = RationalFunction.var("z")
    weights = [word_weight(model, w) for w in words]
    C = [[weighted_polynomial(model, correlation_set(a, b)) for b in words] for a in words]
    # (I - M)^{-1} = [W_j / (1 - z) + C_ij]
    B = [[weights[j] / (1 - z) + C[i][j] for j in range(r)] for i in range(r)]
    B_inv = matrix_inverse(B)
    M = [[(1 if i == j else 0) - B_inv[i][j] for j in range(r)] for i in range(r)]
    R = [
        (sum((weights[i] * M[i][j] for i in range(r)), RationalFunction(0)) - weights[j]) / (z - 1)
        for j in range(r)
    ]
    U = [(1 - sum(M[i], RationalFunction(0))) / (1 - z) for i in range(r)]
    N = (R[0] + sum((R[i] * (C[i][0] - (1 if i == 0 else 0)) for i in range(r)), RationalFunction(0))) / weights[0]
    langs = MultiWordLanguages(words, weights, C, M, R, U, N)
    bad = [res for res in langs.identity_residuals() if not res.is_zero]
    if bad:
        raise ArithmeticError(f"language identities not satisfied: {bad[0]}")
    return langs


def multi_occurrence_gf(model: TextModel, words: ReducedWordSet | Sequence[str]) -> RationalFunction:
    """GF of texts by length and by occurrences of each word (``x1 .. xr``; ``x`` when r = 1)."""
    langs = multi_word_languages(model, words)
    r = len(langs.words)
    xs = [RationalFunction.var(v) for v in occurrence_vars(r)]
    # (I - M_x) y = U, with (M_x)_ij = x_j M_ij
    a = [[(1 if i == j else 0) - xs[j] * langs.minimal[i][j] for j in range(r)] for i in range(r)]
    y = solve_linear(a, [[u] for u in langs.ultimate])
    total = langs.avoiding
    for i in range(r):
        total = total + xs[i] * langs.right[i] * y[i][0]
    return total


def gf_table(model: TextModel, w: str) -> dict[str, RationalFunction]:
    """Named single-word GFs, for printing."""
    lang = single_word_languages(model, w)
    return {
        "correlation": lang.correlation,
        "code": lang.code,
        "denominator": lang.denominator,
        "right": lang.right,
        "minimal": lang.minimal,
        "ultimate": lang.ultimate,
        "avoiding": lang.avoiding,
        "occurrences": occurrence_gf(model, w),
    }


__all__ = [
    "MultiWordLanguages",
    "SingleWordLanguages",
    "gf_table",
    "multi_occurrence_gf",
    "multi_word_languages",
    "occurrence_gf",
    "occurrence_vars",
    "single_word_languages",
    "weighted_polynomial",
    "word_weight",
]
