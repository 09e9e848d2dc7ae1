"""Dominant root, rare-word tail approximations and linear growth of moments.

Roots are located exactly on a rational grid, refined with ``mpmath`` and
certified by exact sign checks on rational endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .automaton import automaton_gf, build_clump_automaton
from .clumps import clump_count_gf, moment_series
from .languages import require_bernoulli, single_word_languages
from .model import ReducedWordSet, TextModel, validate_reduced_set, word_probability
from .symbolic import RationalFunction, poly_terms, series_values


class NoRealRoot(ArithmeticError):
    """The denominator has no sign change on the search interval."""


def poisson_tail_gf(model: TextModel, w: str, k: int) -> RationalFunction:
    """Texts with exactly ``k >= 1`` clumps, by length."""
    if k < 1:
        raise ValueError("k must be >= 1; use no_clump_gf for k = 0")
    lang = single_word_languages(model, w)
    return (
        lang.right * lang.ultimate * (lang.minimal - lang.code) ** (k - 1) / (1 - lang.code) ** k
    )


def no_clump_gf(model: TextModel, w: str) -> RationalFunction:
    return single_word_languages(model, w).avoiding


def u_coefficient(f: RationalFunction, k: int) -> RationalFunction:
    """``[u^k] f`` for a rational function whose denominator is nonzero at ``u = 0``."""
    g = f
    fact = 1
    for i in range(1, k + 1):
        g = g.diff("u")
        fact *= i
    return g.subs(u=0) / fact


# -- dominant root -------------------------------------------------------------


def _coefficients(p: RationalFunction, var: str = "z") -> list[Fraction]:
    if not p.is_polynomial:
        raise ValueError("expected a polynomial")
    scale = p.den.leading_coefficient()
    terms = poly_terms(p.num)
    deg = max((dict(m).get(var, 0) for m in terms), default=0)
    out = [Fraction(0)] * (deg + 1)
    for monom, c in terms.items():
        exps = dict(monom)
        if set(exps) - {var}:
            raise ValueError("polynomial involves other variables")
        out[exps.get(var, 0)] += c / Fraction(int(scale.p), int(scale.q))
    return out


def _horner(coeffs: Sequence, z):
    acc = 0 * z
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


@dataclass(frozen=True)
class DominantRoot:
    """Smallest root beyond 1 of the single-word denominator.

    ``lower`` and ``upper`` are rationals where the denominator has opposite
    signs (or coincide on an exact root).  ``quotient`` holds the coefficients
    of the cofactor ``Q`` with ``D(z) = (1 - z / rho) Q(z)``.
    """

    word: str
    rho: mpmath.mpf
    lower: Fraction
    upper: Fraction
    denominator: tuple[Fraction, ...]
    quotient: tuple[mpmath.mpf, ...]
    residual: mpmath.mpf
    exact: bool
    dps: int

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def quotient_at(self, z) -> mpmath.mpf:
        with mpmath.workdps(self.dps):
            return _horner(self.quotient, mpmath.mpf(z))


def _refine(coeffs: list[Fraction], lo: Fraction, hi: Fraction, dps: int, precision: Fraction):
    """Bisect exactly down to double precision, then polish with Newton in ``mpmath``."""
    f_lo = _horner(coeffs, lo)
    while hi - lo > Fraction(1, 2 ** 60):
        mid = (lo + hi) / 2
        f_mid = _horner(coeffs, mid)
        if f_mid == 0:
            return mid, mid, True
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    with mpmath.workdps(dps):
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        deriv = [i * c for i, c in enumerate(mp_coeffs)][1:]
        root = mpmath.mpf(lo.numerator) / lo.denominator
        for _ in range(200):
            step = _horner(mp_coeffs, root) / _horner(deriv, root)
            root -= step
            if abs(step) < mpmath.mpf(2) ** (-3 * dps):
                break
        centre = Fraction(*_mpf_ratio(root))
    # certify with exact arithmetic on a rational enclosure around the Newton value
    half = precision / 2
    a, b = centre - half, centre + half
    fa, fb = _horner(coeffs, a), _horner(coeffs, b)
    if fa == 0 or fb == 0:
        x = a if fa == 0 else b
        return x, x, True
    if (fa > 0) != (fb > 0):
        return max(a, lo), min(b, hi), False
    return lo, hi, False


def _mpf_ratio(x: mpmath.mpf) -> tuple[int, int]:
    man, exp = x.man_exp
    if exp >= 0:
        return int(man) * 2 ** int(exp), 1
    return int(man), 2 ** int(-exp)


def dominant_root(model: TextModel, w: str, precision: float | Fraction = Fraction(1, 10 ** 40),
                  dps: int = 80) -> DominantRoot:
    """Locate the smallest root of the denominator in ``(1, 1 / min letter probability]``.

    Some letter ``c`` gives texts ``c^n`` that avoid ``w`` with probability
    ``p_c^n``, so the root never lies beyond ``1 / p_c``; zero probabilities
    are skipped.

    The grid scan uses exact rational evaluation with step 1/1000; a grid
    point where the denominator vanishes exactly is returned as an exact
    root (this catches double roots such as the one of ``ab``).
    """
    require_bernoulli(model)
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    lang = single_word_languages(model, w)
    coeffs = _coefficients(lang.denominator)
    right_end = 1 / min(p for p in model.letter_probs.values() if p)
    step = Fraction(1, 1000)
    lo, f_lo = Fraction(1), _horner(coeffs, Fraction(1))
    found = None
    z = lo
    while z < right_end:
        z = min(z + step, right_end)
        fz = _horner(coeffs, z)
        if fz == 0:
            found = (z, z, True)
            break
        if (fz > 0) != (f_lo > 0):
            found = _refine(coeffs, lo, z, dps, precision)
            break
        lo, f_lo = z, fz
    if found is None:
        raise NoRealRoot(f"no sign change of the denominator of {w!r} on (1, {right_end}]")
    a, b, exact = found
    with mpmath.workdps(dps):
        if exact:
            rho = mpmath.mpf(a.numerator) / a.denominator
        else:
            rho = (mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator) / 2
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in coeffs]
        # synthetic division by (z - rho), then Q = -rho * S
        quotient_desc = []
        acc = mpmath.mpf(0)
        for c in reversed(mp_coeffs[1:]):
            acc = acc * rho + c
            quotient_desc.append(acc)
        residual = abs(_horner(mp_coeffs, rho))
        quotient = tuple(-rho * c for c in reversed(quotient_desc))
    return DominantRoot(w, rho, a, b, tuple(coeffs), quotient, residual, exact, dps)


# -- tail approximation ----------------------------------------------------------


@dataclass(frozen=True)
class PoissonComparison:
    word: str
    n: int
    k: int
    exact: Fraction | None
    approximation: mpmath.mpf
    rho: mpmath.mpf
    quotient_at_rho: mpmath.mpf
    p_at_rho: mpmath.mpf
    pre_asymptotic: bool

    @property
    def ratio(self) -> mpmath.mpf | None:
        if self.exact is None or self.approximation == 0:
            return None
        with mpmath.workdps(60):
            return mpmath.mpf(self.exact.numerator) / self.exact.denominator / self.approximation


def poisson_approximation(
    model: TextModel, w: str, n: int, k: int, horizon: int = 2000, root: DominantRoot | None = None
) -> PoissonComparison:
    """Leading singular term of ``P(exactly k clumps)`` against its exact value.

    The generating function of texts with ``k`` clumps has a pole of order
    ``k + 1`` at the dominant root ``rho``, which gives

        P(rho)^(k-1) P(w) rho^|w| / ((1 - K(rho))^k Q(rho)^(k+1)) * n^k / k! * rho^-n

    with ``P(z) = z - 1 + (1 - K(z)) D(z)`` (so ``P(rho) = rho - 1``).  The
    exact value is added when ``n <= horizon``.
    """
    if k < 0 or n < 0:
        raise ValueError("n and k must be >= 0")
    root = root or dominant_root(model, w)
    lang = single_word_languages(model, w)
    code = _coefficients(lang.code)
    pw = word_probability(model, w)
    with mpmath.workdps(root.dps):
        rho = root.rho
        q = root.quotient_at(rho)
        if q == 0:
            raise ArithmeticError(f"the dominant root of {w!r} is a multiple root; no simple-pole term")
        k_rho = _horner([mpmath.mpf(c.numerator) / c.denominator for c in code], rho)
        d_rho = _horner([mpmath.mpf(c.numerator) / c.denominator for c in root.denominator], rho)
        p_rho = rho - 1 + (1 - k_rho) * d_rho
        weight = mpmath.mpf(pw.numerator) / pw.denominator * rho ** len(w)
        approx = (
            weight * p_rho ** (k - 1) / ((1 - k_rho) ** k * q ** (k + 1))
            * mpmath.mpf(n) ** k / math.factorial(k) * rho ** (-n)
        )
    exact = None
    if n <= horizon:
        gf = no_clump_gf(model, w) if k == 0 else poisson_tail_gf(model, w, k)
        exact = series_values(gf, n)[n]
    return PoissonComparison(w, n, k, exact, approx, rho, q, p_rho, n < len(w))


def rare_word_advisory(model: TextModel, w: str, n: int) -> str | None:
    """Warn when ``w`` is short relative to ``n``: the tail approximation needs rare words."""
    require_bernoulli(model)
    if n < 2:
        return None
    threshold = math.log(n) / math.log(1 / float(model.max_letter_prob))
    if len(w) <= threshold:
        return (
            f"|w| = {len(w)} is not above log(n)/log(1/p_max) = {threshold:.3f}; "
            "the word is not rare at this length and the tail approximation may be poor"
        )
    return None


# -- growth of moments ---------------------------------------------------------


@dataclass(frozen=True)
class GrowthRates:
    n_max: int
    mean_slope: float
    variance_slope: float
    mean_residual: float
    variance_residual: float
    means: tuple[Fraction, ...]
    variances: tuple[Fraction, ...]


def clump_count_series_gf(model: TextModel, words: ReducedWordSet | Sequence[str] | str) -> RationalFunction:
    """Texts by length and clump count: closed form for one Bernoulli word, automaton otherwise."""
    if isinstance(words, str):
        words = [words]
    words = validate_reduced_set(words, model.alphabet).words
    if len(words) == 1 and model.is_bernoulli:
        return clump_count_gf(model, words[0])
    return automaton_gf(build_clump_automaton(words, model.alphabet), model, marks=("u",))


def _relative_spread(values: Sequence[Fraction]) -> float:
    last = values[-1]
    if last == 0:
        return 0.0 if all(v == 0 for v in values) else math.inf
    return float(max(abs(v - last) for v in values) / abs(last))


def growth_rates(model: TextModel, words, n_max: int) -> GrowthRates:
    """Increments of the exact mean and variance of the clump count.

    ``*_slope`` is the increment at ``n_max``; ``*_residual`` is the largest
    relative deviation of the increments over the last 10% of the range.
    """
    if n_max < 100:
        raise ValueError("n_max must be >= 100")
    moments = moment_series(clump_count_series_gf(model, words), "u", n_max)
    means = [m for m, _ in moments]
    variances = [v for _, v in moments]
    tail = range(n_max - n_max // 10, n_max + 1)
    mean_inc = [means[n] - means[n - 1] for n in tail]
    var_inc = [variances[n] - variances[n - 1] for n in tail]
    return GrowthRates(
        n_max,
        float(mean_inc[-1]),
        float(var_inc[-1]),
        _relative_spread(mean_inc),
        _relative_spread(var_inc),
        tuple(means),
        tuple(variances),
    )


def mean_slope_limit(model: TextModel, w: str) -> Fraction:
    """``P(w) (1 - K(1))``: the limiting increment of the expected clump count."""
    lang = single_word_languages(model, w)
    return word_probability(model, w) * (1 - lang.code.subs(z=1).constant())


__all__ = [
    "DominantRoot",
    "GrowthRates",
    "NoRealRoot",
    "PoissonComparison",
    "clump_count_series_gf",
    "dominant_root",
    "growth_rates",
    "mean_slope_limit",
    "no_clump_gf",
    "poisson_approximation",
    "poisson_tail_gf",
    "rare_word_advisory",
    "u_coefficient",
]
