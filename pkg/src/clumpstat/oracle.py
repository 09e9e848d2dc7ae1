"""Ground-truth clump statistics computed directly on texts.

Everything here works from the definitions: scan for occurrences, chain
overlapping ones into clumps, and either enumerate every text of a given
length (exact) or sample texts (Monte Carlo).
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Sequence

import numpy as np

from .model import ReducedWordSet, TextModel, enumerate_texts, validate_reduced_set, word_probability

DEFAULT_BUDGET = 2 ** 24


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Occurrence:
    start: int  # 1-based
    word_index: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length - 1


@dataclass(frozen=True)
class Clump:
    occurrences: tuple[Occurrence, ...]

    @property
    def start(self) -> int:
        return self.occurrences[0].start

    @property
    def end(self) -> int:
        return max(o.end for o in self.occurrences)

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    @property
    def size(self) -> int:
        """Number of occurrences in the clump."""
        return len(self.occurrences)


@dataclass(frozen=True)
class Tally:
    """Per-text counts: occurrences of each word, clumps, covered positions, clump sizes."""

    occurrences: tuple[int, ...]
    clumps: int
    coverage: int
    clump_sizes: tuple[int, ...] = ()

    def kclumps(self, k: int) -> int:
        return sum(1 for s in self.clump_sizes if s == k)

    @property
    def total_occurrences(self) -> int:
        return sum(self.occurrences)


def _words(words) -> tuple[str, ...]:
    if isinstance(words, ReducedWordSet):
        return words.words
    if isinstance(words, str):
        return (words,)
    return tuple(words)


def find_occurrences(text: str, words: ReducedWordSet | Sequence[str]) -> list[Occurrence]:
    """All occurrences of all words, sorted by start then word index."""
    words = _words(words)
    found = []
    for start in range(len(text)):
        for i, w in enumerate(words):
            if text.startswith(w, start):
                found.append(Occurrence(start + 1, i, len(w)))
    return found


def detect_clumps(text: str, words: ReducedWordSet | Sequence[str]) -> list[Clump]:
    """Chain occurrences: one joins the current clump iff it starts at or before the clump's end."""
    clumps: list[list[Occurrence]] = []
    end = 0
    for occ in find_occurrences(text, words):
        if clumps and occ.start <= end:
            clumps[-1].append(occ)
            end = max(end, occ.end)
        else:
            clumps.append([occ])
            end = occ.end
    return [Clump(tuple(c)) for c in clumps]


def clump_definition_holds(text: str, words, clump: Clump, occurrences: Sequence[Occurrence]) -> bool:
    """Check one clump directly against the cluster/clump definition.

    Every pair of consecutive positions of the span must lie in one occurrence
    of the clump, the clump must hold every occurrence inside its span, and no
    other occurrence may overlap the span.
    """
    lo, hi = clump.start, clump.end
    own = set(clump.occurrences)
    for o in clump.occurrences:
        if text[o.start - 1:o.end] != _words(words)[o.word_index]:
            return False
    for i in range(lo, hi):
        if not any(o.start <= i and i + 1 <= o.end for o in own):
            return False
    if hi == lo and not own:
        return False
    for o in occurrences:
        if o in own:
            continue
        if o.start <= hi and o.end >= lo:
            return False
    return True


def tally(text: str, words: ReducedWordSet | Sequence[str]) -> Tally:
    words = _words(words)
    clumps = detect_clumps(text, words)
    counts = [0] * len(words)
    for c in clumps:
        for o in c.occurrences:
            counts[o.word_index] += 1
    return Tally(
        occurrences=tuple(counts),
        clumps=len(clumps),
        coverage=sum(c.length for c in clumps),
        clump_sizes=tuple(c.size for c in clumps),
    )


# -- statistics ---------------------------------------------------------------


def statistic_function(name: str, k: int | None = None) -> Callable[[Tally], Hashable]:
    """Map a statistic name to a function of a :class:`Tally`.

    Names: ``clump_count``, ``kclump_count`` (needs ``k``), ``occurrences``
    (total), ``word_occurrences`` (tuple per word), ``coverage`` and ``joint``
    (``(occurrences tuple, clumps, coverage)``).
    """
    if name == "clump_count":
        return lambda t: t.clumps
    if name == "kclump_count":
        if k is None or k < 1:
            raise ValueError("kclump_count needs k >= 1")
        return lambda t: t.kclumps(k)
    if name == "occurrences":
        return lambda t: t.total_occurrences
    if name == "word_occurrences":
        return lambda t: t.occurrences
    if name == "coverage":
        return lambda t: t.coverage
    if name == "joint":
        return lambda t: (t.occurrences, t.clumps, t.coverage)
    raise ValueError(f"unknown statistic {name!r}")


@dataclass
class DistributionTable:
    n: int
    statistic: str
    probs: dict

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def mean(self) -> Fraction:
        return sum((Fraction(v) * p for v, p in self.probs.items()), Fraction(0))

    def variance(self) -> Fraction:
        m = self.mean()
        return sum((Fraction(v) ** 2 * p for v, p in self.probs.items()), Fraction(0)) - m * m

    def rows(self):
        return sorted(self.probs.items(), key=lambda kv: kv[0])


def _tally_chunk(args):
    model, words, n, prefix = args
    out: dict[Tally, Fraction] = {}
    for text in enumerate_texts(model.alphabet, n, prefix):
        p = word_probability(model, text)
        if p:
            t = tally(text, words)
            out[t] = out.get(t, 0) + p
    return out


def exhaustive_tallies(
    model: TextModel,
    words: ReducedWordSet | Sequence[str],
    n: int,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> dict[Tally, Fraction]:
    """Exact law of the per-text :class:`Tally` over all texts of length ``n``.

    With ``workers > 1`` the texts are split by their first letter and the
    partial tables are added together.
    """
    words = validate_reduced_set(words, model.alphabet).words
    if n < 0:
        raise ValueError("n must be >= 0")
    if len(model.alphabet) ** n > budget:
        raise BudgetExceeded(f"{len(model.alphabet)}^{n} texts exceed the budget of {budget}")
    if workers <= 1 or n == 0:
        return _tally_chunk((model, words, n, ""))
    jobs = [(model, words, n, a) for a in model.alphabet]
    merged: dict[Tally, Fraction] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_tally_chunk, jobs):
            for key, p in part.items():
                merged[key] = merged.get(key, 0) + p
    return merged


def project(tallies: dict[Tally, Fraction], fn: Callable[[Tally], Hashable]) -> dict:
    out: dict = {}
    for t, p in tallies.items():
        key = fn(t)
        out[key] = out.get(key, 0) + p
    return dict(sorted(out.items(), key=lambda kv: kv[0]))


def exhaustive_distribution(
    model: TextModel,
    words: ReducedWordSet | Sequence[str],
    n: int,
    statistic: str = "clump_count",
    k: int | None = None,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> DistributionTable:
    fn = statistic_function(statistic, k)
    tallies = exhaustive_tallies(model, words, n, budget=budget, workers=workers)
    return DistributionTable(n, statistic, project(tallies, fn))


# -- Monte Carlo ---------------------------------------------------------------


def _letter_codes(model: TextModel, words: Sequence[str]):
    index = {a: i for i, a in enumerate(model.alphabet)}
    return [np.array([index[a] for a in w], dtype=np.int8) for w in words]


def sample_letter_codes(model: TextModel, n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` random texts of length ``n`` as a ``(count, n)`` array of letter indices."""
    letters = model.alphabet.letters
    m = len(letters)
    out = np.empty((count, n), dtype=np.int8)
    if n == 0:
        return out
    u = rng.random((count, n))
    if model.is_bernoulli:
        cum = np.cumsum([float(model.letter_probs[a]) for a in letters])[:-1]
        out[:] = np.searchsorted(cum, u, side="right")
        return out
    init = np.cumsum([float(model.initial_probs[a]) for a in letters])[:-1]
    trans = np.array(
        [np.cumsum([float(model.transition_probs[(a, b)]) for b in letters])[:-1] for a in letters]
    )
    out[:, 0] = np.searchsorted(init, u[:, 0], side="right")
    if m == 2:
        thresh = trans[:, 0]
        for p in range(1, n):
            out[:, p] = u[:, p] >= thresh[out[:, p - 1]]
    else:
        for p in range(1, n):
            out[:, p] = (u[:, p, None] >= trans[out[:, p - 1]]).sum(axis=1)
    return out


def sample_texts(model: TextModel, n: int, count: int, seed: int) -> list[str]:
    """Seeded random texts (PCG64 generator from ``numpy.random.default_rng``)."""
    rng = np.random.default_rng(seed)
    codes = sample_letter_codes(model, n, count, rng)
    letters = np.array(list(model.alphabet.letters))
    return ["".join(row) for row in letters[codes]] if n else [""] * count


def tally_arrays(codes: np.ndarray, word_codes: Sequence[np.ndarray], ks: Sequence[int] = ()) -> dict:
    """Vectorised clump tallies for a batch of texts given as letter-index rows.

    Returns arrays ``occurrences`` (S, r), ``clumps``, ``coverage`` and one
    ``kclumps_<k>`` per requested ``k``.  Same chaining rule as
    :func:`detect_clumps`.
    """
    S, n = codes.shape
    r = len(word_codes)
    end = np.full((S, n), -1, dtype=np.int32)
    occ_counts = np.zeros((S, r), dtype=np.int64)
    is_occ = np.zeros((S, n), dtype=bool)
    for i, w in enumerate(word_codes):
        L = len(w)
        if L > n:
            continue
        hit = np.ones((S, n - L + 1), dtype=bool)
        for j, c in enumerate(w):
            hit &= codes[:, j:n - L + 1 + j] == c
        occ_counts[:, i] = hit.sum(axis=1)
        pos = np.arange(n - L + 1, dtype=np.int32) + (L - 1)
        end[:, : n - L + 1] = np.where(hit, pos, end[:, : n - L + 1])
        is_occ[:, : n - L + 1] |= hit
    run = np.maximum.accumulate(end, axis=1)
    previous = np.concatenate([np.full((S, 1), -1, dtype=np.int32), run[:, :-1]], axis=1)
    starts = is_occ & (previous < np.arange(n, dtype=np.int32))
    result = {
        "occurrences": occ_counts,
        "clumps": starts.sum(axis=1),
        "coverage": (run >= np.arange(n, dtype=np.int32)).sum(axis=1),
    }
    if ks:
        clump_id = np.cumsum(starts, axis=1) - 1
        flat = (np.arange(S)[:, None] * n + clump_id)[is_occ]
        sizes = np.bincount(flat, minlength=S * n).reshape(S, n)
        for k in ks:
            result[f"kclumps_{k}"] = (sizes == k).sum(axis=1)
    return result


@dataclass
class EmpiricalStatistic:
    name: str
    frequencies: dict
    standard_errors: dict
    mean: float
    mean_se: float
    variance: float
    variance_se: float


@dataclass
class MonteCarloResult:
    n: int
    samples: int
    seed: int
    statistics: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> EmpiricalStatistic:
        return self.statistics[name]


class _Moments:
    """Streaming value counts of an integer statistic."""

    def __init__(self):
        self.counts: Counter = Counter()

    def add(self, values: np.ndarray) -> None:
        vals, cnt = np.unique(values, return_counts=True)
        self.counts.update(dict(zip(vals.tolist(), cnt.tolist())))

    def finish(self, name: str) -> EmpiricalStatistic:
        total = sum(self.counts.values())
        freqs = {k: c / total for k, c in sorted(self.counts.items())}
        ses = {k: math.sqrt(p * (1 - p) / total) for k, p in freqs.items()}
        mean = sum(k * c for k, c in self.counts.items()) / total
        m2 = sum((k - mean) ** 2 * c for k, c in self.counts.items()) / total
        m4 = sum((k - mean) ** 4 * c for k, c in self.counts.items()) / total
        var = m2 * total / (total - 1) if total > 1 else 0.0
        return EmpiricalStatistic(
            name=name,
            frequencies=freqs,
            standard_errors=ses,
            mean=mean,
            mean_se=math.sqrt(var / total) if total > 1 else float("inf"),
            variance=var,
            variance_se=math.sqrt(max(m4 - m2 * m2, 0.0) / total) if total > 1 else float("inf"),
        )


def monte_carlo(
    model: TextModel,
    words: ReducedWordSet | Sequence[str],
    n: int,
    samples: int,
    seed: int,
    ks: Sequence[int] = (1, 2),
    batch_cells: int = 20_000_000,
) -> MonteCarloResult:
    """Sample ``samples`` texts of length ``n`` and tally clump statistics.

    Uses numpy's PCG64 generator seeded with ``seed``; results are
    reproducible bit for bit for a fixed (model, words, n, samples, seed,
    batch_cells).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    words = validate_reduced_set(words, model.alphabet).words
    rng = np.random.default_rng(seed)
    codes_w = _letter_codes(model, words)
    names = ["clump_count", "occurrences", "coverage"] + [f"kclump_count_{k}" for k in ks]
    names += [f"occurrences_{i + 1}" for i in range(len(words))] if len(words) > 1 else []
    acc = {name: _Moments() for name in names}
    batch = max(1, batch_cells // max(n, 1))
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        codes = sample_letter_codes(model, n, size, rng)
        if n == 0:
            res = {"occurrences": np.zeros((size, len(words)), dtype=np.int64),
                   "clumps": np.zeros(size, dtype=np.int64), "coverage": np.zeros(size, dtype=np.int64)}
            res.update({f"kclumps_{k}": np.zeros(size, dtype=np.int64) for k in ks})
        else:
            res = tally_arrays(codes, codes_w, ks)
        acc["clump_count"].add(res["clumps"])
        acc["occurrences"].add(res["occurrences"].sum(axis=1))
        acc["coverage"].add(res["coverage"])
        for k in ks:
            acc[f"kclump_count_{k}"].add(res[f"kclumps_{k}"])
        if len(words) > 1:
            for i in range(len(words)):
                acc[f"occurrences_{i + 1}"].add(res["occurrences"][:, i])
        done += size
    result = MonteCarloResult(n=n, samples=samples, seed=seed)
    for name, m in acc.items():
        result.statistics[name] = m.finish(name)
    return result
