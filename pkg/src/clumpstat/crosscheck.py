"""Exact comparison of generating-function distributions against the enumeration oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .automaton import automaton_series, build_clump_automaton
from .clumps import clump_statistics_gf
from .languages import occurrence_vars
from .model import TextModel, validate_reduced_set
from .oracle import DEFAULT_BUDGET, BudgetExceeded, Tally, exhaustive_tallies, project
from .symbolic import SeriesTable, series_coefficients

STATISTICS = ("clump_count", "kclump_count_1", "kclump_count_2", "occurrences", "coverage", "joint", "automaton")


@dataclass(frozen=True)
class Mismatch:
    statistic: str
    n: int
    value: object
    expected: Fraction
    got: Fraction


@dataclass
class CrossCheckReport:
    n_max: int
    checked: list = field(default_factory=list)  # (statistic, n) pairs compared
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _nonzero(table: dict) -> dict:
    return {k: v for k, v in table.items() if v}


def _oracle_views(tally_table: dict[Tally, Fraction]) -> dict[str, dict]:
    return {
        "clump_count": project(tally_table, lambda t: t.clumps),
        "kclump_count_1": project(tally_table, lambda t: t.kclumps(1)),
        "kclump_count_2": project(tally_table, lambda t: t.kclumps(2)),
        "occurrences": project(tally_table, lambda t: t.total_occurrences),
        "coverage": project(tally_table, lambda t: t.coverage),
        "joint": project(tally_table, lambda t: (*t.occurrences, t.clumps, t.coverage)),
    }


def gf_tables(model: TextModel, words: Sequence[str], n_max: int) -> dict[str, tuple[SeriesTable, tuple[str, ...]]]:
    """Series tables of every statistic, with the variables that index their values."""
    xs = occurrence_vars(len(words))
    tables: dict[str, tuple[SeriesTable, tuple[str, ...]]] = {}
    if model.is_bernoulli:
        for k in (1, 2):
            g = clump_statistics_gf(model, words, k)
            tables[f"kclump_count_{k}"] = (series_coefficients(g.kclumps(), n_max), ("v",))
        g = clump_statistics_gf(model, words)
        tables["clump_count"] = (series_coefficients(g.clump_count(), n_max), ("u",))
        tables["occurrences"] = (series_coefficients(g.occurrences(), n_max), ("x",))
        tables["coverage"] = (series_coefficients(g.coverage(), n_max), ("t",))
        tables["joint"] = (series_coefficients(g.gf, n_max), xs + ("u", "t"))
    automaton = build_clump_automaton(words, model.alphabet)
    coeffs = automaton_series(automaton, model, n_max)
    tables["automaton"] = (SeriesTable("z", n_max, coeffs), xs + ("u", "t"))
    return tables


def compare_with_oracle(
    model: TextModel,
    words: Sequence[str],
    n_max: int,
    budget: int = DEFAULT_BUDGET,
    stop_at_first: bool = False,
) -> CrossCheckReport:
    """Compare every available statistic for ``n = 0 .. n_max``, exactly.

    Bernoulli models use the formal-language generating functions and the
    automaton; Markov models use the automaton only.
    """
    words = validate_reduced_set(words, model.alphabet).words
    if len(model.alphabet) ** n_max > budget:
        raise BudgetExceeded(f"{len(model.alphabet)}^{n_max} texts exceed the budget of {budget}")
    tables = gf_tables(model, words, n_max)
    report = CrossCheckReport(n_max)
    for n in range(n_max + 1):
        oracle = _oracle_views(exhaustive_tallies(model, words, n, budget))
        oracle["automaton"] = oracle["joint"]
        for name, (table, names) in tables.items():
            if len(names) == 1:
                got = table.distribution(n, names[0])
            else:
                got = table.joint(n, names)
            got, expected = _nonzero(got), _nonzero(oracle[name])
            report.checked.append((name, n))
            if got != expected:
                for value in sorted(set(got) | set(expected)):
                    if got.get(value, 0) != expected.get(value, 0):
                        report.mismatches.append(
                            Mismatch(name, n, value, expected.get(value, Fraction(0)), got.get(value, Fraction(0)))
                        )
                        break
                if stop_at_first:
                    return report
    return report


__all__ = ["STATISTICS", "CrossCheckReport", "Mismatch", "compare_with_oracle", "gf_tables"]
