"""``clumpstat`` command-line interface.

Exit codes: 0 success, 1 ``verify`` mismatch, 2 parse error (model file or
arguments), 3 validation error (word set, model probabilities, budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from . import __version__
from .asymptotics import dominant_root, poisson_approximation, rare_word_advisory
from .automaton import automaton_gf, build_clump_automaton, export_dot
from .clumps import (
    clump_size_distribution,
    clump_statistics_gf,
    expected_clumps_gf,
    expected_coverage_gf,
    moment_series,
)
from .correlation import (
    EPSILON,
    autocorrelation_set,
    correlation_set,
    prefix_code,
    prefix_code_by_trie,
    prefix_code_matrix,
    right_extension_set,
)
from .crosscheck import compare_with_oracle
from .languages import gf_table, multi_occurrence_gf, multi_word_languages
from .model import ModelError, ModelParseError, TextModel, WordSetError, load_model, validate_reduced_set
from .oracle import DEFAULT_BUDGET, BudgetExceeded, monte_carlo
from .symbolic import RationalFunction, series_coefficients

EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3


class UsageError(Exception):
    pass


# -- formatting ----------------------------------------------------------------


def decimal_string(value: Fraction, digits: int = 15) -> str:
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(+(Decimal(value.numerator) / Decimal(value.denominator)))


def rational_string(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


def _cell(value) -> str:
    if isinstance(value, Fraction):
        return rational_string(value)
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    title: str = ""


def _with_decimals(value: Fraction) -> list:
    return [value, decimal_string(value)]


def emit(tables: Sequence[Table], fmt: str, out) -> None:
    if fmt == "json":
        payload = [
            {"title": t.title, "columns": t.columns, "rows": [[_cell(v) for v in row] for row in t.rows]}
            for t in tables
        ]
        json.dump(payload if len(payload) > 1 else payload[0], out, indent=2)
        out.write("\n")
        return
    for i, t in enumerate(tables):
        if len(tables) > 1 or t.title:
            if i:
                out.write("\n")
            out.write(f"# {t.title}\n")
        for row in t.rows:
            out.write("\t".join(_cell(v) for v in row) + "\n")


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    model: TextModel
    words: tuple[str, ...]
    n_values: list[int]
    horizon: int
    fmt: str
    seed: int
    budget: int
    k: int | None
    args: argparse.Namespace


def _parse_n_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"--n-range expects A..B, got {text!r}")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--n-range expects integers, got {text!r}") from None
    if a < 0 or b < a:
        raise UsageError(f"--n-range needs 0 <= A <= B, got {text!r}")
    return list(range(a, b + 1))


def _read_words(args) -> tuple[str, ...]:
    words: list[str] = []
    if getattr(args, "word", None):
        words.append(args.word)
    if getattr(args, "words", None):
        words.extend(w.strip() for w in args.words.split(",") if w.strip())
    if getattr(args, "words_file", None):
        with open(args.words_file, encoding="utf-8") as fh:
            words.extend(line.strip() for line in fh if line.strip() and not line.startswith("#"))
    if not words:
        raise UsageError("no words given; use --word, --words or --words-file")
    return tuple(words)


def build_config(args: argparse.Namespace) -> RunConfig:
    words = _read_words(args)
    if args.model:
        model = load_model(args.model)
    else:
        letters = "ab" + "".join(sorted(set("".join(words)) - set("ab")))
        model = TextModel.uniform(letters)
    validate_reduced_set(words, model.alphabet)
    if getattr(args, "n_range", None):
        n_values = _parse_n_range(args.n_range)
    elif getattr(args, "n", None) is not None:
        n_values = [args.n]
    else:
        n_values = []
    if any(n < 0 for n in n_values):
        raise UsageError("--n must be >= 0")
    horizon = args.horizon if getattr(args, "horizon", None) is not None else 20
    if horizon < 1:
        raise UsageError("--horizon must be >= 1")
    budget = getattr(args, "budget", DEFAULT_BUDGET) or DEFAULT_BUDGET
    if budget < 1:
        raise UsageError("--budget must be >= 1")
    return RunConfig(
        command=args.command,
        model=model,
        words=words,
        n_values=n_values,
        horizon=horizon,
        fmt=args.format,
        seed=getattr(args, "seed", 0),
        budget=budget,
        k=getattr(args, "k", None),
        args=args,
    )


def _require_n(config: RunConfig, default: list[int] | None = None) -> list[int]:
    if config.n_values:
        return config.n_values
    if default is not None:
        return default
    raise UsageError(f"{config.command} needs --n or --n-range")


def _require_bernoulli(config: RunConfig, what: str) -> None:
    if not config.model.is_bernoulli:
        raise ModelError(f"{what} needs a Bernoulli model")


# -- statistics ------------------------------------------------------------------


def statistic_gf(config: RunConfig, statistic: str, k: int | None = None) -> tuple[RationalFunction, str]:
    """Bivariate generating function of one statistic and the variable marking it."""
    if config.model.is_bernoulli:
        g = clump_statistics_gf(config.model, config.words, k)
        views = {"clump_count": (g.clump_count, "u"), "occurrences": (g.occurrences, "x"),
                 "coverage": (g.coverage, "t"), "kclump_count": (g.kclumps, "v")}
        fn, var = views[statistic]
        return fn(), var
    if statistic == "kclump_count":
        raise ModelError("k-clump statistics need a Bernoulli model")
    automaton = build_clump_automaton(config.words, config.model.alphabet)
    mark = {"clump_count": "u", "occurrences": "x", "coverage": "t"}[statistic]
    f = automaton_gf(automaton, config.model, marks=(mark,))
    if mark == "x" and len(config.words) > 1:
        x = RationalFunction.var("x")
        f = f.subs(**{f"x{i + 1}": x for i in range(len(config.words))})
    return f, mark


def _distribution_table(config: RunConfig, statistic: str, n: int, k: int | None = None) -> Table:
    f, var = statistic_gf(config, statistic, k)
    dist = series_coefficients(f, n).distribution(n, var)
    rows = [[value] + _with_decimals(p) for value, p in dist.items() if p]
    name = statistic if k is None else f"{statistic} k={k}"
    return Table(["value", "probability", "decimal"], rows, f"{name} n={n}")


# -- commands ------------------------------------------------------------------


def _set_lines(words) -> list[list]:
    return [[w if w != EPSILON else "<eps>"] for w in sorted(words, key=lambda s: (len(s), s))]


def cmd_correlate(config: RunConfig, out) -> int:
    tables = []
    words = config.words
    if len(words) == 1:
        w = words[0]
        code = prefix_code(autocorrelation_set(w))
        if code != prefix_code_by_trie(w):
            raise AssertionError("prefix code constructions disagree")
        tables.append(Table(["word"], _set_lines(autocorrelation_set(w)), f"correlation {w} {w}"))
        tables.append(Table(["word"], _set_lines(right_extension_set(w, w)), f"extension {w} {w}"))
        tables.append(Table(["word"], _set_lines(code), f"prefix_code {w}"))
    else:
        codes = prefix_code_matrix(words)
        for i, a in enumerate(words):
            for j, b in enumerate(words):
                tables.append(Table(["word"], _set_lines(correlation_set(a, b)), f"correlation {a} {b}"))
                tables.append(Table(["word"], _set_lines(right_extension_set(a, b)), f"extension {a} {b}"))
                tables.append(Table(["word"], _set_lines(codes[i][j]), f"prefix_code {a} {b}"))
    emit(tables, config.fmt, out)
    return 0


def cmd_gf(config: RunConfig, out) -> int:
    what = config.args.what
    model, words = config.model, config.words
    named: dict[str, RationalFunction] = {}
    if what in ("automaton",) or not model.is_bernoulli:
        automaton = build_clump_automaton(words, model.alphabet)
        named["automaton"] = automaton_gf(automaton, model)
    elif what == "languages":
        if len(words) == 1:
            named.update(gf_table(model, words[0]))
        else:
            langs = multi_word_languages(model, words)
            named["avoiding"] = langs.avoiding
            for i, w in enumerate(words):
                named[f"right[{w}]"] = langs.right[i]
                named[f"ultimate[{w}]"] = langs.ultimate[i]
                for j, v in enumerate(words):
                    named[f"minimal[{w},{v}]"] = langs.minimal[i][j]
            named["occurrences"] = multi_occurrence_gf(model, words)
    elif what == "clumps":
        named["clumps"] = clump_statistics_gf(model, words).gf
    elif what == "clump_count":
        named["clump_count"] = clump_statistics_gf(model, words).clump_count()
    elif what == "kclumps":
        k = config.k or 1
        named[f"kclumps k={k}"] = clump_statistics_gf(model, words, k).kclumps()
    elif what == "coverage":
        named["coverage"] = clump_statistics_gf(model, words).coverage()
    elif what == "mean_clumps":
        if len(words) != 1:
            raise UsageError("--what mean_clumps takes a single word")
        named["mean_clumps"] = expected_clumps_gf(model, words[0])
    else:
        raise UsageError(f"unknown --what {what!r}")
    if config.fmt == "json":
        emit([Table(["name", "numerator", "denominator"],
                    [[k, str(f.num), str(f.den)] for k, f in named.items()], "generating functions")],
             "json", out)
    else:
        for name, f in named.items():
            out.write(f"{name} = ({f.num}) / ({f.den})\n")
    return 0


def cmd_moments(config: RunConfig, out) -> int:
    ns = _require_n(config)
    top = max(ns)
    rows = []
    for statistic in ("clump_count", "occurrences", "coverage"):
        f, var = statistic_gf(config, statistic)
        series = moment_series(f, var, top)
        for n in ns:
            mean, var_n = series[n]
            rows.append([n, statistic] + _with_decimals(mean) + _with_decimals(var_n))
    emit([Table(["n", "statistic", "mean", "mean_decimal", "variance", "variance_decimal"], rows, "")],
         config.fmt, out)
    return 0


def cmd_distribution(config: RunConfig, out) -> int:
    ns = _require_n(config, [config.horizon])
    statistic = config.args.statistic
    tables = [_distribution_table(config, statistic, n) for n in ns]
    if len(tables) == 1:
        tables[0].title = ""
    emit(tables, config.fmt, out)
    return 0


def cmd_kclumps(config: RunConfig, out) -> int:
    _require_bernoulli(config, "kclumps")
    ns = _require_n(config, [config.horizon])
    k = config.k or 1
    if k < 1:
        raise UsageError("--k must be >= 1")
    emit([_distribution_table(config, "kclump_count", n, k) for n in ns], config.fmt, out)
    return 0


def cmd_coverage(config: RunConfig, out) -> int:
    ns = _require_n(config, [config.horizon])
    if min(ns) < 1:
        raise UsageError("coverage needs n >= 1")
    if config.model.is_bernoulli:
        mean_gf = expected_coverage_gf(clump_statistics_gf(config.model, config.words))
    else:
        f, _ = statistic_gf(config, "coverage")
        mean_gf = f.diff("t").subs(t=1)
    means = series_coefficients(mean_gf, max(ns)).constants()
    rows = [[n] + _with_decimals(means[n]) + _with_decimals(means[n] / n) for n in ns]
    tables = [Table(["n", "expected_covered", "decimal", "covered_fraction", "fraction_decimal"], rows, "coverage")]
    tables += [_distribution_table(config, "coverage", n) for n in ns]
    emit(tables, config.fmt, out)
    return 0


def cmd_automaton(config: RunConfig, out) -> int:
    automaton = build_clump_automaton(config.words, config.model.alphabet)
    dot = export_dot(automaton)
    if config.args.dot:
        with open(config.args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    rows = [
        ["states", len(automaton.states)],
        ["transitions", len(automaton.transitions)],
        ["x_set", ",".join(automaton.xset.elements)],
        ["final", ",".join(automaton.states[i] for i in sorted(automaton.final))],
    ]
    emit([Table(["key", "value"], rows, "automaton")], config.fmt, out)
    if not config.args.dot and config.fmt == "tsv":
        out.write("\n")
        out.write(dot)
    if config.args.gf:
        f = automaton_gf(automaton, config.model)
        out.write(f"automaton = ({f.num}) / ({f.den})\n")
    return 0


def cmd_verify(config: RunConfig, out) -> int:
    n_max = config.n_values[-1] if config.n_values else 12
    report = compare_with_oracle(config.model, config.words, n_max, config.budget, stop_at_first=True)
    statistics = sorted({name for name, _ in report.checked})
    if report.ok:
        rows = [["status", "ok"], ["n_max", n_max], ["statistics", ",".join(statistics)],
                ["comparisons", len(report.checked)]]
        emit([Table(["key", "value"], rows, "verify")], config.fmt, out)
        return 0
    bad = report.mismatches[0]
    rows = [["status", "mismatch"], ["statistic", bad.statistic], ["n", bad.n], ["value", _cell(bad.value)],
            ["oracle", bad.expected], ["generating_function", bad.got]]
    emit([Table(["key", "value"], rows, "verify")], config.fmt, out)
    return EXIT_MISMATCH


def cmd_simulate(config: RunConfig, out) -> int:
    ns = _require_n(config, [config.horizon])
    tables = []
    for n in ns:
        result = monte_carlo(config.model, config.words, n, config.args.samples, config.seed)
        stat = result["clump_count"]
        rows = [[v, f"{p:.15g}", f"{stat.standard_errors[v]:.15g}"] for v, p in stat.frequencies.items()]
        tables.append(Table(["value", "frequency", "standard_error"], rows, f"clump_count n={n}"))
        summary = [
            [name, f"{s.mean:.15g}", f"{s.mean_se:.15g}", f"{s.variance:.15g}", f"{s.variance_se:.15g}"]
            for name, s in result.statistics.items()
        ]
        tables.append(Table(["statistic", "mean", "mean_se", "variance", "variance_se"], summary,
                            f"moments n={n} samples={result.samples} seed={result.seed} generator=PCG64"))
    emit(tables, config.fmt, out)
    return 0


def cmd_asymptotics(config: RunConfig, out, err) -> int:
    _require_bernoulli(config, "asymptotics")
    if len(config.words) != 1:
        raise UsageError("asymptotics takes a single word")
    w = config.words[0]
    ns = _require_n(config, [200])
    k = config.k if config.k is not None else 0
    root = dominant_root(config.model, w)
    rows = []
    for n in ns:
        advisory = rare_word_advisory(config.model, w, n)
        if advisory:
            err.write(f"warning: {advisory}\n")
        c = poisson_approximation(config.model, w, n, k, root=root)
        exact = c.exact if c.exact is not None else None
        rows.append([
            n, k,
            rational_string(exact) if exact is not None else "",
            decimal_string(exact) if exact is not None else "",
            _mp(c.approximation), _mp(c.ratio) if c.ratio is not None else "",
            _mp(c.rho), _mp(c.quotient_at_rho), _mp(c.p_at_rho),
            "pre-asymptotic" if c.pre_asymptotic else "",
        ])
    emit([Table(["n", "k", "exact", "exact_decimal", "approximation", "ratio", "rho", "Q(rho)", "P(rho)", "flag"],
                rows, "")], config.fmt, out)
    return 0


def _mp(value) -> str:
    import mpmath

    return mpmath.nstr(value, 15)


def cmd_sizes(config: RunConfig, out) -> int:
    _require_bernoulli(config, "sizes")
    if len(config.words) != 1:
        raise UsageError("sizes takes a single word")
    w = config.words[0]
    law = clump_size_distribution(config.model, w, config.horizon)
    rows = [[s, weight] for s, weight in law.weights.items()]
    if not law.divergent:
        rows = [[s, weight, p, decimal_string(p)] for (s, weight), p in zip(rows, law.probabilities.values())]
    title = f"clump lengths of {w} ({law.interpretation}); normalization " + (
        rational_string(law.normalization) if not law.divergent else "divergent")
    emit([Table(["length", "weight", "probability", "decimal"], rows, title)], config.fmt, out)
    return 0


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", metavar="FILE", help="model file (default: uniform over a, b and the word letters)")
    common.add_argument("--words", metavar="W1,W2", help="comma-separated reduced word set")
    common.add_argument("--word", metavar="W", help="a single word")
    common.add_argument("--words-file", metavar="FILE", help="one word per line")
    common.add_argument("--format", choices=("tsv", "json"), default="tsv")

    lengths = argparse.ArgumentParser(add_help=False)
    lengths.add_argument("--n", type=int, metavar="INT")
    lengths.add_argument("--n-range", metavar="A..B")
    lengths.add_argument("--horizon", type=int, metavar="INT", help="default text length (20)")

    parser = argparse.ArgumentParser(prog="clumpstat", description="Exact clump statistics of words in random texts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("correlate", parents=[common], help="correlation, extension and prefix-code sets")
    p = sub.add_parser("gf", parents=[common], help="print generating functions")
    p.add_argument("--what", default="languages",
                   choices=("languages", "clumps", "clump_count", "kclumps", "coverage", "mean_clumps", "automaton"))
    p.add_argument("--k", type=int)
    sub.add_parser("moments", parents=[common, lengths], help="mean and variance of clump statistics")
    p = sub.add_parser("distribution", parents=[common, lengths], help="exact distribution table")
    p.add_argument("--statistic", default="clump_count", choices=("clump_count", "occurrences", "coverage"))
    p = sub.add_parser("kclumps", parents=[common, lengths], help="distribution of the number of k-clumps")
    p.add_argument("--k", type=int, default=1)
    sub.add_parser("coverage", parents=[common, lengths], help="covered positions")
    p = sub.add_parser("automaton", parents=[common], help="clump automaton as DOT, optionally its GF")
    p.add_argument("--dot", metavar="FILE")
    p.add_argument("--gf", action="store_true")
    p = sub.add_parser("verify", parents=[common, lengths], help="compare generating functions with enumeration")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p = sub.add_parser("simulate", parents=[common, lengths], help="seeded Monte Carlo estimates")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("asymptotics", parents=[common, lengths], help="dominant root and tail approximation")
    p.add_argument("--k", type=int, default=0)
    p = sub.add_parser("sizes", parents=[common, lengths], help="clump length law from the clump kernel")
    return parser


COMMANDS = {
    "correlate": cmd_correlate,
    "gf": cmd_gf,
    "moments": cmd_moments,
    "distribution": cmd_distribution,
    "kclumps": cmd_kclumps,
    "coverage": cmd_coverage,
    "automaton": cmd_automaton,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "sizes": cmd_sizes,
}


def dispatch(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    if config.command == "asymptotics":
        return cmd_asymptotics(config, out, err)
    return COMMANDS[config.command](config, out)


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        return dispatch(config, out, err)
    except ModelParseError as exc:
        err.write(f"clumpstat: parse error: {exc}\n")
        return EXIT_PARSE
    except UsageError as exc:
        err.write(f"clumpstat: {exc}\n")
        return EXIT_PARSE
    except (WordSetError, ModelError, BudgetExceeded) as exc:
        err.write(f"clumpstat: invalid input: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        err.write(f"clumpstat: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
