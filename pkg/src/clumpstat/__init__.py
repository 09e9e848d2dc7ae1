"""Exact clump statistics for words in Bernoulli and Markov random texts."""

__version__ = "0.1.0"

from .asymptotics import dominant_root, growth_rates, poisson_approximation
from .automaton import automaton_gf, build_clump_automaton, build_x_set, export_dot, run_transducer
from .clumps import clump_size_distribution, clump_statistics_gf, expected_clumps, expected_clumps_gf
from .correlation import autocorrelation_set, correlation_set, prefix_code, right_extension_set
from .crosscheck import compare_with_oracle
from .languages import multi_word_languages, single_word_languages
from .model import (
    Alphabet,
    ModelError,
    ModelParseError,
    ReducedWordSet,
    TextModel,
    WordSetError,
    load_model,
    parse_model,
    validate_reduced_set,
)
from .oracle import detect_clumps, exhaustive_distribution, monte_carlo, tally
from .symbolic import RationalFunction, series_coefficients

__all__ = [
    "Alphabet",
    "ModelError",
    "ModelParseError",
    "RationalFunction",
    "ReducedWordSet",
    "TextModel",
    "WordSetError",
    "autocorrelation_set",
    "automaton_gf",
    "build_clump_automaton",
    "build_x_set",
    "clump_size_distribution",
    "clump_statistics_gf",
    "compare_with_oracle",
    "correlation_set",
    "detect_clumps",
    "dominant_root",
    "exhaustive_distribution",
    "expected_clumps",
    "expected_clumps_gf",
    "export_dot",
    "growth_rates",
    "load_model",
    "monte_carlo",
    "multi_word_languages",
    "parse_model",
    "poisson_approximation",
    "prefix_code",
    "right_extension_set",
    "run_transducer",
    "series_coefficients",
    "single_word_languages",
    "tally",
    "validate_reduced_set",
]
