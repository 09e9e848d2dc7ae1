"""Acceptance criteria 1-9.

Each ``criterion_N`` returns ``(passed, detail)`` without raising so the
outcome can be reported as one line; the matching ``test_criterion_N``
records that line and asserts it.  Run this file directly to print only the
nine lines.
"""

from __future__ import annotations

import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from clumpstat.asymptotics import (  # noqa: E402
    dominant_root,
    growth_rates,
    mean_slope_limit,
    poisson_approximation,
    poisson_tail_gf,
    u_coefficient,
)
from clumpstat.automaton import (  # noqa: E402
    automaton_gf,
    build_clump_automaton,
    build_x_set,
    clump_count_moments,
    run_transducer,
)
from clumpstat.clumps import clump_count_gf, clump_text_gf, expected_clumps_gf  # noqa: E402
from clumpstat.correlation import (  # noqa: E402
    autocorrelation_set,
    correlation_set,
    extension_matrix,
    prefix_code,
    prefix_code_by_trie,
    prefix_code_matrix,
)
from clumpstat.crosscheck import compare_with_oracle  # noqa: E402
from clumpstat.languages import occurrence_gf  # noqa: E402
from clumpstat.model import Alphabet, enumerate_texts  # noqa: E402
from clumpstat.oracle import (  # noqa: E402
    clump_definition_holds,
    detect_clumps,
    exhaustive_distribution,
    find_occurrences,
    monte_carlo,
    sample_texts,
    tally,
)
from clumpstat.symbolic import series_coefficients, series_values  # noqa: E402

from conftest import BIASED, CONFIGURATIONS, SINGLE_WORDS, STICKY, UNIFORM  # noqa: E402

BERNOULLI_MODELS = {"uniform": UNIFORM, "p(a)=1/3": BIASED}
RESULTS: dict[int, str] = {}


def _line(number: int, passed: bool, detail: str, seconds: float) -> str:
    return f"criterion {number}: {'PASS' if passed else 'FAIL'} ({seconds:.1f}s) {detail}"


def _record(number: int, outcome: tuple[bool, str], seconds: float) -> bool:
    passed, detail = outcome
    RESULTS[number] = _line(number, passed, detail, seconds)
    print(RESULTS[number])
    return passed


def _timed(fn):
    start = time.perf_counter()
    outcome = fn()
    return outcome, time.perf_counter() - start


# -- criterion 1 -----------------------------------------------------------------


def worked_example_checks() -> dict[str, bool]:
    abab_codes = prefix_code_matrix(["abab", "baba"])
    text = "bbbabababababbbbabaababb"
    return {
        "C(ababa,ababa)": correlation_set("ababa", "ababa") == {"", "ba", "baba"},
        "C(aabaa,aab)": correlation_set("aabaa", "aab") == {"b", "ab"},
        "K(abaabaaba)": prefix_code(autocorrelation_set("abaabaaba")) == {"aba", "baabaaba"}
        == prefix_code_by_trie("abaabaaba"),
        "K(aaaaa)": prefix_code(autocorrelation_set("aaaaa")) == {"a"} == prefix_code_by_trie("aaaaa"),
        "K(ababaccababa)": prefix_code(autocorrelation_set("ababaccababa"))
        == {"ccababa", "baccababa", "babaccababa"}
        == prefix_code_by_trie("ababaccababa"),
        "K12(aabaa,aaa)": prefix_code_matrix(["aabaa", "aaa"])[0][1] == {"a"},
        "C12(abab,baba)": correlation_set("abab", "baba") == {"a", "aba"},
        "C12 = a.C22": correlation_set("abab", "baba") == {"a" + e for e in correlation_set("baba", "baba")},
        "K12 = a.K22": abab_codes[0][1] == {"a" + e for e in abab_codes[1][1]},
        "E(aabaa,baab)": extension_matrix(["aabaa", "baab"]) == [[{"baa", "abaa"}, {"b"}], [{"aa"}, {"aab"}]],
        "X(bababa)": set(build_x_set(["bababa"])) == {"bababa", "babababa", "bababababa"},
        "X(aabaa,baab)": set(build_x_set(["aabaa", "baab"]))
        == {"aabaa", "aabaab", "aabaabaa", "aabaaabaa", "baab", "baabaa", "baabaab"},
        "11 states": len(build_clump_automaton(["bababa"], "ab").states) == 11,
        "20 states": len(build_clump_automaton(["aabaa", "baab"], "ab").states) == 20,
        "T spans": [c.length for c in detect_clumps(text, ["aba", "bba"])] == [11, 5, 3],
    }


# The example pair (abab, baba) states K12 = {a, aba} = a.K22.  With the
# prefix-free filter that the other K examples rely on, a is a prefix of
# aba, so K12 = {a} while a.K22 = {aba}; the identity that does hold is
# C12 = a.C22.
CONTRADICTORY = {"K12 = a.K22"}


def criterion_1():
    checks = worked_example_checks()
    failed = [name for name, ok in checks.items() if not ok]
    detail = f"{len(checks) - len(failed)}/{len(checks)} worked examples"
    if failed:
        detail += f"; failing: {', '.join(failed)}"
    return not failed, detail


# -- criterion 2 -----------------------------------------------------------------


def criterion_2(n_max: int = 12):
    bad, slowest = [], 0.0
    for model_name, model in BERNOULLI_MODELS.items():
        for words in CONFIGURATIONS:
            start = time.perf_counter()
            report = compare_with_oracle(model, words, n_max)
            slowest = max(slowest, time.perf_counter() - start)
            if not report.ok:
                m = report.mismatches[0]
                bad.append(f"{','.join(words)}/{model_name}: {m.statistic} n={m.n} value={m.value}")
    total = len(BERNOULLI_MODELS) * len(CONFIGURATIONS)
    detail = f"{total - len(bad)}/{total} configurations exact to n={n_max}; slowest {slowest:.2f}s"
    if slowest >= 60:
        bad.append("a configuration exceeded 60 s")
    return not bad, detail + ("; " + "; ".join(bad) if bad else "")


# -- criterion 3 -----------------------------------------------------------------


def criterion_3(horizon: int = 40):
    bad = []
    for model_name, model in BERNOULLI_MODELS.items():
        for w in SINGLE_WORDS:
            automaton = build_clump_automaton([w], "ab")
            pairs = {
                "occurrences": (automaton_gf(automaton, model, ("x",)), occurrence_gf(model, w), "x"),
                "clumps": (automaton_gf(automaton, model, ("u",)), clump_count_gf(model, w), "u"),
                "coverage": (automaton_gf(automaton, model, ("t",)), clump_text_gf(model, w).coverage(), "t"),
            }
            for name, (auto, lang, var) in pairs.items():
                a = series_coefficients(auto, horizon)
                b = series_coefficients(lang, horizon)
                if any(a.distribution(n, var) != b.distribution(n, var) for n in range(horizon + 1)):
                    bad.append(f"{w}/{model_name}/{name}")
    total = 3 * len(SINGLE_WORDS) * len(BERNOULLI_MODELS)
    return not bad, f"{total - len(bad)}/{total} marginal series identical to n={horizon}" + (
        f"; differing: {', '.join(bad)}" if bad else ""
    )


# -- criterion 4 -----------------------------------------------------------------


def criterion_4():
    bad = []
    for model_name, model in BERNOULLI_MODELS.items():
        for w in SINGLE_WORDS:
            closed = series_values(expected_clumps_gf(model, w), 40)
            derivative = series_values(clump_count_gf(model, w).diff("u").subs(u=1), 40)
            if closed != derivative:
                bad.append(f"{w}/{model_name}: closed form vs derivative")
            for n in range(13):
                if closed[n] != exhaustive_distribution(model, [w], n).mean():
                    bad.append(f"{w}/{model_name}: oracle n={n}")
                    break
    # Expanding the closed form gives Gamma_n = (n - |w| + 1) pi_w (1 - K(1)) + pi_w K'(1).
    # The variant that subtracts pi_w K'(1) gives (n - 2)/8 for aa instead of n/8;
    # the generating function is normative.
    aa = series_values(expected_clumps_gf(UNIFORM, "aa"), 50)
    if any(aa[n] != Fraction(n, 8) for n in range(2, 51)):
        bad.append("aa: Gamma_n != n/8")
    return not bad, "mean clump GF = derivative at u=1 = oracle (n<=12); aa uniform Gamma_n = n/8 for 2<=n<=50" + (
        "; " + "; ".join(bad) if bad else ""
    )


# -- criterion 5 -----------------------------------------------------------------


def criterion_5(words=("aa", "abaabaaba", "bababa")):
    bad = []
    for model_name, model in BERNOULLI_MODELS.items():
        for w in words:
            f = clump_count_gf(model, w)
            for k in range(1, 5):
                if u_coefficient(f, k) != poisson_tail_gf(model, w, k):
                    bad.append(f"{w}/{model_name}/k={k}")
    total = 4 * len(words) * len(BERNOULLI_MODELS)
    return not bad, f"{total - len(bad)}/{total} identities H_k = [u^k] O exact" + (
        f"; failing: {', '.join(bad)}" if bad else ""
    )


# -- criterion 6 -----------------------------------------------------------------


def criterion_6(w: str = "abababab", lengths=(100, 200, 400)):
    root = dominant_root(UNIFORM, w)
    bad, shown = [], []
    for k in (0, 1):
        ratios = [poisson_approximation(UNIFORM, w, n, k, root=root).ratio for n in lengths]
        gaps = [abs(r - 1) for r in ratios]
        shown.append(f"k={k}: " + ", ".join(f"{float(r):.6f}" for r in ratios))
        if not 0.5 <= ratios[-1] <= 2:
            bad.append(f"k={k} ratio at n={lengths[-1]} outside [0.5, 2]")
        if any(later > earlier for earlier, later in zip(gaps, gaps[1:])):
            bad.append(f"k={k} |ratio - 1| increases")
    return not bad, "; ".join(shown) + ("; " + "; ".join(bad) if bad else "")


# -- criterion 7 -----------------------------------------------------------------


def criterion_7(n_max: int = 1000, mc_length: int = 1000, samples: int = 10 ** 6, seed: int = 20240607):
    bad = []
    worst = 0.0
    configurations = [(name, model, words) for name, model in BERNOULLI_MODELS.items() for words in CONFIGURATIONS]
    configurations += [("markov", STICKY, words) for words in CONFIGURATIONS]
    for name, model, words in configurations:
        rates = growth_rates(model, words, n_max)
        worst = max(worst, rates.mean_residual, rates.variance_residual)
        if rates.mean_residual >= 1e-6 or rates.variance_residual >= 1e-6:
            bad.append(f"{','.join(words)}/{name}: residuals {rates.mean_residual:.2e}, {rates.variance_residual:.2e}")
        if model.is_bernoulli and len(words) == 1:
            if rates.mean_slope != float(mean_slope_limit(model, words[0])):
                bad.append(f"{words[0]}/{name}: slope {rates.mean_slope} != symbolic limit")
    # Markov: exact moments at n = mc_length against a seeded Monte Carlo run
    automaton = build_clump_automaton(["aa"], "ab")
    mean, var = clump_count_moments(automaton, STICKY, mc_length)[mc_length]
    est = monte_carlo(STICKY, ["aa"], mc_length, samples, seed, ks=())["clump_count"]
    z_mean = abs(est.mean - float(mean)) / est.mean_se
    z_var = abs(est.variance - float(var)) / est.variance_se
    if z_mean > 4 or z_var > 4:
        bad.append(f"Monte Carlo off by {z_mean:.2f} / {z_var:.2f} standard errors")
    detail = (
        f"{len(configurations)} configurations, worst residual {worst:.1e} at n={n_max}; "
        f"markov aa n={mc_length}: mean {z_mean:.2f} SE, variance {z_var:.2f} SE from {samples} samples"
    )
    return not bad, detail + ("; " + "; ".join(bad) if bad else "")


# -- criterion 8 -----------------------------------------------------------------


def criterion_8(n_max: int = 12, sets=(("aa",), ("aba",), ("aba", "bba"))):
    disagreements = 0
    texts = 0
    alphabet = Alphabet(("a", "b"))
    for words in sets:
        for n in range(n_max + 1):
            for text in enumerate_texts(alphabet, n):
                texts += 1
                occurrences = find_occurrences(text, words)
                clumps = detect_clumps(text, words)
                covered = sorted(o for c in clumps for o in c.occurrences)
                if covered != sorted(occurrences):
                    disagreements += 1
                elif not all(clump_definition_holds(text, words, c, occurrences) for c in clumps):
                    disagreements += 1
    return disagreements == 0, f"{texts} texts, {disagreements} disagreements"


# -- criterion 9 -----------------------------------------------------------------


def criterion_9(n_max: int = 10, samples: int = 1000, length: int = 200, seed: int = 9):
    mismatches = 0
    checked = 0
    alphabet = Alphabet(("a", "b"))
    for words in CONFIGURATIONS:
        automaton = build_clump_automaton(words, "ab")
        texts = [t for n in range(n_max + 1) for t in enumerate_texts(alphabet, n)]
        for model in (UNIFORM, BIASED, STICKY):
            texts += sample_texts(model, length, samples, seed)
        for text in texts:
            checked += 1
            if run_transducer(automaton, text) != tally(text, words):
                mismatches += 1
    return mismatches == 0, f"{checked} texts over {len(CONFIGURATIONS)} configurations, {mismatches} mismatches"


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


# -- pytest entry points ---------------------------------------------------------


def _run(number: int) -> bool:
    outcome, seconds = _timed(CRITERIA[number])
    return _record(number, outcome, seconds)


def test_criterion_1_consistent_examples():
    outcome, seconds = _timed(criterion_1)
    _record(1, outcome, seconds)
    failing = [name for name, ok in worked_example_checks().items() if not ok and name not in CONTRADICTORY]
    assert not failing
    assert seconds < 1


@pytest.mark.xfail(strict=True, reason="K12 = a.K22 for (abab, baba) contradicts the prefix-free filter")
def test_criterion_1_cross_code_relation():
    assert worked_example_checks()["K12 = a.K22"]


def test_criterion_2():
    assert _run(2)


def test_criterion_3():
    assert _run(3)


def test_criterion_4():
    assert _run(4)


def test_criterion_5():
    assert _run(5)


def test_criterion_6():
    assert _run(6)


def test_criterion_7():
    assert _run(7)


def test_criterion_8():
    assert _run(8)


def test_criterion_9():
    assert _run(9)


if __name__ == "__main__":
    outcomes = [_run(number) for number in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
