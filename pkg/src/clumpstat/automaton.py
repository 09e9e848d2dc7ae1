"""Marked clump automaton.

States are the prefixes of the word set X made of each word followed by
nothing or by one of its right extensions.  Reading a letter moves to the
longest suffix of (state + letter) that is again a state.  Every transition
is marked by looking at its target state only:

* one occurrence mark per word the target ends with;
* a new-clump mark when the target is a minimal element of X (prefix order);
* a coverage exponent ``|p| - |l(p)|`` when the target ``p`` ends with a
  word, where ``l(p)`` is the longest proper prefix of ``p`` ending with a
  word (or the empty word).

In generating functions, occurrences are marked by ``x`` (``x1 .. xr`` for
several words), new clumps by ``u`` and covered positions by ``t``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .correlation import right_extension_set
from .languages import occurrence_vars
from .model import Alphabet, ReducedWordSet, TextModel, validate_reduced_set
from .oracle import Tally
from .symbolic import (
    CONTEXT,
    RationalFunction,
    monomial,
    poly,
    solve_linear,
    to_fmpq,
    to_fraction,
)


@dataclass(frozen=True)
class XSet:
    words: tuple[str, ...]
    elements: tuple[str, ...]  # sorted by length, then text

    def __contains__(self, word: str) -> bool:
        return word in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)


def build_x_set(words: ReducedWordSet | Sequence[str]) -> XSet:
    words = validate_reduced_set(words).words
    elements = set(words)
    for a in words:
        for b in words:
            elements.update(a + e for e in right_extension_set(a, b))
    return XSet(tuple(words), tuple(sorted(elements, key=lambda s: (len(s), s))))


@dataclass(frozen=True)
class StateMarks:
    occurrences: tuple[int, ...]  # indices of the words the state ends with
    new_clump: bool
    coverage: int


@dataclass(frozen=True)
class ClumpAutomaton:
    """Complete deterministic automaton on the prefixes of an :class:`XSet`.

    ``states[0]`` is the empty word; ``delta[s][a]`` is the target of state
    ``s`` on the ``a``-th letter of the alphabet.
    """

    alphabet: Alphabet
    xset: XSet
    states: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    marks: tuple[StateMarks, ...]
    final: frozenset[int]

    @property
    def words(self) -> tuple[str, ...]:
        return self.xset.words

    def index(self, state: str) -> int:
        return self.states.index(state)

    def step(self, state: int, letter: str) -> int:
        return self.delta[state][self.alphabet.index(letter)]

    @property
    def transitions(self) -> list[tuple[int, str, int]]:
        return [
            (s, a, self.delta[s][i])
            for s in range(len(self.states))
            for i, a in enumerate(self.alphabet)
        ]


def _longest_proper_prefix_ending_with_word(p: str, words: Sequence[str]) -> str:
    for cut in range(len(p) - 1, 0, -1):
        if any(p.endswith(w, 0, cut) for w in words):
            return p[:cut]
    return ""


def build_clump_automaton(
    xset: XSet | ReducedWordSet | Sequence[str], alphabet: Alphabet | str | None = None
) -> ClumpAutomaton:
    """Build states, transitions, final states and marks.

    Without an explicit alphabet, the letters of the words are used in order
    of first appearance.
    """
    if not isinstance(xset, XSet):
        xset = build_x_set(xset)
    if alphabet is None:
        alphabet = Alphabet(tuple(dict.fromkeys("".join(xset.words))))
    elif not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    for w in xset.words:
        alphabet.check_word(w)
    order = {a: i for i, a in enumerate(alphabet)}
    prefixes = {x[:k] for x in xset for k in range(len(x) + 1)}
    states = tuple(sorted(prefixes, key=lambda s: (len(s), [order[a] for a in s])))
    index = {s: i for i, s in enumerate(states)}

    def target(p: str) -> int:
        for k in range(len(p) + 1):
            if p[k:] in index:
                return index[p[k:]]
        raise AssertionError("the empty word is always a state")

    delta = tuple(tuple(target(s + a) for a in alphabet) for s in states)
    elements = set(xset.elements)
    final = frozenset(
        index[x] for x in elements if not any(y != x and x.startswith(y) for y in elements)
    )
    marks = []
    for i, p in enumerate(states):
        ends = tuple(j for j, w in enumerate(xset.words) if p.endswith(w))
        coverage = len(p) - len(_longest_proper_prefix_ending_with_word(p, xset.words)) if ends else 0
        marks.append(StateMarks(ends, i in final, coverage))
    return ClumpAutomaton(alphabet, xset, states, delta, tuple(marks), final)


# -- running on texts ----------------------------------------------------------


def run_transducer(a: ClumpAutomaton, text: str) -> Tally:
    """Walk the automaton from the empty state and add up the marks."""
    a.alphabet.check_word(text)
    state = 0
    counts = [0] * len(a.words)
    sizes: list[int] = []
    coverage = 0
    for letter in text:
        state = a.step(state, letter)
        m = a.marks[state]
        if m.new_clump:
            sizes.append(0)
        for j in m.occurrences:
            counts[j] += 1
            sizes[-1] += 1
        coverage += m.coverage
    return Tally(tuple(counts), len(sizes), coverage, tuple(sizes))


# -- generating functions ------------------------------------------------------

ALL_MARKS = ("x", "t", "u")


def _mark_monomial(a: ClumpAutomaton, state: int, marks: Sequence[str]):
    m = a.marks[state]
    exps: dict[str, int] = {}
    if "x" in marks:
        names = occurrence_vars(len(a.words))
        for j in m.occurrences:
            exps[names[j]] = exps.get(names[j], 0) + 1
    if "u" in marks and m.new_clump:
        exps["u"] = 1
    if "t" in marks and m.coverage:
        exps["t"] = m.coverage
    return exps


def _weighted_graph(a: ClumpAutomaton, model: TextModel):
    """States of the weighted chain and their outgoing ``(target, letter, probability)`` edges.

    Bernoulli: the automaton states themselves.  Markov: pairs (state, last
    letter) reachable from (empty word, no letter), since the automaton may
    return to the empty state after reading a letter.
    """
    if model.alphabet != a.alphabet:
        raise ValueError("model and automaton use different alphabets")
    letters = a.alphabet.letters
    if model.is_bernoulli:
        nodes = [(s, None) for s in range(len(a.states))]
        edges = [
            [(a.delta[s][i], letters[i], model.letter_prob(letters[i])) for i in range(len(letters))]
            for s in range(len(a.states))
        ]
        return nodes, [[(t, c, p) for t, c, p in row if p] for row in edges]
    start = (0, None)
    nodes, index, edges = [start], {start: 0}, []
    queue = deque([start])
    while queue:
        s, prev = queue.popleft()
        row = []
        for i, c in enumerate(letters):
            p = model.letter_prob(c, prev)
            if not p:
                continue
            node = (a.delta[s][i], c)
            if node not in index:
                index[node] = len(nodes)
                nodes.append(node)
                queue.append(node)
            row.append((index[node], c, p))
        edges.append(row)
    return nodes, edges


def _edge_weight(a, node_state: int, p: Fraction, marks: Sequence[str]) -> RationalFunction:
    return RationalFunction(monomial(p, z=1, **_mark_monomial(a, node_state, marks)))


def automaton_gf(
    a: ClumpAutomaton, model: TextModel, marks: Sequence[str] = ALL_MARKS
) -> RationalFunction:
    """Generating function of all texts, by length and the requested marks.

    Solves ``f_s = 1 + sum over letters of weight * f_target`` for every
    state and returns ``f`` at the initial state.
    """
    unknown = set(marks) - set(ALL_MARKS)
    if unknown:
        raise ValueError(f"unknown marks {sorted(unknown)}")
    nodes, edges = _weighted_graph(a, model)
    n = len(nodes)
    system = [[RationalFunction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for i, row in enumerate(edges):
        for j, _, p in row:
            system[i][j] = system[i][j] - _edge_weight(a, nodes[j][0], p, marks)
    solution = solve_linear(system, [[RationalFunction(1)] for _ in range(n)])
    return solution[0][0]


def accepted_language_gf(a: ClumpAutomaton, model: TextModel) -> RationalFunction:
    """Texts that end at their first visit to a final state, by length.

    These are the texts ending with the first occurrence of a word, so for a
    single word this is the right-language generating function.
    """
    nodes, edges = _weighted_graph(a, model)
    n = len(nodes)
    z = RationalFunction.var("z")
    system = [[RationalFunction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    rhs = [[RationalFunction(0)] for _ in range(n)]
    for i, row in enumerate(edges):
        for j, _, p in row:
            if nodes[j][0] in a.final:
                rhs[i][0] = rhs[i][0] + p * z
            else:
                system[i][j] = system[i][j] - p * z
    return solve_linear(system, rhs)[0][0]


def automaton_series(
    a: ClumpAutomaton, model: TextModel, horizon: int, marks: Sequence[str] = ALL_MARKS
) -> list:
    """Coefficients of ``z^0 .. z^horizon`` of :func:`automaton_gf` by forward propagation.

    Each coefficient is a polynomial in the requested marks.
    """
    nodes, edges = _weighted_graph(a, model)
    weights = [
        [(j, poly(monomial(p, **_mark_monomial(a, nodes[j][0], marks)))) for j, _, p in row]
        for row in edges
    ]
    zero = CONTEXT.constant(0)
    current = [zero] * len(nodes)
    current[0] = CONTEXT.constant(1)
    out = [current[0]]
    for _ in range(horizon):
        nxt = [zero] * len(nodes)
        for i, vec in enumerate(current):
            if vec.is_zero():
                continue
            for j, w in weights[i]:
                nxt[j] = nxt[j] + vec * w
        current = nxt
        out.append(sum(current, zero))
    return out


def clump_count_moments(a: ClumpAutomaton, model: TextModel, n_max: int) -> list[tuple[Fraction, Fraction]]:
    """Exact mean and variance of the clump count for ``n = 0 .. n_max`` by forward propagation.

    Tracks, per chain state, the probability mass and the first two moments
    of the count accumulated so far.
    """
    nodes, edges = _weighted_graph(a, model)
    size = len(nodes)
    flags = [1 if a.marks[s].new_clump else 0 for s, _ in nodes]
    edges = [[(j, to_fmpq(p)) for j, _, p in row] for row in edges]
    zero = to_fmpq(0)
    mass = [zero] * size
    first = [zero] * size
    second = [zero] * size
    mass[0] = to_fmpq(1)
    out = [(Fraction(0), Fraction(0))]
    for _ in range(n_max):
        m2, f2, s2 = [zero] * size, [zero] * size, [zero] * size
        for i in range(size):
            if mass[i] == 0:
                continue
            for j, p in edges[i]:
                c = flags[j]
                m2[j] += p * mass[i]
                f2[j] += p * (first[i] + c * mass[i])
                s2[j] += p * (second[i] + 2 * c * first[i] + c * mass[i])
        mass, first, second = m2, f2, s2
        mean = sum(first, zero)
        out.append((to_fraction(mean), to_fraction(sum(second, zero) - mean * mean)))
    return out


# -- DOT -----------------------------------------------------------------------


def _dot_marks(a: ClumpAutomaton, state: int) -> str:
    """Edge annotation: occurrences, then ``t`` for a new clump, then ``u^k``."""
    m = a.marks[state]
    parts = []
    names = ("x",) if len(a.words) == 1 else tuple(f"x{i + 1}" for i in range(len(a.words)))
    parts.extend(names[j] for j in m.occurrences)
    if m.new_clump:
        parts.append("t")
    if m.coverage == 1:
        parts.append("u")
    elif m.coverage > 1:
        parts.append(f"u^{m.coverage}")
    return " ".join(parts)


def _dot_escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(a: ClumpAutomaton) -> str:
    """Deterministic Graphviz rendering.

    Nodes are labelled by their word (``<eps>`` for the empty word), states
    of X get a ``+`` suffix and final states a double circle.  Edge labels
    list the letter followed by the marks, e.g. ``a [x t u^6]``; in this
    rendering ``t`` flags a new clump and ``u^k`` counts covered positions.
    """
    xset = set(a.xset.elements)
    lines = ["digraph clump_automaton {", "  rankdir=LR;", "  node [shape=circle];"]
    for i, s in enumerate(a.states):
        label = s if s else "<eps>"
        if s in xset:
            label += "+"
        shape = ', shape=doublecircle' if i in a.final else ""
        lines.append(f'  n{i} [label="{_dot_escape(label)}"{shape}];')
    lines.append('  start [shape=point];')
    lines.append("  start -> n0;")
    for s, c, t in a.transitions:
        marks = _dot_marks(a, t)
        label = f"{c} [{marks}]" if marks else c
        lines.append(f'  n{s} -> n{t} [label="{_dot_escape(label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ALL_MARKS",
    "ClumpAutomaton",
    "StateMarks",
    "XSet",
    "accepted_language_gf",
    "automaton_gf",
    "automaton_series",
    "build_clump_automaton",
    "build_x_set",
    "clump_count_moments",
    "export_dot",
    "run_transducer",
]
