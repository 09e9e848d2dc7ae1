"""Alphabets, reduced word sets and exact letter models.

Words and texts are plain ``str`` objects whose characters are letters of
an :class:`Alphabet`.  Every probability is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence


class ModelError(ValueError):
    """Raised for malformed alphabets and probability models."""


class ModelParseError(ModelError):
    """A model file could not be parsed; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class WordSetError(ValueError):
    """Raised when a word list is not a valid reduced set.

    ``kind`` is one of ``"MinLength"``, ``"NotReduced"``, ``"Duplicate"``,
    ``"Empty"`` or ``"Alphabet"``.
    """

    def __init__(self, kind: str, message: str, pair: tuple[str, str] | None = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.pair = pair


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise ModelError("alphabet is empty")
        for a in letters:
            if not isinstance(a, str) or len(a) != 1:
                raise ModelError(f"letters must be single characters, got {a!r}")
        if len(set(letters)) != len(letters):
            raise ModelError(f"repeated letter in alphabet {''.join(letters)!r}")

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __contains__(self, letter: object) -> bool:
        return letter in self.letters

    def index(self, letter: str) -> int:
        return self.letters.index(letter)

    def check_word(self, word: str) -> None:
        for pos, a in enumerate(word, 1):
            if a not in self.letters:
                raise ModelError(f"symbol {a!r} at position {pos} of {word!r} is not in the alphabet")

    def __str__(self) -> str:
        return "".join(self.letters)


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise ModelError("probabilities must be exact (int, Fraction or 'num/den' string), not float")
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class TextModel:
    """Bernoulli or first-order Markov source over an alphabet.

    Build instances with :meth:`bernoulli`, :meth:`uniform` or :meth:`markov`.
    """

    alphabet: Alphabet
    kind: str
    letter_probs: Mapping[str, Fraction] | None = None
    initial_probs: Mapping[str, Fraction] | None = None
    transition_probs: Mapping[tuple[str, str], Fraction] | None = None

    @classmethod
    def bernoulli(cls, alphabet: Alphabet | str, probs: Mapping[str, object]) -> TextModel:
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        table = {}
        for a in alphabet:
            table[a] = _as_fraction(probs.get(a, 0))
        extra = set(probs) - set(alphabet.letters)
        if extra:
            raise ModelError(f"probabilities given for letters outside the alphabet: {sorted(extra)}")
        _check_distribution(table.values(), "letter probabilities")
        return cls(alphabet, "bernoulli", letter_probs=MappingProxyType(table))

    @classmethod
    def uniform(cls, alphabet: Alphabet | str) -> TextModel:
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        p = Fraction(1, len(alphabet))
        return cls.bernoulli(alphabet, {a: p for a in alphabet})

    @classmethod
    def markov(
        cls,
        alphabet: Alphabet | str,
        initial: Mapping[str, object],
        transitions: Mapping[tuple[str, str], object],
    ) -> TextModel:
        """``transitions[(a, b)]`` is the probability of ``b`` following ``a``."""
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        init = {a: _as_fraction(initial.get(a, 0)) for a in alphabet}
        _check_distribution(init.values(), "initial distribution")
        trans = {}
        for a in alphabet:
            row = {b: _as_fraction(transitions.get((a, b), 0)) for b in alphabet}
            _check_distribution(row.values(), f"transition row of {a!r}")
            trans.update({(a, b): p for b, p in row.items()})
        for a, b in transitions:
            if a not in alphabet or b not in alphabet:
                raise ModelError(f"transition ({a!r}, {b!r}) uses letters outside the alphabet")
        return cls(
            alphabet,
            "markov1",
            initial_probs=MappingProxyType(init),
            transition_probs=MappingProxyType(trans),
        )

    @property
    def is_bernoulli(self) -> bool:
        return self.kind == "bernoulli"

    def letter_prob(self, letter: str, previous: str | None = None) -> Fraction:
        """Probability of ``letter`` given the preceding letter (``None`` at the start)."""
        if letter not in self.alphabet:
            raise ModelError(f"symbol {letter!r} is not in the alphabet")
        if self.is_bernoulli:
            return self.letter_probs[letter]
        if previous is None:
            return self.initial_probs[letter]
        return self.transition_probs[(previous, letter)]

    @property
    def max_letter_prob(self) -> Fraction:
        self._require_bernoulli()
        return max(self.letter_probs.values())

    @property
    def min_letter_prob(self) -> Fraction:
        self._require_bernoulli()
        return min(self.letter_probs.values())

    def _require_bernoulli(self) -> None:
        if not self.is_bernoulli:
            raise ModelError("this operation needs a Bernoulli model")

    def __eq__(self, other):
        if not isinstance(other, TextModel):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.kind == other.kind
            and _plain(self.letter_probs) == _plain(other.letter_probs)
            and _plain(self.initial_probs) == _plain(other.initial_probs)
            and _plain(self.transition_probs) == _plain(other.transition_probs)
        )

    __hash__ = None

    def __reduce__(self):
        return (parse_model, (format_model(self),))

    def __str__(self) -> str:
        return format_model(self)


def _plain(mapping):
    return None if mapping is None else dict(mapping)


def _check_distribution(values: Iterable[Fraction], what: str) -> None:
    values = list(values)
    for p in values:
        if p < 0 or p > 1:
            raise ModelError(f"{what}: probability {p} outside [0, 1]")
    if sum(values) != 1:
        raise ModelError(f"{what} sum to {sum(values)}, not 1")


def word_probability(model: TextModel, word: str) -> Fraction:
    """Probability that a random text starts with ``word``.

    In the Bernoulli case this is the product of the letter probabilities;
    for a Markov source the first letter uses the initial distribution.
    """
    model.alphabet.check_word(word)
    prob = Fraction(1)
    previous = None
    for a in word:
        prob *= model.letter_prob(a, previous)
        if not prob:
            return prob
        previous = a
    return prob


text_probability = word_probability


@dataclass(frozen=True)
class ReducedWordSet:
    """A list of words none of which is a factor of another; use :func:`validate_reduced_set`."""

    words: tuple[str, ...]

    def __iter__(self) -> Iterator[str]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, i: int) -> str:
        return self.words[i]

    @property
    def letters(self) -> set[str]:
        return set("".join(self.words))

    def __str__(self) -> str:
        return ",".join(self.words)


def validate_reduced_set(words: Sequence[str] | str, alphabet: Alphabet | None = None) -> ReducedWordSet:
    if isinstance(words, ReducedWordSet):
        words = words.words
    elif isinstance(words, str):
        words = [words]
    words = tuple(words)
    if not words:
        raise WordSetError("Empty", "at least one word is required")
    for w in words:
        if len(w) < 2:
            raise WordSetError("MinLength", f"word {w!r} has length {len(w)} < 2")
        if alphabet is not None:
            try:
                alphabet.check_word(w)
            except ModelError as exc:
                raise WordSetError("Alphabet", str(exc)) from None
    seen = set()
    for w in words:
        if w in seen:
            raise WordSetError("Duplicate", f"word {w!r} appears twice")
        seen.add(w)
    for u in words:
        for v in words:
            if u != v and u in v:
                raise WordSetError("NotReduced", f"{u!r} is a factor of {v!r}", (u, v))
    return ReducedWordSet(words)


def enumerate_texts(alphabet: Alphabet, n: int, prefix: str = "") -> Iterator[str]:
    """All texts of length ``n`` starting with ``prefix``, in lexicographic alphabet order."""
    if n < len(prefix):
        return
    for tail in itertools.product(alphabet.letters, repeat=n - len(prefix)):
        yield prefix + "".join(tail)


# -- model files -------------------------------------------------------------

_RATIONAL = re.compile(r"^[+]?\d+(/\d+)?$")


def _parse_rational(token: str, line: int, column: int) -> Fraction:
    if not _RATIONAL.match(token):
        raise ModelParseError(f"expected a rational 'num/den' or integer, got {token!r}", line, column)
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise ModelParseError(f"zero denominator in {token!r}", line, column) from None


def parse_model(source: str) -> TextModel:
    """Parse the line-oriented model format.

    Example::

        alphabet: ab
        model: bernoulli
        p a = 1/3
        p b = 2/3

    Markov models use ``model: markov`` with ``init a = 1/2`` and
    ``trans a b = 1/4`` lines.  ``#`` starts a comment.
    """
    alphabet = None
    kind = None
    probs: dict[str, Fraction] = {}
    init: dict[str, Fraction] = {}
    trans: dict[tuple[str, str], Fraction] = {}
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        if ":" in body and "=" not in body:
            key, _, value = body.partition(":")
            key, value = key.strip(), value.strip()
            if key == "alphabet":
                try:
                    alphabet = Alphabet(tuple(value))
                except ModelError as exc:
                    raise ModelParseError(str(exc), lineno, indent + body.index(":") + 2) from None
            elif key == "model":
                if value not in ("bernoulli", "markov", "markov1"):
                    raise ModelParseError(f"unknown model kind {value!r}", lineno, indent + body.index(":") + 2)
                kind = "bernoulli" if value == "bernoulli" else "markov1"
            else:
                raise ModelParseError(f"unknown header {key!r}", lineno, indent + 1)
            continue
        lhs, eq, rhs = body.partition("=")
        if not eq:
            raise ModelParseError("expected 'key: value' or 'p|init|trans ... = value'", lineno, indent + 1)
        value = _parse_rational(rhs.strip(), lineno, indent + len(lhs) + 2 + (len(rhs) - len(rhs.lstrip())))
        parts = lhs.split()
        tag = parts[0] if parts else ""
        letters = parts[1:]
        expected = {"p": 1, "init": 1, "trans": 2}.get(tag)
        if expected is None:
            raise ModelParseError(f"unknown entry {tag!r}", lineno, indent + 1)
        if len(letters) != expected or any(len(a) != 1 for a in letters):
            raise ModelParseError(f"{tag!r} expects {expected} single-letter argument(s)", lineno, indent + len(tag) + 2)
        if tag == "p":
            probs[letters[0]] = value
        elif tag == "init":
            init[letters[0]] = value
        else:
            trans[(letters[0], letters[1])] = value
    if alphabet is None:
        raise ModelParseError("missing 'alphabet:' line", 1)
    if kind is None:
        kind = "markov1" if (init or trans) else "bernoulli"
    if kind == "bernoulli":
        if init or trans:
            raise ModelParseError("init/trans entries in a bernoulli model", 1)
        return TextModel.bernoulli(alphabet, probs)
    if probs:
        raise ModelParseError("'p' entries in a markov model", 1)
    return TextModel.markov(alphabet, init, trans)


def load_model(path) -> TextModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def format_model(model: TextModel) -> str:
    lines = [f"alphabet: {model.alphabet}"]
    if model.is_bernoulli:
        lines.append("model: bernoulli")
        lines += [f"p {a} = {model.letter_probs[a]}" for a in model.alphabet]
    else:
        lines.append("model: markov")
        lines += [f"init {a} = {model.initial_probs[a]}" for a in model.alphabet]
        lines += [
            f"trans {a} {b} = {model.transition_probs[(a, b)]}"
            for a in model.alphabet
            for b in model.alphabet
        ]
    return "\n".join(lines) + "\n"
