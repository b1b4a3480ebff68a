"""Language-specific emotion resources.

A resource directory holds plain UTF-8 text files (``#`` lines are comments):

=================  ==========================================================
``emotions.txt``   one emotion name per line, defines coordinate order
``lexicon.tsv``    ``emotion<TAB>word``
``intensity.tsv``  ``word<TAB>emotion<TAB>score`` with score in [0, 1]
``sentiment.tsv``  ``word<TAB>pos|neg[<TAB>score]``
``negation.txt``   ``word`` (value -1) or ``word<TAB>value``
``degree.tsv``     ``word<TAB>multiplier``
``emoticons.tsv``  ``emoticon<TAB>happy|angry|surprised|sad|neutral``
``pronouns.tsv``   ``word<TAB>first|second|third``
``categories.txt`` optional, labels of an external emotion classifier
=================  ==========================================================
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

LANGUAGES = ("en", "zh")
EMOTICON_CLASSES = ("happy", "angry", "surprised", "sad", "neutral")
PERSONS = ("first", "second", "third")
POLARITIES = ("positive", "negative")

_POLARITY_CODES = {"pos": "positive", "neg": "negative", "positive": "positive", "negative": "negative"}

DATA_DIR = Path(__file__).parent / "data"


class ResourceError(ValueError):
    """A resource file is missing or malformed."""

    def __init__(self, message: str, path: Path | str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)
        self.path = path
        self.line = line


def fixture_dir(language: str) -> Path:
    """Directory of the small resource bundle shipped with the package."""
    if language not in LANGUAGES:
        raise ValueError(f"unknown language {language!r}")
    return DATA_DIR / language


def _freeze(mapping: Mapping) -> MappingProxyType:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True, eq=False)
class ResourceBundle:
    language: str
    emotions: tuple[str, ...]
    emotion_lexicon: Mapping[str, frozenset[str]]
    intensity: Mapping[str, Mapping[str, float]]
    sentiment_words: Mapping[str, str]
    sentiment_scores: Mapping[str, float]
    negation_words: Mapping[str, float]
    degree_words: Mapping[str, float]
    emoticons: Mapping[str, str]
    pronouns: Mapping[str, frozenset[str]]
    categories: tuple[str, ...] = field(default=())

    @classmethod
    def build(cls, language: str, emotions, emotion_lexicon, intensity=None, sentiment_words=None,
              sentiment_scores=None, negation_words=None, degree_words=None, emoticons=None,
              pronouns=None, categories=()) -> "ResourceBundle":
        """Assemble an immutable bundle from plain dicts (no validation)."""
        sentiment_words = dict(sentiment_words or {})
        if sentiment_scores is None:
            sentiment_scores = {w: 1.0 if p == "positive" else -1.0 for w, p in sentiment_words.items()}
        pronouns = pronouns or {}
        return cls(
            language=language,
            emotions=tuple(emotions),
            emotion_lexicon=_freeze({e: frozenset(ws) for e, ws in emotion_lexicon.items()}),
            intensity=_freeze({w: _freeze(s) for w, s in (intensity or {}).items()}),
            sentiment_words=_freeze(sentiment_words),
            sentiment_scores=_freeze({w: float(s) for w, s in sentiment_scores.items()}),
            negation_words=_freeze({w: float(v) for w, v in (negation_words or {}).items()}),
            degree_words=_freeze({w: float(v) for w, v in (degree_words or {}).items()}),
            emoticons=_freeze(emoticons or {}),
            pronouns=_freeze({p: frozenset(pronouns.get(p, ())) for p in PERSONS}),
            categories=tuple(categories),
        )

    @property
    def d_e(self) -> int:
        return len(self.emotions)

    @cached_property
    def vocabulary(self) -> frozenset[str]:
        """Every word known to any table; drives Chinese maximum matching."""
        words: set[str] = set()
        for ws in self.emotion_lexicon.values():
            words.update(ws)
        words.update(self.intensity)
        words.update(self.sentiment_words)
        words.update(self.negation_words)
        words.update(self.degree_words)
        for ws in self.pronouns.values():
            words.update(ws)
        return frozenset(words)

    @cached_property
    def max_word_length(self) -> int:
        return max((len(w) for w in self.vocabulary), default=1)

    @cached_property
    def emoticon_pattern(self) -> re.Pattern | None:
        """Alternation of all emoticons, longest first.

        Emoticons that begin or end with a word character only match at a
        word boundary on that side, so ``:D`` never fires inside ``:Does``.
        """
        if not self.emoticons:
            return None
        parts = []
        for emo in sorted(self.emoticons, key=lambda s: (-len(s), s)):
            piece = re.escape(emo)
            if re.match(r"\w", emo[0]):
                piece = r"(?<!\w)" + piece
            if re.match(r"\w", emo[-1]):
                piece = piece + r"(?!\w)"
            parts.append(piece)
        return re.compile("|".join(parts))

    @cached_property
    def emotion_index(self) -> Mapping[str, tuple[int, ...]]:
        """word -> coordinates (into ``emotions``) of every emotion listing it."""
        index: dict[str, list[int]] = {}
        for k, e in enumerate(self.emotions):
            for w in self.emotion_lexicon.get(e, ()):
                index.setdefault(w, []).append(k)
        return MappingProxyType({w: tuple(ks) for w, ks in index.items()})

    def word_emotions(self, word: str) -> tuple[str, ...]:
        return tuple(self.emotions[k] for k in self.emotion_index.get(word, ()))

    def person_of(self, word: str) -> str | None:
        for person in PERSONS:
            if word in self.pronouns.get(person, ()):
                return person
        return None

    def _comparable(self):
        return (
            self.language,
            self.emotions,
            {e: frozenset(ws) for e, ws in self.emotion_lexicon.items()},
            {w: dict(s) for w, s in self.intensity.items()},
            dict(self.sentiment_words),
            dict(self.sentiment_scores),
            dict(self.negation_words),
            dict(self.degree_words),
            dict(self.emoticons),
            {p: frozenset(ws) for p, ws in self.pronouns.items()},
            self.categories,
        )

    def __eq__(self, other):
        if not isinstance(other, ResourceBundle):
            return NotImplemented
        return self._comparable() == other._comparable()

    __hash__ = None  # type: ignore[assignment]


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __iter__(self) -> Iterator[str]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def validate_resources(bundle: ResourceBundle) -> ValidationReport:
    """List every invariant violation of ``bundle``; an empty report means valid."""
    report = ValidationReport()
    add = report.violations.append

    if bundle.language not in LANGUAGES:
        add(f"unknown language {bundle.language!r}")
    if not bundle.emotions:
        add("emotion list is empty")
    seen: set[str] = set()
    for e in bundle.emotions:
        if e in seen:
            add(f"duplicate emotion {e!r}")
        seen.add(e)
    for e in bundle.emotion_lexicon:
        if e not in seen:
            add(f"lexicon emotion {e!r} not in emotion list")
    for word, scores in bundle.intensity.items():
        for e, s in scores.items():
            if word not in bundle.emotion_lexicon.get(e, ()):
                add(f"intensity word {word!r} not in lexicon for emotion {e!r}")
            if not (0.0 <= s <= 1.0) or math.isnan(s):
                add(f"intensity score {s!r} for {word!r}/{e!r} outside [0, 1]")
    for word, pol in bundle.sentiment_words.items():
        if pol not in POLARITIES:
            add(f"sentiment word {word!r} has unknown polarity {pol!r}")
    for word in bundle.sentiment_scores:
        if word not in bundle.sentiment_words:
            add(f"sentiment score for {word!r} without polarity entry")
    for word, v in bundle.negation_words.items():
        if v == 0 or math.isnan(v):
            add(f"negation value for {word!r} must be nonzero, got {v!r}")
    for word, v in bundle.degree_words.items():
        if not v > 0:
            add(f"degree multiplier for {word!r} must be > 0, got {v!r}")
    for emo, cls in bundle.emoticons.items():
        if cls not in EMOTICON_CLASSES:
            add(f"emoticon {emo!r} has unknown class {cls!r}")
    for person in bundle.pronouns:
        if person not in PERSONS:
            add(f"unknown pronoun person {person!r}")
    if len(set(bundle.categories)) != len(bundle.categories):
        add("duplicate classifier category label")
    return report


def _rows(path: Path, min_cols: int, max_cols: int) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = [c.strip() for c in line.split("\t")]
            if not (min_cols <= len(cols) <= max_cols) or not all(cols):
                raise ResourceError(f"expected {min_cols}-{max_cols} tab-separated fields, got {line!r}", path, lineno)
            yield lineno, cols


def _number(text: str, path: Path, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ResourceError(f"not a number: {text!r}", path, lineno) from None
    if math.isnan(value) or math.isinf(value):
        raise ResourceError(f"not a finite number: {text!r}", path, lineno)
    return value


_REQUIRED = {
    "emotions.txt": "emotion list",
    "lexicon.tsv": "emotion lexicon",
    "intensity.tsv": "intensity dictionary",
    "sentiment.tsv": "sentiment word list",
    "negation.txt": "negation word list",
    "degree.tsv": "degree word list",
    "emoticons.tsv": "emoticon table",
    "pronouns.tsv": "pronoun list",
}


def load_resources(dir_path: str | Path, language: str) -> ResourceBundle:
    """Load and validate the resource directory for ``language``.

    Raises :class:`ResourceError` naming file and line on any problem.
    """
    root = Path(dir_path)
    if language not in LANGUAGES:
        raise ResourceError(f"unknown language {language!r}")
    if not root.is_dir():
        raise ResourceError("resource directory not found", root)
    for name, what in _REQUIRED.items():
        if not (root / name).is_file():
            raise ResourceError(f"{what} not found", root / name)

    # English lookups are case-folded; Chinese text is matched verbatim.
    fold = str.casefold if language == "en" else (lambda s: s)

    path = root / "emotions.txt"
    emotions: list[str] = []
    for lineno, (name,) in _rows(path, 1, 1):
        if name in emotions:
            raise ResourceError(f"duplicate emotion name {name!r}", path, lineno)
        emotions.append(name)
    if not emotions:
        raise ResourceError("emotion list is empty", path)

    path = root / "lexicon.tsv"
    lexicon: dict[str, set[str]] = {e: set() for e in emotions}
    for lineno, (emotion, word) in _rows(path, 2, 2):
        if emotion not in lexicon:
            raise ResourceError(f"unknown emotion {emotion!r}", path, lineno)
        lexicon[emotion].add(fold(word))

    path = root / "intensity.tsv"
    intensity: dict[str, dict[str, float]] = {}
    for lineno, (word, emotion, score) in _rows(path, 3, 3):
        word = fold(word)
        if emotion not in lexicon:
            raise ResourceError(f"unknown emotion {emotion!r}", path, lineno)
        if word not in lexicon[emotion]:
            raise ResourceError(f"intensity word {word!r} absent from lexicon for {emotion!r}", path, lineno)
        value = _number(score, path, lineno)
        if not 0.0 <= value <= 1.0:
            raise ResourceError(f"intensity {value} outside [0, 1]", path, lineno)
        intensity.setdefault(word, {})[emotion] = value

    path = root / "sentiment.tsv"
    polarity: dict[str, str] = {}
    scores: dict[str, float] = {}
    for lineno, cols in _rows(path, 2, 3):
        word, code = fold(cols[0]), cols[1]
        if code not in _POLARITY_CODES:
            raise ResourceError(f"polarity must be pos or neg, got {code!r}", path, lineno)
        polarity[word] = _POLARITY_CODES[code]
        if len(cols) == 3:
            scores[word] = _number(cols[2], path, lineno)
        else:
            scores[word] = 1.0 if polarity[word] == "positive" else -1.0

    path = root / "negation.txt"
    negation: dict[str, float] = {}
    for lineno, cols in _rows(path, 1, 2):
        value = _number(cols[1], path, lineno) if len(cols) == 2 else -1.0
        if value == 0:
            raise ResourceError("negation value must be nonzero", path, lineno)
        negation[fold(cols[0])] = value

    path = root / "degree.tsv"
    degree: dict[str, float] = {}
    for lineno, (word, mult) in _rows(path, 2, 2):
        value = _number(mult, path, lineno)
        if value <= 0:
            raise ResourceError(f"degree multiplier must be > 0, got {value}", path, lineno)
        degree[fold(word)] = value

    path = root / "emoticons.tsv"
    emoticons: dict[str, str] = {}
    for lineno, (emo, cls) in _rows(path, 2, 2):
        if cls not in EMOTICON_CLASSES:
            raise ResourceError(f"unknown emoticon class {cls!r}", path, lineno)
        emoticons[emo] = cls

    path = root / "pronouns.tsv"
    pronouns: dict[str, set[str]] = {p: set() for p in PERSONS}
    for lineno, (word, person) in _rows(path, 2, 2):
        if person not in pronouns:
            raise ResourceError(f"unknown person {person!r}", path, lineno)
        pronouns[person].add(fold(word))

    categories: list[str] = []
    path = root / "categories.txt"
    if path.is_file():
        for lineno, (label,) in _rows(path, 1, 1):
            if label in categories:
                raise ResourceError(f"duplicate category {label!r}", path, lineno)
            categories.append(label)

    bundle = ResourceBundle.build(
        language, emotions, lexicon, intensity, polarity, scores,
        negation, degree, emoticons, pronouns, categories,
    )
    report = validate_resources(bundle)
    if not report.ok:
        raise ResourceError("; ".join(report.violations), root)
    return bundle


def load_fixture(language: str) -> ResourceBundle:
    """Load the bundle shipped with the package for ``language``."""
    return load_resources(fixture_dir(language), language)
