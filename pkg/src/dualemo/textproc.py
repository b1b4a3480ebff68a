"""Tokenization and surface statistics (emoticons, punctuation, letter case)."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .resources import EMOTICON_CLASSES, ResourceBundle

PUNCT_CLASSES = ("exclamation", "question", "ellipsis")

# English words keep inner apostrophes so "don't" stays one negation token.
_EN_WORD = re.compile(r"\w+(?:['’]\w+)*")
_WORD_CHAR = re.compile(r"\w")
_ASCII_RUN = re.compile(r"[A-Za-z0-9]+")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class SurfaceStats:
    emoticon_counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(EMOTICON_CLASSES, 0))
    punct_counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(PUNCT_CLASSES, 0))
    uppercase_letters: int = 0
    char_count: int = 0


def strip_emoticons(text: str, bundle: ResourceBundle) -> tuple[str, list[str]]:
    """Replace every emoticon by a space; return the cleaned text and the matches."""
    pattern = bundle.emoticon_pattern
    if pattern is None:
        return text, []
    found = pattern.findall(text)
    return pattern.sub(" ", text), found


def _forward_max_match(text: str, bundle: ResourceBundle) -> list[str]:
    vocab = bundle.vocabulary
    longest = bundle.max_word_length
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        for size in range(min(longest, n - i), 0, -1):
            piece = text[i:i + size]
            if piece in vocab:
                out.append(piece)
                i += size
                break
        else:
            run = _ASCII_RUN.match(text, i)
            if run:
                # latin words and numbers inside Chinese text stay whole
                out.append(run.group().casefold())
                i = run.end()
            else:
                out.append(text[i])
                i += 1
    return [t for t in out if _WORD_CHAR.search(t)]


def tokenize(text: str, language: str, bundle: ResourceBundle) -> TokenSequence:
    """Split ``text`` into lexicon-matchable tokens.

    English: word runs (with inner apostrophes), case-folded. Chinese: greedy
    forward maximum matching against the bundle vocabulary, one character
    at a time where nothing matches. Emoticons and standalone punctuation
    never become tokens.
    """
    if language != bundle.language:
        raise ValueError(f"bundle language {bundle.language!r} does not match {language!r}")
    if not text:
        return TokenSequence(())
    cleaned, _ = strip_emoticons(text, bundle)
    if language == "en":
        return TokenSequence(tuple(m.group().casefold() for m in _EN_WORD.finditer(cleaned)))
    return TokenSequence(tuple(_forward_max_match(cleaned, bundle)))


def scan_surface(text: str, bundle: ResourceBundle) -> SurfaceStats:
    """Count emoticon classes, punctuation marks and uppercase letters."""
    emoticons = dict.fromkeys(EMOTICON_CLASSES, 0)
    cleaned, found = strip_emoticons(text, bundle)
    for emo in found:
        emoticons[bundle.emoticons[emo]] += 1

    # "..." is counted in non-overlapping runs of three, before "…"
    punct = {
        "exclamation": cleaned.count("!") + cleaned.count("！"),
        "question": cleaned.count("?") + cleaned.count("？"),
        "ellipsis": cleaned.count("...") + cleaned.count("…"),
    }
    upper = sum(1 for ch in text if ch.isupper()) if bundle.language == "en" else 0
    return SurfaceStats(emoticons, punct, upper, len(text))
