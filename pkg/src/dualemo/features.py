"""Publisher emotion, social emotion, emotion gap and the two baseline feature sets.

A publisher-emotion vector has ``d = d_f + 2*d_e + d_s + d_a`` coordinates laid
out as ``category | lexicon | intensity | sentiment | auxiliary``. The dual
vector concatenates ``publisher | social_mean | social_max | gap_mean | gap_max``
for a total of ``5*d``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .resources import EMOTICON_CLASSES, PERSONS, ResourceBundle
from .textproc import PUNCT_CLASSES, SurfaceStats, TokenSequence, scan_surface, tokenize

logger = logging.getLogger(__name__)

SENTIMENT_MODES = ("score", "polarity", "precomputed")
CATEGORY_MODES = ("lexicon_vote", "precomputed")
SEGMENTS = ("category", "lexicon", "intensity", "sentiment", "auxiliary")
DUAL_SEGMENTS = ("publisher", "social_mean", "social_max", "gap_mean", "gap_max")

NORMALIZATION_TOLERANCE = 1e-6


class DimensionError(ValueError):
    pass


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureConfig:
    window: int = 2
    comments_limit: int = 100
    # score: one lexicon score; polarity: (pos, neg, neu, compound);
    # precomputed: vectors supplied with the data, ``sentiment_dims`` long
    sentiment_mode: str = "score"
    sentiment_dims: int = 1

    def __post_init__(self):
        if self.window < 0:
            raise ValueError("window must be >= 0")
        if self.comments_limit < 1:
            raise ValueError("comments_limit must be >= 1")
        if self.sentiment_mode not in SENTIMENT_MODES:
            raise ValueError(f"sentiment_mode must be one of {SENTIMENT_MODES}")
        if self.sentiment_dims < 1:
            raise ValueError("sentiment_dims must be >= 1")

    @property
    def d_s(self) -> int:
        if self.sentiment_mode == "score":
            return 1
        if self.sentiment_mode == "polarity":
            return 4
        return self.sentiment_dims


@dataclass(frozen=True)
class ClassifierAdapter:
    """Source of the emotion-category probabilities ``f(T)``.

    ``precomputed`` ingests probability vectors produced by an external
    classifier; ``lexicon_vote`` normalizes lexicon hit counts and appends a
    ``none`` coordinate.
    """

    mode: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.mode not in CATEGORY_MODES:
            raise ValueError(f"mode must be one of {CATEGORY_MODES}")
        if not self.labels:
            raise ValueError("adapter needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate adapter labels")

    @classmethod
    def lexicon_vote(cls, bundle: ResourceBundle) -> "ClassifierAdapter":
        return cls("lexicon_vote", tuple(bundle.emotions) + ("none",))

    @classmethod
    def precomputed(cls, labels: Sequence[str]) -> "ClassifierAdapter":
        return cls("precomputed", tuple(labels))

    @property
    def d_f(self) -> int:
        return len(self.labels)

    @property
    def none_label(self) -> str:
        return "none" if "none" in self.labels else self.labels[-1]


def aux_dim(language: str) -> int:
    return len(EMOTICON_CLASSES) + len(PUNCT_CLASSES) + 4 + len(PERSONS) + (1 if language == "en" else 0)


def feature_dim(bundle: ResourceBundle, adapter: ClassifierAdapter, config: FeatureConfig) -> int:
    """``d = d_f + 2*d_e + d_s + d_a``."""
    return adapter.d_f + 2 * bundle.d_e + config.d_s + aux_dim(bundle.language)


@dataclass(frozen=True)
class EmotionVector:
    values: np.ndarray
    layout: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if sum(n for _, n in self.layout) != len(self.values):
            raise DimensionError("layout does not match vector length")

    def __len__(self) -> int:
        return len(self.values)

    def segment(self, name: str) -> np.ndarray:
        start = 0
        for seg, n in self.layout:
            if seg == name:
                return self.values[start:start + n]
            start += n
        raise KeyError(name)


@dataclass(frozen=True)
class SocialEmotionVector:
    mean_pool: np.ndarray
    max_pool: np.ndarray
    n_comments: int = 0

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.mean_pool, self.max_pool])


@dataclass(frozen=True)
class DualEmotionVector:
    publisher: EmotionVector
    social: SocialEmotionVector
    gap: np.ndarray

    @property
    def d(self) -> int:
        return len(self.publisher)

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.publisher.values, self.social.mean_pool, self.social.max_pool, self.gap])

    def segments(self) -> dict[str, np.ndarray]:
        d = self.d
        return {
            "publisher": self.publisher.values,
            "social_mean": self.social.mean_pool,
            "social_max": self.social.max_pool,
            "gap_mean": self.gap[:d],
            "gap_max": self.gap[d:],
        }


# -- word level --------------------------------------------------------------

def _modifier_product(tokens: Sequence[str], i: int, bundle: ResourceBundle, window: int) -> float:
    neg = 1.0
    deg = 1.0
    for j in range(max(0, i - window), i):
        neg *= bundle.negation_words.get(tokens[j], 1.0)
        deg *= bundle.degree_words.get(tokens[j], 1.0)
    return neg * deg


def word_emotion_score(tokens: TokenSequence | Sequence[str], i: int, emotion: str,
                       bundle: ResourceBundle, window: int = 2) -> float:
    """Score of the ``i``-th token for ``emotion``.

    Lexicon indicator times the negation and degree products over the
    ``window`` tokens to the left, divided by the text length.
    """
    toks = tuple(tokens)
    if not 0 <= i < len(toks):
        raise IndexError(f"token index {i} out of range for length {len(toks)}")
    if window < 0:
        raise ValueError("window must be >= 0")
    if toks[i] not in bundle.emotion_lexicon.get(emotion, ()):
        return 0.0
    return _modifier_product(toks, i, bundle, window) / len(toks)


def _lexicon_and_intensity(tokens: Sequence[str], bundle: ResourceBundle, window: int):
    lex = np.zeros(bundle.d_e)
    inten = np.zeros(bundle.d_e)
    n = len(tokens)
    index = bundle.emotion_index
    for i, tok in enumerate(tokens):
        hits = index.get(tok)
        if not hits:
            continue
        score = _modifier_product(tokens, i, bundle, window) / n
        weights = bundle.intensity.get(tok, {})
        for k in hits:
            lex[k] += score
            inten[k] += weights.get(bundle.emotions[k], 0.0) * score
    return lex, inten


def lexicon_features(tokens: TokenSequence | Sequence[str], bundle: ResourceBundle, window: int = 2) -> np.ndarray:
    return _lexicon_and_intensity(tuple(tokens), bundle, window)[0]


def intensity_features(tokens: TokenSequence | Sequence[str], bundle: ResourceBundle, window: int = 2) -> np.ndarray:
    return _lexicon_and_intensity(tuple(tokens), bundle, window)[1]


# -- text level --------------------------------------------------------------

def sentiment_score(tokens: TokenSequence | Sequence[str], bundle: ResourceBundle, mode: str = "score",
                    precomputed: Sequence[float] | None = None, dims: int | None = None) -> np.ndarray:
    """Coarse sentiment of the text.

    ``score`` sums matched sentiment scores over the token count (``d_s = 1``).
    ``polarity`` returns ``[pos, neg, neu, compound]`` shares, with compound
    squashed as ``x / sqrt(x**2 + 15)``. ``precomputed`` passes an external
    vector through after a dimension check.
    """
    if mode == "precomputed":
        if precomputed is None:
            raise DimensionError("precomputed sentiment vector missing")
        vec = np.asarray(precomputed, dtype=float)
        if vec.ndim != 1 or (dims is not None and len(vec) != dims):
            raise DimensionError(f"sentiment vector has shape {vec.shape}, expected ({dims},)")
        return vec.copy()

    toks = tuple(tokens)
    if mode == "score":
        if not toks:
            return np.zeros(1)
        return np.array([sum(bundle.sentiment_scores.get(t, 0.0) for t in toks) / len(toks)])

    if mode != "polarity":
        raise ValueError(f"unknown sentiment mode {mode!r}")
    if not toks:
        return np.zeros(4)
    pos = neg = neu = total = 0.0
    for t in toks:
        s = bundle.sentiment_scores.get(t)
        if s is None or s == 0:
            neu += 1.0
            continue
        total += s
        if s > 0:
            pos += s
        else:
            neg -= s
    mass = pos + neg + neu
    return np.array([pos / mass, neg / mass, neu / mass, total / math.sqrt(total * total + 15.0)])


def auxiliary_features(tokens: TokenSequence | Sequence[str], surface: SurfaceStats, bundle: ResourceBundle) -> np.ndarray:
    """Symbol- and word-usage frequencies.

    Emoticon, punctuation and uppercase frequencies are divided by the
    character count; word-family and pronoun frequencies by the token count.
    """
    toks = tuple(tokens)
    n_tok = len(toks)
    n_chr = surface.char_count

    def per_char(count: int) -> float:
        return count / n_chr if n_chr else 0.0

    def per_token(count: int) -> float:
        return count / n_tok if n_tok else 0.0

    values = [per_char(surface.emoticon_counts.get(c, 0)) for c in EMOTICON_CLASSES]
    values += [per_char(surface.punct_counts.get(p, 0)) for p in PUNCT_CLASSES]
    values += [
        per_token(sum(1 for t in toks if bundle.sentiment_words.get(t) == "positive")),
        per_token(sum(1 for t in toks if bundle.sentiment_words.get(t) == "negative")),
        per_token(sum(1 for t in toks if t in bundle.degree_words)),
        per_token(sum(1 for t in toks if t in bundle.negation_words)),
    ]
    values += [per_token(sum(1 for t in toks if t in bundle.pronouns.get(p, ()))) for p in PERSONS]
    if bundle.language == "en":
        values.append(per_char(surface.uppercase_letters))
    return np.array(values, dtype=float)


def normalize_probabilities(probs: Sequence[float], d_f: int) -> np.ndarray:
    vec = np.asarray(probs, dtype=float)
    if vec.shape != (d_f,):
        raise DimensionError(f"category vector has shape {vec.shape}, expected ({d_f},)")
    if not np.all(np.isfinite(vec)) or np.any(vec < 0):
        raise CategoryError("category probabilities must be finite and nonnegative")
    total = float(vec.sum())
    if total <= 0:
        raise CategoryError("category probabilities sum to zero")
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        logger.warning("category probabilities sum to %.6g; renormalizing", total)
    return vec / total


def emotion_category(tokens: TokenSequence | Sequence[str], adapter: ClassifierAdapter,
                     bundle: ResourceBundle | None = None,
                     precomputed: Sequence[float] | None = None) -> np.ndarray:
    if adapter.mode == "precomputed":
        if precomputed is None:
            raise CategoryError("precomputed adapter needs a probability vector")
        return normalize_probabilities(precomputed, adapter.d_f)

    if bundle is None:
        raise CategoryError("lexicon_vote adapter needs a resource bundle")
    if adapter.d_f != bundle.d_e + 1:
        raise DimensionError("lexicon_vote adapter does not match the bundle's emotions")
    counts = np.zeros(adapter.d_f)
    index = bundle.emotion_index
    for tok in tokens:
        for k in index.get(tok, ()):
            counts[k] += 1.0
    total = counts.sum()
    if total == 0:
        counts[-1] = 1.0
        return counts
    return counts / total


def publisher_emotion(text: str, bundle: ResourceBundle, adapter: ClassifierAdapter,
                      config: FeatureConfig | None = None,
                      category_probs: Sequence[float] | None = None,
                      sentiment: Sequence[float] | None = None) -> EmotionVector:
    config = config or FeatureConfig()
    tokens = tokenize(text, bundle.language, bundle)
    surface = scan_surface(text, bundle)
    lex, inten = _lexicon_and_intensity(tokens.tokens, bundle, config.window)
    parts = [
        emotion_category(tokens, adapter, bundle, category_probs),
        lex,
        inten,
        sentiment_score(tokens, bundle, config.sentiment_mode, sentiment, config.d_s),
        auxiliary_features(tokens, surface, bundle),
    ]
    layout = tuple((name, len(p)) for name, p in zip(SEGMENTS, parts))
    return EmotionVector(np.concatenate(parts), layout)


# -- comments ----------------------------------------------------------------

def earliest_indices(timestamps: Sequence[int | None], limit: int) -> list[int]:
    """Indices of the ``limit`` earliest items; ties keep input order."""
    order = sorted(range(len(timestamps)),
                   key=lambda k: (math.inf if timestamps[k] is None else timestamps[k], k))
    return order[:limit]


def pool(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise mean and max of a stack of vectors.

    The mean is taken around the componentwise minimum with an exactly
    rounded sum, so it does not depend on row order and equals the common
    row when all rows are identical.
    """
    if rows.shape[0] == 0:
        return np.zeros(rows.shape[1]), np.zeros(rows.shape[1])
    base = rows.min(axis=0)
    shifted = rows - base
    n = rows.shape[0]
    mean = base + np.array([math.fsum(col) for col in shifted.T]) / n
    top = rows.max(axis=0)
    return np.clip(mean, base, top), top


def _comment_parts(comment: Any) -> tuple[str, int | None]:
    if isinstance(comment, str):
        return comment, None
    if isinstance(comment, dict):
        return comment["text"], comment.get("timestamp")
    if isinstance(comment, (tuple, list)):
        return comment[0], comment[1]
    return comment.text, comment.timestamp


def social_emotion(comments: Sequence[Any], bundle: ResourceBundle, adapter: ClassifierAdapter,
                   config: FeatureConfig | None = None,
                   comment_probs: Sequence[Sequence[float]] | None = None,
                   comment_sentiments: Sequence[Sequence[float]] | None = None) -> SocialEmotionVector:
    """Mean and max pooling over the earliest ``comments_limit`` comments.

    ``comments`` items may be strings, ``(text, timestamp)`` pairs, dicts or
    objects with ``text``/``timestamp`` attributes. No comments gives two zero
    pools.
    """
    config = config or FeatureConfig()
    d = feature_dim(bundle, adapter, config)
    parts = [_comment_parts(c) for c in comments]
    if comment_probs is not None and len(comment_probs) != len(parts):
        raise DimensionError("comment probabilities are not aligned with comments")
    if comment_sentiments is not None and len(comment_sentiments) != len(parts):
        raise DimensionError("comment sentiments are not aligned with comments")

    chosen = earliest_indices([ts for _, ts in parts], config.comments_limit)
    rows = np.zeros((len(chosen), d))
    for r, k in enumerate(chosen):
        rows[r] = publisher_emotion(
            parts[k][0], bundle, adapter, config,
            None if comment_probs is None else comment_probs[k],
            None if comment_sentiments is None else comment_sentiments[k],
        ).values
    mean, mx = pool(rows)
    return SocialEmotionVector(mean, mx, len(chosen))


def emotion_gap(publisher: EmotionVector | np.ndarray, social: SocialEmotionVector) -> np.ndarray:
    pub = publisher.values if isinstance(publisher, EmotionVector) else np.asarray(publisher, dtype=float)
    if pub.shape != social.mean_pool.shape or pub.shape != social.max_pool.shape:
        raise DimensionError(f"publisher {pub.shape} vs social {social.mean_pool.shape}/{social.max_pool.shape}")
    return np.concatenate([pub - social.mean_pool, pub - social.max_pool])


def dual_emotion_features(piece: Any, bundle: ResourceBundle, adapter: ClassifierAdapter,
                          config: FeatureConfig | None = None) -> DualEmotionVector:
    config = config or FeatureConfig()
    if getattr(piece, "language", bundle.language) != bundle.language:
        raise ValueError(f"piece {piece.id!r} is {piece.language!r} but bundle is {bundle.language!r}")
    publisher = publisher_emotion(
        piece.content, bundle, adapter, config,
        piece.publisher_emotion_probs, getattr(piece, "publisher_sentiment", None),
    )
    social = social_emotion(
        piece.comments, bundle, adapter, config,
        piece.comment_emotion_probs, getattr(piece, "comment_sentiments", None),
    )
    return DualEmotionVector(publisher, social, emotion_gap(publisher, social))


# -- baselines ---------------------------------------------------------------

def emoratio(tokens: TokenSequence | Sequence[str], bundle: ResourceBundle) -> float:
    """Add-one smoothed ratio of negative to positive sentiment-word counts."""
    neg = sum(1 for t in tokens if bundle.sentiment_words.get(t) == "negative")
    pos = sum(1 for t in tokens if bundle.sentiment_words.get(t) == "positive")
    return (neg + 1) / (pos + 1)


def emocred_features(tokens: TokenSequence | Sequence[str], bundle: ResourceBundle) -> np.ndarray:
    """Per-emotion lexicon frequency followed by intensity-weighted frequency.

    No negation or degree modifiers are applied.
    """
    toks = tuple(tokens)
    freq = np.zeros(bundle.d_e)
    weighted = np.zeros(bundle.d_e)
    if not toks:
        return np.concatenate([freq, weighted])
    for tok in toks:
        weights = bundle.intensity.get(tok, {})
        for k in bundle.emotion_index.get(tok, ()):
            freq[k] += 1.0
            weighted[k] += weights.get(bundle.emotions[k], 0.0)
    return np.concatenate([freq, weighted]) / len(toks)


def feature_record(piece: Any, bundle: ResourceBundle, adapter: ClassifierAdapter,
                   config: FeatureConfig | None = None) -> dict:
    """One JSON-serializable feature line for ``piece``."""
    dual = dual_emotion_features(piece, bundle, adapter, config)
    tokens = tokenize(piece.content, bundle.language, bundle)
    record = {
        "id": piece.id,
        "label": piece.label,
        "dual": dual.flat.tolist(),
        "segments": {name: len(v) for name, v in dual.segments().items()},
        "baselines": {
            "emoratio": emoratio(tokens, bundle),
            "emocred": emocred_features(tokens, bundle).tolist(),
        },
    }
    if piece.detector_embedding is not None:
        record["detector_embedding"] = list(map(float, piece.detector_embedding))
    return record
