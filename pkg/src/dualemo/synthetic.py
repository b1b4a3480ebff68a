"""Synthetic corpora whose veracity depends on the (publisher, social) emotion pair.

Each pair has its own fake rate, so publisher emotion alone is only weakly
informative while the pair is close to decisive. Resonant anger is fake at
80%, and happy content drawing angry or disgusted comments is almost always
fake.
"""

from __future__ import annotations

import numpy as np

from .dataset import Comment, Dataset, NewsPiece
from .resources import ResourceBundle, load_fixture

# role -> emotion name in each shipped fixture
ROLE_EMOTIONS = {
    "en": {"angry": "anger", "happy": "joy", "disgust": "disgust", "sad": "sadness"},
    "zh": {"angry": "anger", "happy": "joy", "disgust": "hatred", "sad": "sorrow"},
}

# (publisher role, social role, probability of fake, relative frequency)
PAIR_TABLE = (
    ("angry", "angry", 0.80, 0.10),
    ("angry", "sad", 0.03, 0.12),
    ("happy", "angry", 0.97, 0.12),
    ("happy", "happy", 0.03, 0.14),
    ("happy", "disgust", 0.97, 0.08),
    ("none", "disgust", 0.97, 0.10),
    ("none", "none", 0.03, 0.14),
    ("none", "angry", 0.97, 0.08),
    ("sad", "sad", 0.03, 0.12),
)

_EN_FILLER = ("the news report says that people in city saw this video about police and government "
              "yesterday after photo was posted online by local reporter on main street").split()
_ZH_FILLER = list("据报道今天市民在网上看到一段关于政府和警察的视频消息称事情发生在昨天下午")


def _exclusive_words(bundle: ResourceBundle, emotion: str) -> list[str]:
    """Lexicon words of ``emotion`` that no other emotion lists and that are not modifiers."""
    words = []
    for w in sorted(bundle.emotion_lexicon[emotion]):
        if len(bundle.emotion_index[w]) == 1 and w not in bundle.negation_words and w not in bundle.degree_words:
            words.append(w)
    return words


def _filler(bundle: ResourceBundle) -> list[str]:
    pool = _EN_FILLER if bundle.language == "en" else _ZH_FILLER
    return sorted({w for w in pool if w.casefold() not in bundle.vocabulary})


def _compose(rng: np.random.Generator, words: list[str], filler: list[str], n_emotion: int,
             bundle: ResourceBundle, n_filler: tuple[int, int]) -> str:
    parts = list(rng.choice(filler, size=rng.integers(*n_filler)))
    for _ in range(n_emotion):
        parts.insert(int(rng.integers(0, len(parts) + 1)), str(rng.choice(words)))
    if bundle.language == "en":
        if rng.random() < 0.2:
            parts[0] = parts[0].upper()
        text = " ".join(parts)
        text = text[0].upper() + text[1:]
    else:
        text = "".join(parts)
    emoticons = sorted(bundle.emoticons)
    if rng.random() < 0.3:
        text += " " + str(rng.choice(emoticons))
    if rng.random() < 0.3:
        text += "!" if bundle.language == "en" else "！"
    return text


def generate_corpus(n: int = 2000, seed: int = 42, language: str = "en",
                    bundle: ResourceBundle | None = None, comments: tuple[int, int] = (4, 16),
                    comment_fidelity: float = 0.8) -> Dataset:
    """Build ``n`` labeled pieces with timestamped comments.

    Content carries one to three words of the publisher emotion (none for
    the ``none`` role); each comment carries the social emotion with
    probability ``comment_fidelity`` and a random other role otherwise.
    """
    bundle = bundle or load_fixture(language)
    rng = np.random.default_rng(seed)
    roles = ROLE_EMOTIONS[language]
    vocab = {role: _exclusive_words(bundle, emo) for role, emo in roles.items()}
    filler = _filler(bundle)
    all_roles = list(roles) + ["none"]

    freq = np.array([row[3] for row in PAIR_TABLE])
    freq = freq / freq.sum()
    pieces = []
    for k in range(n):
        pub, soc, p_fake, _ = PAIR_TABLE[int(rng.choice(len(PAIR_TABLE), p=freq))]
        label = "fake" if rng.random() < p_fake else "real"

        def text_for(role: str, size: tuple[int, int]) -> str:
            if role == "none":
                return _compose(rng, filler, filler, 0, bundle, size)
            return _compose(rng, vocab[role], filler, int(rng.integers(1, 4)), bundle, size)

        stamp = int(1_500_000_000 + rng.integers(0, 50_000_000))
        thread = []
        for _ in range(int(rng.integers(*comments))):
            role = soc if rng.random() < comment_fidelity else str(rng.choice(all_roles))
            thread.append(Comment(text_for(role, (2, 7)), stamp + int(rng.integers(1, 86_400))))
        pieces.append(NewsPiece(
            id=f"syn{k:05d}", content=text_for(pub, (5, 12)), language=language,
            label=label, timestamp=stamp, comments=thread,
        ))
    return Dataset(pieces)
