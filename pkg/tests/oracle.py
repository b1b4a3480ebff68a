"""Brute-force reference evaluators and a random text generator for the tests.

Everything here is written straight from the feature definitions with plain
loops, sharing no code with the package beyond reading the resource bundle.
"""

from __future__ import annotations

import random

PUNCT = {"en": {"!": "exclamation", "?": "question", "...": "ellipsis", "…": "ellipsis"},
         "zh": {"！": "exclamation", "？": "question", "!": "exclamation", "…": "ellipsis"}}
EMOTICON_ORDER = ("happy", "angry", "surprised", "sad", "neutral")
PERSON_ORDER = ("first", "second", "third")
ZH_FILLER = "据报道今天市民在网上看到一段关于政府和警察的视频消息称事情发生在昨天下午"


def word_pool(bundle) -> list[str]:
    words = set()
    for ws in bundle.emotion_lexicon.values():
        words |= set(ws)
    words |= set(bundle.negation_words) | set(bundle.degree_words) | set(bundle.sentiment_words)
    for ws in bundle.pronouns.values():
        words |= set(ws)
    if bundle.language == "en":
        words |= {"the", "city", "report", "today", "yesterday", "people", "video", "street"}
    else:
        words |= {c for c in ZH_FILLER if c not in bundle.vocabulary}
    return sorted(words)


def random_text(rng: random.Random, bundle, max_len: int = 20):
    """Return ``(text, tokens, emoticon_counts, punct_counts)``.

    Items are separated by spaces so the expected token list is known exactly.
    """
    pool = word_pool(bundle)
    emoticons = sorted(bundle.emoticons)
    punct = PUNCT[bundle.language]
    n = rng.randint(0, max_len)
    tokens = [rng.choice(pool) for _ in range(n)]
    items = []
    for t in tokens:
        if bundle.language == "en" and rng.random() < 0.15:
            t = t.upper()
        elif bundle.language == "en" and rng.random() < 0.15:
            t = t.capitalize()
        items.append(t)
    emo_counts = dict.fromkeys(EMOTICON_ORDER, 0)
    punct_counts = {"exclamation": 0, "question": 0, "ellipsis": 0}
    for _ in range(rng.randint(0, 3)):
        e = rng.choice(emoticons)
        emo_counts[bundle.emoticons[e]] += 1
        items.insert(rng.randint(0, len(items)), e)
    for _ in range(rng.randint(0, 3)):
        p = rng.choice(sorted(punct))
        punct_counts[punct[p]] += 1
        items.insert(rng.randint(0, len(items)), p)
    return " ".join(items), tokens, emo_counts, punct_counts


def modifier(tokens, i, bundle, window):
    prod = 1.0
    for j in range(i - window, i):
        if j < 0:
            continue
        if tokens[j] in bundle.negation_words:
            prod *= bundle.negation_words[tokens[j]]
        if tokens[j] in bundle.degree_words:
            prod *= bundle.degree_words[tokens[j]]
    return prod


def lexicon_vector(tokens, bundle, window=2):
    L = len(tokens)
    out = []
    for emotion in bundle.emotions:
        total = 0.0
        for i in range(L):
            if tokens[i] in bundle.emotion_lexicon[emotion]:
                total += modifier(tokens, i, bundle, window) / L
        out.append(total)
    return out


def intensity_vector(tokens, bundle, window=2):
    L = len(tokens)
    out = []
    for emotion in bundle.emotions:
        total = 0.0
        for i in range(L):
            if tokens[i] in bundle.emotion_lexicon[emotion]:
                weight = bundle.intensity.get(tokens[i], {}).get(emotion, 0.0)
                total += weight * modifier(tokens, i, bundle, window) / L
        out.append(total)
    return out


def auxiliary_vector(text, tokens, emo_counts, punct_counts, bundle):
    C = len(text)
    L = len(tokens)
    if C == 0:
        return [0.0] * (16 if bundle.language == "en" else 15)
    per_tok = (lambda c: c / L) if L else (lambda c: 0.0)
    out = [emo_counts[c] / C for c in EMOTICON_ORDER]
    out += [punct_counts[k] / C for k in ("exclamation", "question", "ellipsis")]
    out.append(per_tok(sum(bundle.sentiment_words.get(t) == "positive" for t in tokens)))
    out.append(per_tok(sum(bundle.sentiment_words.get(t) == "negative" for t in tokens)))
    out.append(per_tok(sum(t in bundle.degree_words for t in tokens)))
    out.append(per_tok(sum(t in bundle.negation_words for t in tokens)))
    for person in PERSON_ORDER:
        out.append(per_tok(sum(t in bundle.pronouns[person] for t in tokens)))
    if bundle.language == "en":
        out.append(sum(ch.isupper() for ch in text) / C)
    return out


def emoratio_value(tokens, bundle):
    neg = pos = 0
    for t in tokens:
        if bundle.sentiment_words.get(t) == "negative":
            neg += 1
        elif bundle.sentiment_words.get(t) == "positive":
            pos += 1
    return (neg + 1) / (pos + 1)


def emocred_vector(tokens, bundle):
    L = len(tokens)
    if L == 0:
        return [0.0] * (2 * len(bundle.emotions))
    freq, weighted = [], []
    for emotion in bundle.emotions:
        hits = [t for t in tokens if t in bundle.emotion_lexicon[emotion]]
        freq.append(len(hits) / L)
        weighted.append(sum(bundle.intensity.get(t, {}).get(emotion, 0.0) for t in hits) / L)
    return freq + weighted


def pearson_chi_square(table):
    rows = [r for r in table if sum(r) > 0]
    cols = [j for j in range(len(rows[0])) if sum(r[j] for r in rows) > 0]
    rows = [[r[j] for j in cols] for r in rows]
    n = sum(sum(r) for r in rows)
    stat = 0.0
    for i, r in enumerate(rows):
        for j, obs in enumerate(r):
            exp = sum(rows[i]) * sum(rr[j] for rr in rows) / n
            stat += (obs - exp) ** 2 / exp
    return stat, (len(rows) - 1) * (len(cols) - 1)
