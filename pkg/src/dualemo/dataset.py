"""News-piece corpora: JSON Lines I/O, random and temporal splits, deduplication."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

LABELS = ("fake", "real", "unverified")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Comment:
    text: str
    timestamp: int | None = None


@dataclass
class NewsPiece:
    id: str
    content: str
    language: str = "en"
    label: str | None = None
    timestamp: int | None = None
    comments: list[Comment] = field(default_factory=list)
    publisher_emotion_probs: list[float] | None = None
    comment_emotion_probs: list[list[float]] | None = None
    detector_embedding: list[float] | None = None
    # externally computed sentiment vectors (e.g. four-way English scores)
    publisher_sentiment: list[float] | None = None
    comment_sentiments: list[list[float]] | None = None

    def __post_init__(self):
        if self.label is not None and self.label not in LABELS:
            raise DatasetError(f"piece {self.id!r}: unknown label {self.label!r}")
        if self.language not in ("en", "zh"):
            raise DatasetError(f"piece {self.id!r}: unknown language {self.language!r}")
        if self.timestamp is not None and self.timestamp < 0:
            raise DatasetError(f"piece {self.id!r}: negative timestamp")
        for c in self.comments:
            if c.timestamp is not None and c.timestamp < 0:
                raise DatasetError(f"piece {self.id!r}: negative comment timestamp")
        for name in ("comment_emotion_probs", "comment_sentiments"):
            aligned = getattr(self, name)
            if aligned is not None and len(aligned) != len(self.comments):
                raise DatasetError(
                    f"piece {self.id!r}: {name} has {len(aligned)} entries for {len(self.comments)} comments")

    @classmethod
    def from_dict(cls, obj: dict) -> "NewsPiece":
        if not isinstance(obj, dict):
            raise DatasetError("record is not a JSON object")
        if "id" not in obj or "content" not in obj:
            raise DatasetError("record needs 'id' and 'content'")
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise DatasetError(f"unknown fields {sorted(extra)}")
        data = dict(obj)
        data["id"] = str(data["id"])
        comments = []
        for c in data.get("comments") or []:
            if isinstance(c, str):
                comments.append(Comment(c))
            else:
                comments.append(Comment(str(c["text"]), None if c.get("timestamp") is None else int(c["timestamp"])))
        data["comments"] = comments
        if data.get("timestamp") is not None:
            data["timestamp"] = int(data["timestamp"])
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        return {k: v for k, v in out.items() if v is not None}


class Dataset:
    """Ordered collection of news pieces with unique ids."""

    def __init__(self, pieces: Iterable[NewsPiece] = ()):
        self.pieces: list[NewsPiece] = []
        self._index: dict[str, int] = {}
        for p in pieces:
            self.add(p)

    def add(self, piece: NewsPiece) -> None:
        if piece.id in self._index:
            raise DatasetError(f"duplicate id {piece.id!r}")
        self._index[piece.id] = len(self.pieces)
        self.pieces.append(piece)

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self) -> Iterator[NewsPiece]:
        return iter(self.pieces)

    def __getitem__(self, piece_id: str) -> NewsPiece:
        return self.pieces[self._index[piece_id]]

    def __contains__(self, piece_id: str) -> bool:
        return piece_id in self._index

    @property
    def ids(self) -> list[str]:
        return [p.id for p in self.pieces]

    def subset(self, ids: Iterable[str]) -> "Dataset":
        return Dataset(self[i] for i in ids)


def load_dataset(path: str | Path) -> Dataset:
    """Read a JSON Lines corpus; errors carry the offending line number."""
    path = Path(path)
    ds = Dataset()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                piece = NewsPiece.from_dict(json.loads(line))
                ds.add(piece)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            except (DatasetError, KeyError, TypeError, ValueError) as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from None
    return ds


def save_dataset(dataset: Iterable[NewsPiece], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for p in dataset:
            f.write(json.dumps(p.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


@dataclass
class DatasetSplit:
    train: list[str]
    validation: list[str]
    test: list[str]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.validation), len(self.test)

    def to_dict(self) -> dict:
        return {"train": self.train, "validation": self.validation, "test": self.test}

    @classmethod
    def from_dict(cls, obj: dict) -> "DatasetSplit":
        return cls(list(obj["train"]), list(obj["validation"]), list(obj["test"]))


def random_split(dataset: Dataset, ratios: Sequence[float] = (3, 1, 1), seed: int = 42) -> DatasetSplit:
    """Seeded shuffle cut by ``ratios``; rounding remainders go to train."""
    if len(dataset) == 0:
        raise DatasetError("cannot split an empty dataset")
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive numbers")
    n = len(dataset)
    total = float(sum(ratios))
    n_val = int(n * ratios[1] / total)
    n_test = int(n * ratios[2] / total)
    order = np.random.default_rng(seed).permutation(n)
    ids = [dataset.pieces[k].id for k in order]
    n_train = n - n_val - n_test
    return DatasetSplit(ids[:n_train], ids[n_train:n_train + n_val], ids[n_train + n_val:])


def temporal_split(dataset: Dataset) -> DatasetSplit:
    """Chronological split: newest 20% test, newest 25% of the rest validation."""
    missing = [p.id for p in dataset if p.timestamp is None]
    if missing:
        raise DatasetError(f"pieces without timestamp: {missing[:5]}")
    ordered = sorted(dataset, key=lambda p: (p.timestamp, p.id))
    n = len(ordered)
    n_test = n // 5
    rest = n - n_test
    n_val = rest // 4
    ids = [p.id for p in ordered]
    return DatasetSplit(ids[:rest - n_val], ids[rest - n_val:rest], ids[rest:])


# -- deduplication -----------------------------------------------------------

def char_ngrams(text: str, n: int = 3) -> frozenset[str]:
    norm = " ".join(text.casefold().split())
    if len(norm) < n:
        return frozenset([norm]) if norm else frozenset()
    return frozenset(norm[i:i + n] for i in range(len(norm) - n + 1))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass
class ClusterReport:
    clusters: list[list[str]]
    removed: int
    retained: int

    def to_dict(self) -> dict:
        return {"clusters": self.clusters, "removed": self.removed, "retained": self.retained}


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _similar_pairs(grams: list[frozenset], threshold: float) -> Iterator[tuple[int, int]]:
    # candidate pairs share at least one n-gram; an inverted index avoids
    # scoring pairs that cannot reach a positive threshold
    postings: dict[str, list[int]] = {}
    for k, g in enumerate(grams):
        for gram in g:
            postings.setdefault(gram, []).append(k)
    for i, gi in enumerate(grams):
        candidates: set[int] = set()
        for gram in gi:
            candidates.update(j for j in postings[gram] if j > i)
        if not gi:
            candidates.update(j for j in range(i + 1, len(grams)) if not grams[j])
        for j in sorted(candidates):
            if jaccard(gi, grams[j]) >= threshold:
                yield i, j


def deduplicate(dataset: Dataset, label_filter: str | None = "fake", threshold: float = 0.8,
                ngram: int = 3) -> tuple[Dataset, ClusterReport]:
    """Drop near-duplicate contents among pieces carrying ``label_filter``.

    Pieces are linked when their character n-gram Jaccard similarity reaches
    ``threshold``; each connected group keeps its earliest piece (input order
    breaks timestamp ties). ``label_filter=None`` deduplicates every piece.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    members = [p for p in dataset if label_filter is None or p.label == label_filter]
    grams = [char_ngrams(p.content, ngram) for p in members]
    dsu = _DisjointSet(len(members))
    for i, j in _similar_pairs(grams, threshold):
        dsu.union(i, j)

    groups: dict[int, list[int]] = {}
    for k in range(len(members)):
        groups.setdefault(dsu.find(k), []).append(k)

    drop: set[str] = set()
    clusters: list[list[str]] = []
    for ks in groups.values():
        if len(ks) < 2:
            continue
        keep = min(ks, key=lambda k: (float("inf") if members[k].timestamp is None else members[k].timestamp, k))
        clusters.append([members[keep].id] + [members[k].id for k in ks if k != keep])
        drop.update(members[k].id for k in ks if k != keep)

    kept = Dataset(p for p in dataset if p.id not in drop)
    return kept, ClusterReport(clusters, removed=len(drop), retained=len(kept))
