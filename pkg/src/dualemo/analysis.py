"""Dual emotion categories, veracity contingency tables and the chi-square test."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .features import ClassifierAdapter, earliest_indices, emotion_category
from .resources import ResourceBundle
from .textproc import tokenize

VERACITY_ROWS = ("fake", "real")
CONFIDENCES = (0.95, 0.99)

# Upper quantiles of the chi-square distribution, dof 1..100.
_CRITICAL_95 = (
    3.8415, 5.9915, 7.8147, 9.4877, 11.0705, 12.5916, 14.0671, 15.5073, 16.9190, 18.3070,
    19.6751, 21.0261, 22.3620, 23.6848, 24.9958, 26.2962, 27.5871, 28.8693, 30.1435, 31.4104,
    32.6706, 33.9244, 35.1725, 36.4150, 37.6525, 38.8851, 40.1133, 41.3371, 42.5570, 43.7730,
    44.9853, 46.1943, 47.3999, 48.6024, 49.8018, 50.9985, 52.1923, 53.3835, 54.5722, 55.7585,
    56.9424, 58.1240, 59.3035, 60.4809, 61.6562, 62.8296, 64.0011, 65.1708, 66.3386, 67.5048,
    68.6693, 69.8322, 70.9935, 72.1532, 73.3115, 74.4683, 75.6237, 76.7778, 77.9305, 79.0819,
    80.2321, 81.3810, 82.5287, 83.6753, 84.8206, 85.9649, 87.1081, 88.2502, 89.3912, 90.5312,
    91.6702, 92.8083, 93.9453, 95.0815, 96.2167, 97.3510, 98.4844, 99.6169, 100.7486, 101.8795,
    103.0095, 104.1387, 105.2672, 106.3948, 107.5217, 108.6479, 109.7733, 110.8980, 112.0220, 113.1453,
    114.2679, 115.3898, 116.5110, 117.6317, 118.7516, 119.8709, 120.9896, 122.1077, 123.2252, 124.3421,
)
_CRITICAL_99 = (
    6.6349, 9.2103, 11.3449, 13.2767, 15.0863, 16.8119, 18.4753, 20.0902, 21.6660, 23.2093,
    24.7250, 26.2170, 27.6882, 29.1412, 30.5779, 31.9999, 33.4087, 34.8053, 36.1909, 37.5662,
    38.9322, 40.2894, 41.6384, 42.9798, 44.3141, 45.6417, 46.9629, 48.2782, 49.5879, 50.8922,
    52.1914, 53.4858, 54.7755, 56.0609, 57.3421, 58.6192, 59.8925, 61.1621, 62.4281, 63.6907,
    64.9501, 66.2062, 67.4593, 68.7095, 69.9568, 71.2014, 72.4433, 73.6826, 74.9195, 76.1539,
    77.3860, 78.6158, 79.8433, 81.0688, 82.2921, 83.5134, 84.7328, 85.9502, 87.1657, 88.3794,
    89.5913, 90.8015, 92.0100, 93.2169, 94.4221, 95.6257, 96.8278, 98.0284, 99.2275, 100.4252,
    101.6214, 102.8163, 104.0098, 105.2020, 106.3929, 107.5825, 108.7709, 109.9581, 111.1440, 112.3288,
    113.5124, 114.6949, 115.8763, 117.0565, 118.2357, 119.4139, 120.5910, 121.7671, 122.9422, 124.1163,
    125.2895, 126.4617, 127.6329, 128.8032, 129.9727, 131.1412, 132.3089, 133.4757, 134.6416, 135.8067,
)
_CRITICAL = {0.95: _CRITICAL_95, 0.99: _CRITICAL_99}
# standard normal upper quantiles, for the Wilson-Hilferty tail beyond dof 100
_Z = {0.95: 1.6448536269514722, 0.99: 2.3263478740408408}


class DegenerateTableError(ValueError):
    pass


def critical_value(dof: int, confidence: float) -> float:
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if confidence not in _CRITICAL:
        raise ValueError(f"confidence must be one of {CONFIDENCES}")
    if dof <= 100:
        return _CRITICAL[confidence][dof - 1]
    z = _Z[confidence]
    c = 2.0 / (9.0 * dof)
    return dof * (1.0 - c + z * math.sqrt(c)) ** 3


@dataclass(frozen=True)
class DualEmotionCategory:
    publisher_label: str
    social_label: str

    @property
    def key(self) -> str:
        return f"{self.publisher_label}|{self.social_label}"


def _probabilities(text: str, adapter: ClassifierAdapter, bundle: ResourceBundle | None, stored) -> np.ndarray:
    if adapter.mode == "precomputed":
        return emotion_category((), adapter, bundle, stored)
    tokens = tokenize(text, bundle.language, bundle)
    return emotion_category(tokens, adapter, bundle)


def dual_emotion_category(piece, adapter: ClassifierAdapter, bundle: ResourceBundle | None = None,
                          comments_limit: int | None = None) -> DualEmotionCategory:
    """Publisher argmax plus soft-voted social argmax.

    Comment probability vectors are averaged coordinatewise before the argmax.
    Ties go to the lowest coordinate; a piece without comments gets the
    adapter's ``none`` label as social emotion.
    """
    content = _probabilities(piece.content, adapter, bundle, piece.publisher_emotion_probs)
    publisher = adapter.labels[int(np.argmax(content))]

    comments = list(piece.comments)
    if not comments:
        return DualEmotionCategory(publisher, adapter.none_label)
    chosen = range(len(comments))
    if comments_limit is not None:
        chosen = earliest_indices([c.timestamp for c in comments], comments_limit)
    stored = piece.comment_emotion_probs
    probs = np.array([
        _probabilities(comments[k].text, adapter, bundle, None if stored is None else stored[k])
        for k in chosen
    ])
    social = adapter.labels[int(np.argmax(probs.mean(axis=0)))]
    return DualEmotionCategory(publisher, social)


@dataclass
class ContingencyTable:
    rows: list[str]
    columns: list[str]
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64).reshape(len(self.rows), len(self.columns))
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        return {"rows": self.rows, "columns": self.columns, "counts": self.counts.tolist()}


def categorize(dataset: Iterable, adapter: ClassifierAdapter, bundle: ResourceBundle | None = None,
               comments_limit: int | None = None) -> dict[str, DualEmotionCategory]:
    return {p.id: dual_emotion_category(p, adapter, bundle, comments_limit) for p in dataset}


def contingency_table(dataset: Iterable, adapter: ClassifierAdapter, bundle: ResourceBundle | None = None,
                      category_whitelist: Iterable[str] | None = None,
                      categories: Mapping[str, DualEmotionCategory] | None = None) -> ContingencyTable:
    """Veracity (fake/real) by dual-emotion-category counts.

    Unverified and unlabeled pieces are skipped. With a whitelist, pieces whose
    publisher or social label falls outside it are left out.
    """
    allowed = None if category_whitelist is None else set(category_whitelist)
    order = {label: k for k, label in enumerate(adapter.labels)}
    cells: dict[tuple[str, tuple[int, int]], int] = {}
    rows_seen: set[str] = set()
    for piece in dataset:
        if piece.label not in VERACITY_ROWS:
            continue
        cat = categories[piece.id] if categories is not None else dual_emotion_category(piece, adapter, bundle)
        if allowed is not None and (cat.publisher_label not in allowed or cat.social_label not in allowed):
            continue
        col = (order[cat.publisher_label], order[cat.social_label])
        cells[(piece.label, col)] = cells.get((piece.label, col), 0) + 1
        rows_seen.add(piece.label)
    if not rows_seen:
        raise DegenerateTableError("no fake/real pieces to tabulate")

    rows = [r for r in VERACITY_ROWS if r in rows_seen]
    cols = sorted({col for _, col in cells})
    counts = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for (row, col), n in cells.items():
        counts[rows.index(row), cols.index(col)] = n
    names = [f"{adapter.labels[p]}|{adapter.labels[s]}" for p, s in cols]
    return ContingencyTable(rows, names, counts)


@dataclass
class ChiSquareResult:
    statistic: float
    degrees_of_freedom: int
    critical_values: dict[float, float] = field(default_factory=dict)
    reject_at: dict[float, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "degrees_of_freedom": self.degrees_of_freedom,
            "critical_values": {str(k): v for k, v in self.critical_values.items()},
            "reject_at": {str(k): v for k, v in self.reject_at.items()},
        }


def chi_square(table: ContingencyTable | Sequence[Sequence[int]]) -> ChiSquareResult:
    """Pearson chi-square test of independence, no continuity correction.

    Rows and columns with a zero margin are dropped first; the degrees of
    freedom are counted on what remains.
    """
    counts = np.asarray(table.counts if isinstance(table, ContingencyTable) else table, dtype=float)
    if counts.ndim != 2:
        raise DegenerateTableError("table must be two-dimensional")
    counts = counts[counts.sum(axis=1) > 0]
    if counts.size:
        counts = counts[:, counts.sum(axis=0) > 0]
    n_rows, n_cols = counts.shape if counts.size else (0, 0)
    if n_rows < 2 or n_cols < 2:
        raise DegenerateTableError(f"need at least 2 nonzero rows and columns, got {n_rows}x{n_cols}")

    row_tot = counts.sum(axis=1)
    col_tot = counts.sum(axis=0)
    grand = counts.sum()
    expected = np.outer(row_tot, col_tot) / grand
    statistic = math.fsum(((counts - expected) ** 2 / expected).ravel())
    dof = (n_rows - 1) * (n_cols - 1)
    crit = {q: critical_value(dof, q) for q in CONFIDENCES}
    return ChiSquareResult(statistic, dof, crit, {q: statistic > c for q, c in crit.items()})


def category_grid(dataset: Iterable, categories: Mapping[str, DualEmotionCategory], labels: Sequence[str],
                  veracity_class: str, category_whitelist: Iterable[str] | None = None) -> ContingencyTable:
    """Publisher-by-social counts for the pieces of one veracity class."""
    keep = list(labels) if category_whitelist is None else [l for l in labels if l in set(category_whitelist)]
    pos = {label: k for k, label in enumerate(keep)}
    counts = np.zeros((len(keep), len(keep)), dtype=np.int64)
    for piece in dataset:
        if piece.label != veracity_class:
            continue
        cat = categories[piece.id]
        if cat.publisher_label in pos and cat.social_label in pos:
            counts[pos[cat.publisher_label], pos[cat.social_label]] += 1
    return ContingencyTable(list(keep), list(keep), counts)


@dataclass
class Heatmap:
    rows: list[str]
    columns: list[str]
    percentages: np.ndarray
    zero_rows: list[bool]

    def to_csv(self) -> str:
        lines = [",".join(["publisher"] + self.columns)]
        for label, row in zip(self.rows, self.percentages):
            lines.append(",".join([label] + [f"{v:.1f}" for v in row]))
        return "\n".join(lines) + "\n"


def heatmap_rows(table: ContingencyTable) -> Heatmap:
    """Rescale each row to percentages summing to 100; empty rows stay zero and are flagged."""
    counts = table.counts.astype(float)
    totals = counts.sum(axis=1)
    pct = np.zeros_like(counts)
    nonzero = totals > 0
    pct[nonzero] = counts[nonzero] * 100.0 / totals[nonzero, None]
    return Heatmap(list(table.rows), list(table.columns), pct, [not z for z in nonzero])
