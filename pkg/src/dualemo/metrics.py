"""Accuracy, per-class and macro F1, and the three-class RMSE convention."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LABELS = ("fake", "real", "unverified")
REGIMES = ("two_class", "three_class")


@dataclass
class Metrics:
    accuracy: float
    macro_f1: float
    per_class_f1: dict[str, float] = field(default_factory=dict)
    rmse: float | None = None

    def to_dict(self) -> dict:
        out = {"accuracy": self.accuracy, "macro_f1": self.macro_f1, "per_class_f1": self.per_class_f1}
        if self.rmse is not None:
            out["rmse"] = self.rmse
        return out


def _f1(tp: int, fp: int, fn: int) -> float:
    if tp == 0:
        return 0.0
    return 2 * tp / (2 * tp + fp + fn)


def macro_f1_from_indices(gold: np.ndarray, pred: np.ndarray) -> float:
    """Macro F1 over the classes present in ``gold``."""
    gold = np.asarray(gold)
    pred = np.asarray(pred)
    scores = []
    for c in np.unique(gold):
        tp = int(np.sum((pred == c) & (gold == c)))
        fp = int(np.sum((pred == c) & (gold != c)))
        fn = int(np.sum((pred != c) & (gold == c)))
        scores.append(_f1(tp, fp, fn))
    return float(np.mean(scores)) if scores else 0.0


def metrics(predictions: Sequence[tuple[str, float]], gold: Sequence[str], regime: str = "two_class",
            labels: Sequence[str] = LABELS) -> Metrics:
    """Score ``(label, confidence)`` predictions against gold labels.

    Macro F1 averages the F1 of every class present in ``gold``; a gold class
    never predicted counts as 0. In the three-class regime RMSE compares each
    confidence with 1 when the item is a correctly predicted fake/real piece
    and with 0 otherwise (all unverified gold items included).
    """
    if len(predictions) != len(gold):
        raise ValueError(f"{len(predictions)} predictions for {len(gold)} gold labels")
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}")
    known = set(labels)
    for label in list(gold) + [p for p, _ in predictions]:
        if label not in known:
            raise ValueError(f"unknown label {label!r}")
    for _, conf in predictions:
        if not 0.0 <= conf <= 1.0:
            raise ValueError(f"confidence {conf} outside [0, 1]")

    n = len(gold)
    pred = [p for p, _ in predictions]
    correct = sum(1 for p, g in zip(pred, gold) if p == g)
    classes = [c for c in labels if c in set(gold) or c in set(pred)]
    per_class = {}
    for c in classes:
        tp = sum(1 for p, g in zip(pred, gold) if p == c and g == c)
        fp = sum(1 for p, g in zip(pred, gold) if p == c and g != c)
        fn = sum(1 for p, g in zip(pred, gold) if p != c and g == c)
        per_class[c] = _f1(tp, fp, fn)
    gold_classes = [c for c in classes if c in set(gold)]
    macro = sum(per_class[c] for c in gold_classes) / len(gold_classes) if gold_classes else 0.0

    rmse = None
    if regime == "three_class":
        errors = []
        for (p, conf), g in zip(predictions, gold):
            ref = 1.0 if g in ("fake", "real") and p == g else 0.0
            errors.append((conf - ref) ** 2)
        rmse = math.sqrt(math.fsum(errors) / n) if n else 0.0
    return Metrics(correct / n if n else 0.0, macro, per_class, rmse)
