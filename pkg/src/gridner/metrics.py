"""Positive-class and strict-match precision / recall / F1."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import LengthMismatch
from .grid import EntityMention

__all__ = ["PrfScores", "binary_prf", "ner_strict_prf"]


@dataclass(frozen=True)
class PrfScores:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "precision": self.precision,
                "recall": self.recall,
                "f1": self.f1,
                "tp": self.tp,
                "fp": self.fp,
                "fn": self.fn,
            }
        )


def _from_counts(tp: int, fp: int, fn: int) -> PrfScores:
    # Zero denominators score 0 rather than NaN.
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return PrfScores(precision, recall, f1, tp, fp, fn)


def binary_prf(preds, golds) -> PrfScores:
    """Positive-class scores from paired 0/1 label lists."""
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} golds")
    tp = sum(1 for p, g in zip(preds, golds) if p == 1 and g == 1)
    fp = sum(1 for p, g in zip(preds, golds) if p == 1 and g == 0)
    fn = sum(1 for p, g in zip(preds, golds) if p == 0 and g == 1)
    return _from_counts(tp, fp, fn)


def ner_strict_prf(pred, gold) -> PrfScores:
    """Strict mention matching: identical type and identical token-index set.

    Both sides are deduplicated first; each gold mention matches at most
    one prediction.  Micro-averaged counts.
    """
    pred_set: set[EntityMention] = set(pred)
    gold_set: set[EntityMention] = set(gold)
    tp = len(pred_set & gold_set)
    return _from_counts(tp, len(pred_set) - tp, len(gold_set) - tp)
