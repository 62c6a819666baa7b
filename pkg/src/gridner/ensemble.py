"""Stratified k-fold splitting, minority oversampling, and mean-pool voting."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .errors import DataError, EmptyClass, LengthMismatch, TooFewRecords

__all__ = [
    "Record",
    "LabeledDataset",
    "FoldSplit",
    "stratified_kfold",
    "oversample",
    "mean_pool_probs",
    "threshold_labels",
]


@dataclass(frozen=True)
class Record:
    id: str
    text: str
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise DataError(f"label must be 0 or 1, got {self.label}", record_id=self.id)


@dataclass
class LabeledDataset:
    """Binary-labeled records with unique ids."""

    records: list[Record] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise DataError("duplicate record id", record_id=rec.id)
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[str, Record]:
        return {rec.id: rec for rec in self.records}


@dataclass
class FoldSplit:
    """A partition of record ids into k folds of near-equal size."""

    k: int
    seed: int
    folds: list[list[str]]

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "seed": self.seed, "folds": self.folds}, ensure_ascii=False
        )

    @classmethod
    def from_json(cls, text: str) -> "FoldSplit":
        obj = json.loads(text)
        return cls(k=obj["k"], seed=obj["seed"], folds=[list(f) for f in obj["folds"]])

    def train_ids(self, fold: int) -> list[str]:
        """All ids outside the given development fold."""
        return [rid for i, f in enumerate(self.folds) if i != fold for rid in f]


def stratified_kfold(ds: LabeledDataset, k: int = 5, seed: int = 0) -> FoldSplit:
    """Shuffle each class with the seed, then deal round-robin into k folds.

    The round-robin pointer carries over between classes so total fold
    sizes differ by at most one, as do per-class counts across folds.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if len(ds) < k:
        raise TooFewRecords(f"{len(ds)} records cannot fill {k} folds")
    rng = random.Random(seed)
    folds: list[list[str]] = [[] for _ in range(k)]
    pointer = 0
    for label in (0, 1):
        ids = [rec.id for rec in ds.records if rec.label == label]
        rng.shuffle(ids)
        for rid in ids:
            folds[pointer % k].append(rid)
            pointer += 1
    return FoldSplit(k=k, seed=seed, folds=folds)


def oversample(ds: LabeledDataset, seed: int = 0) -> LabeledDataset:
    """Replicate random minority records until class counts are equal.

    Originals are all kept in order; duplicates are appended with
    `__dup<i>` id suffixes so ids stay unique.
    """
    pos = [rec for rec in ds.records if rec.label == 1]
    neg = [rec for rec in ds.records if rec.label == 0]
    if not pos or not neg:
        raise EmptyClass("oversampling needs records of both classes")
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    rng = random.Random(seed)
    out = list(ds.records)
    copies: dict[str, int] = {}
    for _ in range(len(majority) - len(minority)):
        src = rng.choice(minority)
        copies[src.id] = copies.get(src.id, 0) + 1
        out.append(Record(f"{src.id}__dup{copies[src.id]}", src.text, src.label))
    return LabeledDataset(out)


def mean_pool_probs(member_probs) -> list[float]:
    """Elementwise arithmetic mean of member probability lists.

    Exact summation keeps the result identical under member permutation.
    """
    members = [list(m) for m in member_probs]
    if not members:
        raise LengthMismatch("mean_pool_probs needs at least one member")
    length = len(members[0])
    for m in members[1:]:
        if len(m) != length:
            raise LengthMismatch(f"member length {len(m)} != {length}")
    count = len(members)
    return [math.fsum(m[i] for m in members) / count for i in range(length)]


def threshold_labels(probs, t: float = 0.5) -> list[int]:
    """Label 1 iff p >= t (ties positive)."""
    return [1 if p >= t else 0 for p in probs]
