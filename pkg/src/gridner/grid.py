"""Word-pair relation grid: encoding mention sets, decoding grids and scores.

A sentence of n tokens maps to an n x n grid.  Cell (i, j) with i < j may
hold NNW (token j follows token i inside some mention); cell (i, j) with
i >= j may hold a typed THW label linking a mention's tail row to its head
column.  Decoding enumerates NNW paths between each THW anchor's head and
tail, which also recovers discontinuous mentions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConflictError, ShapeMismatch

__all__ = [
    "NONE",
    "NNW",
    "thw",
    "thw_type",
    "EntityMention",
    "RelationGrid",
    "GridScores",
    "DecodeLimits",
    "encode_grid",
    "decode_grid",
    "decode_scores",
    "fuse_scores",
    "scores_from_grid",
]

NONE = "NONE"
NNW = "NNW"
_THW_PREFIX = "THW:"


def thw(type_label: str) -> str:
    """Cell label for a tail-head link of the given entity type."""
    return _THW_PREFIX + type_label


def thw_type(label: str) -> str | None:
    """Entity type carried by a THW label, or None for NONE/NNW."""
    if label.startswith(_THW_PREFIX):
        return label[len(_THW_PREFIX):]
    return None


@dataclass(frozen=True, order=True)
class EntityMention:
    """A typed mention as a strictly increasing token-index tuple."""

    type_label: str
    token_indices: tuple[int, ...]

    def __init__(self, type_label: str, token_indices):
        object.__setattr__(self, "type_label", type_label)
        object.__setattr__(self, "token_indices", tuple(token_indices))
        idx = self.token_indices
        if not idx:
            raise ValueError("mention has no token indices")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"token indices not strictly increasing: {list(idx)}")
        if idx[0] < 0:
            raise ValueError(f"negative token index: {idx[0]}")

    @property
    def head(self) -> int:
        return self.token_indices[0]

    @property
    def tail(self) -> int:
        return self.token_indices[-1]


@dataclass
class RelationGrid:
    """Sparse n x n grid; only non-NONE cells are stored."""

    n: int
    cells: dict[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"negative grid size {self.n}")
        for (i, j), label in self.cells.items():
            self._check_cell(i, j, label)

    def _check_cell(self, i: int, j: int, label: str):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"cell ({i}, {j}) outside grid of size {self.n}")
        if label == NNW and not i < j:
            raise ValueError(f"NNW below the diagonal at ({i}, {j})")
        if thw_type(label) is not None and i < j:
            raise ValueError(f"THW above the diagonal at ({i}, {j})")
        if label == NONE:
            raise ValueError("NONE cells must be omitted, not stored")

    def set_cell(self, i: int, j: int, label: str):
        self._check_cell(i, j, label)
        self.cells[(i, j)] = label

    def label_at(self, i: int, j: int) -> str:
        return self.cells.get((i, j), NONE)

    def to_json(self) -> str:
        cells = [
            {"row": i, "col": j, "label": label}
            for (i, j), label in sorted(self.cells.items())
        ]
        return json.dumps({"n": self.n, "cells": cells}, ensure_ascii=False)

    @classmethod
    def from_dict(cls, obj: dict) -> "RelationGrid":
        cells = {
            (c["row"], c["col"]): c["label"]
            for c in obj.get("cells", ())
            if c["label"] != NONE
        }
        return cls(n=obj["n"], cells=cells)

    @classmethod
    def from_json(cls, text: str) -> "RelationGrid":
        return cls.from_dict(json.loads(text))


@dataclass
class GridScores:
    """Per-cell label probability distributions, shape (n, n, len(labels))."""

    n: int
    labels: list[str]
    dist: np.ndarray

    def __post_init__(self):
        self.dist = np.asarray(self.dist, dtype=np.float64)
        expected = (self.n, self.n, len(self.labels))
        if self.dist.shape != expected:
            raise ShapeMismatch(f"dist shape {self.dist.shape} != {expected}")
        if np.any(self.dist < 0):
            raise ValueError("negative probability in score tensor")
        if self.n > 0 and not np.allclose(self.dist.sum(axis=2), 1.0, atol=1e-9, rtol=0):
            raise ValueError("cell distributions must sum to 1 within 1e-9")

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "labels": self.labels, "dist": self.dist.tolist()},
            ensure_ascii=False,
        )

    @classmethod
    def from_dict(cls, obj: dict) -> "GridScores":
        return cls(n=obj["n"], labels=list(obj["labels"]), dist=np.asarray(obj["dist"]))

    @classmethod
    def from_json(cls, text: str) -> "GridScores":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DecodeLimits:
    """Caps on decoding: mention length and paths enumerated per anchor."""

    max_entity_tokens: int = 32
    max_paths_per_anchor: int = 100

    def __post_init__(self):
        if self.max_entity_tokens < 1 or self.max_paths_per_anchor < 1:
            raise ValueError("decode limits must be >= 1")


def encode_grid(entities, n: int) -> RelationGrid:
    """Encode a mention set: NNW between consecutive mention tokens, typed
    THW from tail to head (single-token mentions get only the diagonal THW).

    Raises ConflictError when two mentions need different types at one THW
    cell; duplicate mentions collapse silently.
    """
    grid = RelationGrid(n=n)
    anchor_owner: dict[tuple[int, int], EntityMention] = {}
    for mention in sorted(set(entities)):
        if mention.tail >= n:
            raise ValueError(
                f"mention {list(mention.token_indices)} does not fit in {n} tokens"
            )
        for a, b in zip(mention.token_indices, mention.token_indices[1:]):
            grid.set_cell(a, b, NNW)
        cell = (mention.tail, mention.head)
        label = thw(mention.type_label)
        existing = grid.label_at(*cell)
        if existing != NONE and existing != label:
            raise ConflictError(cell, anchor_owner[cell], mention)
        grid.set_cell(*cell, label)
        anchor_owner[cell] = mention
    return grid


def decode_grid(grid: RelationGrid, limits: DecodeLimits | None = None) -> list[EntityMention]:
    """Enumerate mentions from a grid.

    For every THW(type) at (tail, head), every strictly increasing NNW path
    head = w1 < ... < wk = tail (k <= max_entity_tokens) becomes a mention
    of that type; head == tail is the single-token mention.  Enumeration is
    depth-first in increasing successor order and stops per anchor after
    max_paths_per_anchor paths.  Output is deduplicated and sorted.
    """
    if limits is None:
        limits = DecodeLimits()
    successors: dict[int, list[int]] = {}
    anchors: list[tuple[int, int, str]] = []
    for (i, j), label in grid.cells.items():
        if label == NNW:
            successors.setdefault(i, []).append(j)
        else:
            type_label = thw_type(label)
            if type_label is not None:
                anchors.append((i, j, type_label))
    for succ in successors.values():
        succ.sort()
    anchors.sort()

    found: set[EntityMention] = set()
    for tail, head, type_label in anchors:
        if head == tail:
            found.add(EntityMention(type_label, (head,)))
            continue
        emitted = 0
        path = [head]

        def walk(node: int) -> bool:
            """DFS continuation; returns False once the anchor cap is hit."""
            nonlocal emitted
            for nxt in successors.get(node, ()):
                if nxt > tail:
                    break
                if nxt == tail:
                    found.add(EntityMention(type_label, tuple(path) + (tail,)))
                    emitted += 1
                    if emitted >= limits.max_paths_per_anchor:
                        return False
                elif len(path) + 1 < limits.max_entity_tokens:
                    path.append(nxt)
                    alive = walk(nxt)
                    path.pop()
                    if not alive:
                        return False
            return True

        if limits.max_entity_tokens >= 2:
            walk(head)

    return sorted(found, key=lambda m: (m.head, len(m.token_indices), m.type_label, m.token_indices))


def decode_scores(scores: GridScores, limits: DecodeLimits | None = None) -> list[EntityMention]:
    """Argmax each cell into a grid, then decode.

    Ties break toward the earliest label in the label list; an argmax that
    would violate the triangle layout is forced to NONE.
    """
    best = np.argmax(scores.dist, axis=2)  # first occurrence wins ties
    grid = RelationGrid(n=scores.n)
    for i in range(scores.n):
        for j in range(scores.n):
            label = scores.labels[best[i, j]]
            if label == NONE:
                continue
            if label == NNW and not i < j:
                continue
            if thw_type(label) is not None and i < j:
                continue
            grid.set_cell(i, j, label)
    return decode_grid(grid, limits)


def fuse_scores(members: list[GridScores]) -> GridScores:
    """Mean-pool member score tensors cell by cell, label by label.

    Uses exact summation so the result is identical under any member
    permutation.  Raises ShapeMismatch on differing n or label lists.
    """
    if not members:
        raise ShapeMismatch("fuse_scores needs at least one member")
    first = members[0]
    for m in members[1:]:
        if m.n != first.n:
            raise ShapeMismatch(f"member n {m.n} != {first.n}")
        if m.labels != first.labels:
            raise ShapeMismatch(f"member labels {m.labels} != {first.labels}")
    if len(members) == 1:
        return GridScores(first.n, list(first.labels), first.dist.copy())
    count = len(members)
    fused = np.empty_like(first.dist)
    stack = [m.dist for m in members]
    for i in range(first.n):
        for j in range(first.n):
            for k in range(len(first.labels)):
                fused[i, j, k] = math.fsum(d[i, j, k] for d in stack) / count
    return GridScores(first.n, list(first.labels), fused)


def scores_from_grid(grid: RelationGrid, labels: list[str] | None = None,
                     confidence: float = 1.0) -> GridScores:
    """One-hot style score tensor matching a grid; handy for tests and demos.

    With confidence < 1 the remaining mass spreads uniformly over the other
    labels, keeping the argmax equal to the grid cell label.
    """
    if labels is None:
        types = sorted({t for t in map(thw_type, grid.cells.values()) if t is not None})
        labels = [NONE, NNW] + [thw(t) for t in types]
    if not 0 < confidence <= 1:
        raise ValueError("confidence must be in (0, 1]")
    index = {label: k for k, label in enumerate(labels)}
    L = len(labels)
    rest = (1.0 - confidence) / (L - 1) if L > 1 else 0.0
    dist = np.full((grid.n, grid.n, L), rest, dtype=np.float64)
    for i in range(grid.n):
        for j in range(grid.n):
            dist[i, j, index[grid.label_at(i, j)]] = confidence
    return GridScores(grid.n, list(labels), dist)
