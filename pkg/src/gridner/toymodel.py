"""Deterministic bag-of-tokens logistic classifier.

Feature hashing plus a logistic model with "backbone" (feature weights)
and "head" (bias) parameter groups.  It exists to exercise the loss /
optimizer / EMA / ensembling machinery end to end with exactly checkable
gradients, not to model language.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyClass, ShapeMismatch
from .optim import (
    AdamWConfig,
    EmaState,
    FocalParams,
    ParamVector,
    adamw_init,
    adamw_step,
    ema_init,
    ema_update,
    focal_loss_grad,
    sigmoid,
)

__all__ = [
    "HashedFeatures",
    "ToyModel",
    "TrainConfig",
    "hash_token",
    "featurize",
    "predict_proba",
    "train",
    "save_checkpoint",
    "load_checkpoint",
]

BACKBONE = "backbone"
HEAD = "head"


def hash_token(token: str, dim: int, seed: int) -> int:
    """Stable cross-platform token index: keyed blake2b mod a power of two."""
    key = seed.to_bytes(8, "little", signed=True)
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little") & (dim - 1)


@dataclass(frozen=True)
class HashedFeatures:
    """Sparse nonnegative token counts in a power-of-two feature space."""

    dim: int
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1 or self.dim & (self.dim - 1):
            raise ValueError(f"dim must be a power of two, got {self.dim}")
        for idx, cnt in self.counts.items():
            if not 0 <= idx < self.dim:
                raise ValueError(f"feature index {idx} outside [0, {self.dim})")
            if cnt < 1:
                raise ValueError(f"count for index {idx} must be >= 1")


def featurize(tokens, dim: int = 2 ** 18, seed: int = 0) -> HashedFeatures:
    """Hash each token to an index and accumulate counts."""
    counts: dict[int, int] = {}
    for token in tokens:
        idx = hash_token(token, dim, seed)
        counts[idx] = counts.get(idx, 0) + 1
    return HashedFeatures(dim=dim, counts=counts)


@dataclass
class ToyModel:
    """Logistic model: indices [0, dim) are feature weights, index dim is bias."""

    dim: int
    hash_seed: int
    params: ParamVector

    def __post_init__(self):
        if len(self.params) != self.dim + 1:
            raise ShapeMismatch(
                f"param vector length {len(self.params)} != dim + 1 = {self.dim + 1}"
            )

    @property
    def bias(self) -> float:
        return float(self.params.values[self.dim])


def new_model(dim: int, hash_seed: int) -> ToyModel:
    groups = (BACKBONE,) * dim + (HEAD,)
    return ToyModel(dim, hash_seed, ParamVector(np.zeros(dim + 1), groups))


def _logit(values: np.ndarray, dim: int, features: HashedFeatures) -> float:
    z = values[dim]
    for idx, cnt in features.counts.items():
        z += values[idx] * cnt
    return float(z)


def predict_proba(model: ToyModel, features: HashedFeatures,
                  params: ParamVector | None = None) -> float:
    """Sigmoid of weights . counts + bias; pass params to score e.g. the
    EMA-debiased vector with the same model layout."""
    if features.dim != model.dim:
        raise ShapeMismatch(f"feature dim {features.dim} != model dim {model.dim}")
    values = model.params.values if params is None else params.values
    if len(values) != model.dim + 1:
        raise ShapeMismatch("params do not match model layout")
    return sigmoid(_logit(values, model.dim, features))


@dataclass(frozen=True)
class TrainConfig:
    """Knobs for one training run; defaults mirror the CLI defaults."""

    loss: str = "focal"  # "ce" | "focal"
    focal: FocalParams = FocalParams()
    adamw: AdamWConfig = AdamWConfig()
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0
    ema_decay: float = 0.999
    oversample: bool = False
    dim: int = 2 ** 18
    hash_seed: int = 0

    def __post_init__(self):
        if self.loss not in ("ce", "focal"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")


def _balance(examples, rng: random.Random):
    """Duplicate minority-class examples (with replacement) until balanced."""
    pos = [ex for ex in examples if ex[1] == 1]
    neg = [ex for ex in examples if ex[1] == 0]
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    extra = [rng.choice(minority) for _ in range(len(majority) - len(minority))]
    return list(examples) + extra


def train(examples, config: TrainConfig) -> tuple[ToyModel, EmaState]:
    """Mini-batch training loop, fully deterministic given the config seed.

    examples: sequence of (HashedFeatures, label) with label in {0, 1}.
    Shuffles per epoch, steps AdamW per batch (last short batch kept),
    and updates the EMA shadow after every step.
    """
    examples = list(examples)
    if not examples:
        raise EmptyClass("empty dataset")
    labels = {label for _, label in examples}
    if labels != {0, 1}:
        raise EmptyClass(f"need both classes, got labels {sorted(labels)}")
    for feats, _ in examples:
        if feats.dim != config.dim:
            raise ShapeMismatch(f"feature dim {feats.dim} != config dim {config.dim}")

    rng = random.Random(config.seed)
    if config.oversample:
        examples = _balance(examples, rng)

    model = new_model(config.dim, config.hash_seed)
    params = model.params
    opt_state = adamw_init(params)
    ema = ema_init(params, config.ema_decay)
    n = len(examples)
    order = list(range(n))

    for _ in range(config.epochs):
        rng.shuffle(order)
        for lo in range(0, n, config.batch_size):
            batch = order[lo:lo + config.batch_size]
            grads = np.zeros(config.dim + 1)
            inv = 1.0 / len(batch)
            for i in batch:
                feats, y = examples[i]
                z = _logit(params.values, config.dim, feats)
                if config.loss == "focal":
                    dz = focal_loss_grad(z, y, config.focal)
                else:
                    dz = sigmoid(z) - y
                dz *= inv
                for idx, cnt in feats.counts.items():
                    grads[idx] += dz * cnt
                grads[config.dim] += dz
            opt_state, params = adamw_step(opt_state, params, grads, config.adamw)
            ema = ema_update(ema, params)

    return ToyModel(config.dim, config.hash_seed, params), ema


def save_checkpoint(path, model: ToyModel, ema: EmaState | None = None):
    """Write the sparse JSON checkpoint format."""
    values = model.params.values
    weights = {str(i): values[i] for i in range(model.dim) if values[i] != 0.0}
    obj = {
        "dim": model.dim,
        "seed": model.hash_seed,
        "weights": weights,
        "bias": model.bias,
    }
    if ema is not None:
        shadow = ema.shadow
        obj["ema"] = {
            "decay": ema.decay,
            "step": ema.step,
            "shadow": {
                "weights": {str(i): shadow[i] for i in range(model.dim) if shadow[i] != 0.0},
                "bias": float(shadow[model.dim]),
            },
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False)
        fh.write("\n")


def load_checkpoint(path) -> tuple[ToyModel, EmaState | None]:
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    dim = obj["dim"]
    values = np.zeros(dim + 1)
    for key, val in obj["weights"].items():
        values[int(key)] = val
    values[dim] = obj["bias"]
    groups = (BACKBONE,) * dim + (HEAD,)
    model = ToyModel(dim, obj["seed"], ParamVector(values, groups))
    ema = None
    if "ema" in obj:
        blob = obj["ema"]
        shadow = np.zeros(dim + 1)
        for key, val in blob["shadow"]["weights"].items():
            shadow[int(key)] = val
        shadow[dim] = blob["shadow"]["bias"]
        ema = EmaState(blob["decay"], blob["step"], shadow, groups)
    return model, ema
