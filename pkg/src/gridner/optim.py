"""Losses, AdamW, and exponential moving average of parameters.

Everything here is value-in/value-out: optimizer and EMA states are
replaced, not mutated, so training stays deterministic and replayable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, ShapeMismatch, ZeroSteps

__all__ = [
    "EPS_CLIP",
    "FocalParams",
    "ParamVector",
    "EmaState",
    "GroupHyper",
    "AdamWConfig",
    "OptState",
    "cross_entropy",
    "focal_loss",
    "focal_loss_grad",
    "sigmoid",
    "ema_init",
    "ema_update",
    "ema_debias",
    "adamw_init",
    "adamw_step",
]

# Probabilities are clipped into [EPS_CLIP, 1 - EPS_CLIP] before any log.
EPS_CLIP = 1e-12


@dataclass(frozen=True)
class FocalParams:
    """Class-balance weight and hard-example exponent."""

    alpha: float = 0.25
    gamma: float = 2.0

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass
class ParamVector:
    """Flat parameter vector with a group name per index.

    Groups let the optimizer apply different learning rates / decay to
    e.g. "backbone" feature weights and the "head" bias.
    """

    values: np.ndarray
    groups: tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.groups = tuple(self.groups)
        if self.values.ndim != 1:
            raise ShapeMismatch(f"expected 1-D values, got shape {self.values.shape}")
        if len(self.groups) != len(self.values):
            raise LengthMismatch(
                f"{len(self.groups)} group ids for {len(self.values)} values"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite parameter values")

    def __len__(self) -> int:
        return len(self.values)

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.groups)


def _clip(p):
    return np.clip(p, EPS_CLIP, 1.0 - EPS_CLIP)


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


def cross_entropy(p, y) -> float:
    """Binary cross-entropy -(y log p + (1-y) log(1-p)), p clipped."""
    p = _clip(p)
    loss = -(y * np.log(p) + (1 - y) * np.log1p(-p))
    return float(loss) if np.ndim(loss) == 0 else loss


def focal_loss(p, y, params: FocalParams) -> float:
    """Focal loss; the positive branch is -alpha (1-p)^gamma log p and the
    negative branch mirrors it with weight (1-alpha) on p^gamma log(1-p)."""
    p = _clip(p)
    pos = -params.alpha * (1.0 - p) ** params.gamma * np.log(p)
    neg = -(1.0 - params.alpha) * p ** params.gamma * np.log1p(-p)
    loss = np.where(np.asarray(y) == 1, pos, neg)
    return float(loss) if np.ndim(loss) == 0 else loss


def focal_loss_grad(z, y, params: FocalParams):
    """d focal_loss / d logit with p = sigmoid(z), in closed form.

    Positive branch: alpha (1-p)^gamma (gamma p log p - (1-p));
    negative branch: (1-alpha) p^gamma (p - gamma (1-p) log(1-p)).
    """
    p = _clip(sigmoid(z))
    a, g = params.alpha, params.gamma
    gpos = a * (1.0 - p) ** g * (g * p * np.log(p) - (1.0 - p))
    gneg = (1.0 - a) * p ** g * (p - g * (1.0 - p) * np.log1p(-p))
    grad = np.where(np.asarray(y) == 1, gpos, gneg)
    return float(grad) if np.ndim(grad) == 0 else grad


@dataclass
class EmaState:
    """Decayed running average of a parameter vector ("shadow weights")."""

    decay: float
    step: int
    shadow: np.ndarray
    groups: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 < self.decay < 1:
            raise ValueError(f"decay must be in (0, 1), got {self.decay}")
        if self.step < 0:
            raise ValueError("negative step count")
        self.shadow = np.asarray(self.shadow, dtype=np.float64)


def ema_init(params: ParamVector, decay: float = 0.999) -> EmaState:
    """Fresh state: shadow starts at zero, debiasing repairs the cold start."""
    return EmaState(decay=decay, step=0, shadow=np.zeros(len(params)), groups=params.groups)


def ema_update(state: EmaState, params: ParamVector) -> EmaState:
    """shadow <- decay * shadow + (1 - decay) * theta, step <- step + 1."""
    if len(params) != len(state.shadow):
        raise LengthMismatch(
            f"params length {len(params)} != shadow length {len(state.shadow)}"
        )
    shadow = state.decay * state.shadow + (1.0 - state.decay) * params.values
    return EmaState(state.decay, state.step + 1, shadow, params.groups)


def ema_debias(state: EmaState) -> ParamVector:
    """Bias-corrected average shadow / (1 - decay^step)."""
    if state.step == 0:
        raise ZeroSteps("no EMA updates to debias")
    corrected = state.shadow / (1.0 - state.decay ** state.step)
    return ParamVector(corrected, state.groups)


@dataclass(frozen=True)
class GroupHyper:
    """Learning rate and decoupled weight decay for one parameter group."""

    lr: float
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.lr < 0 or self.weight_decay < 0:
            raise ValueError("lr and weight_decay must be >= 0")


def _default_groups() -> dict[str, GroupHyper]:
    return {
        "backbone": GroupHyper(lr=3e-5, weight_decay=0.01),
        "head": GroupHyper(lr=3e-4, weight_decay=0.0),
    }


@dataclass(frozen=True)
class AdamWConfig:
    """Per-group hyperparameters plus the shared moment constants."""

    groups: dict[str, GroupHyper] = field(default_factory=_default_groups)
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise ValueError("betas must be in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be > 0")


@dataclass
class OptState:
    """AdamW first/second moment estimates and the shared step counter."""

    step: int
    m: np.ndarray
    v: np.ndarray


def adamw_init(params: ParamVector) -> OptState:
    n = len(params)
    return OptState(step=0, m=np.zeros(n), v=np.zeros(n))


def adamw_step(
    state: OptState,
    params: ParamVector,
    grads: np.ndarray,
    config: AdamWConfig,
) -> tuple[OptState, ParamVector]:
    """One AdamW update: bias-corrected moments, then decoupled decay.

    lr and weight_decay resolve per group id; a group absent from the
    config raises KeyError rather than silently freezing parameters.
    """
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.values.shape:
        raise ShapeMismatch(f"grads shape {grads.shape} != {params.values.shape}")
    if state.m.shape != params.values.shape:
        raise ShapeMismatch(f"moment shape {state.m.shape} != {params.values.shape}")

    step = state.step + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grads
    v = config.beta2 * state.v + (1.0 - config.beta2) * grads * grads
    m_hat = m / (1.0 - config.beta1 ** step)
    v_hat = v / (1.0 - config.beta2 ** step)

    lr = np.empty(len(params))
    wd = np.empty(len(params))
    for idx, gid in enumerate(params.groups):
        hyper = config.groups[gid]
        lr[idx] = hyper.lr
        wd[idx] = hyper.weight_decay

    values = params.values - lr * m_hat / (np.sqrt(v_hat) + config.eps)
    values = values - lr * wd * values
    return OptState(step, m, v), ParamVector(values, params.groups)
