"""Full-batch training loop with Adam and optional validation checkpointing."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from cryptocast.nn.layers import backward, forward_batch
from cryptocast.nn.model import ModelError, NetworkModel

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    """Loss or a parameter became non-finite during training."""


def mse_loss(predictions, targets) -> float:
    """Mean squared error over aligned vectors of equal positive length."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1 or len(p) == 0:
        raise ModelError(f"mse needs equal-length vectors, got {p.shape} and {t.shape}")
    d = p - t
    return float(np.mean(d * d))


@dataclass
class AdamState:
    """Adam optimizer state: per-parameter first and second moments."""

    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ModelError(f"learning rate must be positive, got {self.lr}")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ModelError("beta coefficients must lie in [0, 1)")

    @classmethod
    def for_model(cls, model: NetworkModel, lr: float, **kw) -> "AdamState":
        state = cls(lr=lr, **kw)
        for _, arr in model.parameters():
            state.m.append(np.zeros_like(arr))
            state.v.append(np.zeros_like(arr))
        return state


def adam_step(params: list[np.ndarray], grads: list[np.ndarray], state: AdamState) -> AdamState:
    """One bias-corrected Adam update, applied to params in place."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ModelError(
            f"parameter/gradient/state counts differ: {len(params)}, {len(grads)}, {len(state.m)}"
        )
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bias1 = 1.0 - b1**state.step
    bias2 = 1.0 - b2**state.step
    for arr, g, m, v in zip(params, grads, state.m, state.v):
        if arr.shape != g.shape:
            raise ModelError(f"gradient shape {g.shape} does not match parameter {arr.shape}")
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        arr -= state.lr * (m / bias1) / (np.sqrt(v / bias2) + state.epsilon)
    return state


def clip_gradients(grads: list[np.ndarray], max_norm: float) -> float:
    """Scale gradients in place so their global L2 norm is at most max_norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads))
    if total > max_norm > 0:
        scale = max_norm / total
        for g in grads:
            g *= scale
    return total


@dataclass
class TrainHistory:
    """Per-epoch training losses, optional validation metric, best epoch (1-based)."""

    train_loss: list[float]
    val_metric: list[float]
    best_epoch: int


def train(
    model: NetworkModel,
    train_set,
    epochs: int,
    lr: float,
    val_hook=None,
    clip_norm: float | None = None,
):
    """Train full-batch with Adam for a fixed number of epochs.

    Each epoch: compute loss and exact gradients on the whole training
    batch, then one Adam update. val_hook(model), when given, runs after
    the update; the lowest value (strictly smaller) marks the best epoch
    and those weights are restored at the end. Without a hook the final
    weights stand and best_epoch is the last epoch.

    Returns (TrainHistory, model); the model is updated in place.
    """
    if epochs < 1:
        raise ModelError(f"epochs must be >= 1, got {epochs}")
    state = AdamState.for_model(model, lr=lr)
    params = [arr for _, arr in model.parameters()]

    history = TrainHistory(train_loss=[], val_metric=[], best_epoch=0)
    best_value = math.inf
    best_weights = None
    targets = train_set.targets if hasattr(train_set, "targets") else np.asarray(train_set[1])

    for epoch in range(1, epochs + 1):
        preds, cache = forward_batch(model, train_set.inputs if hasattr(train_set, "inputs") else train_set[0])
        loss = mse_loss(preds, targets)
        if not math.isfinite(loss):
            raise TrainingDiverged(f"training loss became non-finite at epoch {epoch}: {loss}")
        grads = backward(model, train_set, cache)
        if clip_norm is not None:
            clip_gradients(grads, clip_norm)
        adam_step(params, grads, state)
        history.train_loss.append(loss)

        if val_hook is not None:
            value = float(val_hook(model))
            if not math.isfinite(value):
                raise TrainingDiverged(f"validation metric became non-finite at epoch {epoch}: {value}")
            history.val_metric.append(value)
            if value < best_value:
                best_value = value
                history.best_epoch = epoch
                best_weights = model.copy_weights()
        else:
            history.best_epoch = epoch

    if best_weights is not None:
        model.set_weights(best_weights)
    log.info(
        "trained %d epoch(s): first loss %.6g, last loss %.6g, best epoch %d",
        epochs, history.train_loss[0], history.train_loss[-1], history.best_epoch,
    )
    return history, model
