"""Toy-scale training: SGD with momentum, deterministic per seed."""

from dataclasses import dataclass

import numpy as np

from touchstream.errors import DivergedError, ValidationError


@dataclass
class TrainConfig:
    lr: float = 0.05
    epochs: int = 10
    batch: int = 32
    seed: int = 0
    momentum: float = 0.9
    loss: str = ""  # "ce" or "mse"; empty selects by architecture
    class_weighting: str = "inverse"  # "inverse" or "none"
    normalize: bool = True  # set input-norm stats from the training set


def nll_loss(logp, labels, class_weights=None):
    """Weighted negative log-likelihood over log-probabilities."""
    n = logp.shape[0]
    idx = np.arange(n)
    if class_weights is None:
        w = np.ones(n, dtype=logp.dtype)
    else:
        w = class_weights[labels].astype(logp.dtype)
    wsum = w.sum()
    loss = -(w * logp[idx, labels]).sum() / wsum
    dlogp = np.zeros_like(logp)
    dlogp[idx, labels] = -w / wsum
    return float(loss), dlogp


def mse_loss(pred, target):
    diff = pred - target.astype(pred.dtype)
    loss = float((diff**2).mean())
    dpred = (2.0 / diff.size) * diff
    return loss, dpred


def inverse_frequency_weights(labels, n_classes):
    counts = np.bincount(labels, minlength=n_classes).astype(np.float64)
    counts = np.maximum(counts, 1.0)
    w = labels.shape[0] / (n_classes * counts)
    return w


def _default_loss(model):
    return "mse" if model.output_kind == "regression" else "ce"


def train(model, windows, labels, cfg=None):
    """Train in place; returns (final parameter snapshot, per-epoch loss curve).

    windows: [N, C, L] float32 matching the model input spec.
    labels:  int class indices [N] for classifiers, float targets [N, 2]
             for the regression model.
    """
    cfg = cfg or TrainConfig()
    windows = np.asarray(windows, dtype=np.float32)
    n = windows.shape[0]
    if windows.ndim != 3 or windows.shape[1:] != model.input_shape:
        raise ValidationError(
            f"dataset windows {windows.shape} do not match model input {model.input_shape}"
        )
    loss_kind = cfg.loss or _default_loss(model)
    if loss_kind == "ce":
        labels = np.asarray(labels, dtype=np.int64)
        n_classes = len(model.class_names)
        if labels.shape != (n,) or labels.min() < 0 or labels.max() >= n_classes:
            raise ValidationError("labels inconsistent with classifier architecture")
        class_weights = (
            inverse_frequency_weights(labels, n_classes)
            if cfg.class_weighting == "inverse"
            else None
        )
    elif loss_kind == "mse":
        labels = np.asarray(labels, dtype=np.float32)
        if labels.shape != (n, 2):
            raise ValidationError("regression targets must be [N, 2]")
        class_weights = None
    else:
        raise ValidationError(f"unknown loss '{loss_kind}'")

    if cfg.normalize and n > 0:
        mean = windows.mean(axis=(0, 2))
        std = windows.std(axis=(0, 2))
        model.input_norm().set_stats(mean, std)

    rng = np.random.default_rng(cfg.seed)
    velocity = {k: np.zeros_like(v) for k, v in model.parameters().items()}
    curve = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        total, seen = 0.0, 0
        for start in range(0, n, cfg.batch):
            idx = order[start : start + cfg.batch]
            xb = windows[idx]
            yb = labels[idx]
            model.zero_grad()
            out, caches = model.forward_train(xb)
            if loss_kind == "ce":
                loss, dout = nll_loss(out, yb, class_weights)
            else:
                loss, dout = mse_loss(out, yb)
            if not np.isfinite(loss):
                raise DivergedError(f"non-finite loss at epoch {epoch}", epoch)
            model.backward(dout, caches)
            grads = model.grads()
            params = model.parameters()
            for key, g in grads.items():
                v = velocity[key]
                v *= cfg.momentum
                v -= cfg.lr * g.astype(v.dtype)
                params[key] += v
            total += loss * len(idx)
            seen += len(idx)
        curve.append(total / max(seen, 1))
    snapshot = {k: v.copy() for k, v in model.parameters().items()}
    return snapshot, curve
