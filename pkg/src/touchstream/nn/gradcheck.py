"""Analytic-vs-numeric gradient comparison via central finite differences."""

import numpy as np

from touchstream.errors import ValidationError

from .training import mse_loss, nll_loss


def _loss_only(model, x, label):
    y = model.forward(x)
    if model.output_kind == "regression":
        loss, _ = mse_loss(y, np.asarray(label, dtype=np.float64)[None])
    else:
        loss, _ = nll_loss(y, np.asarray([label]))
    return loss


def grad_check(model, window, label, eps=1e-4, n_samples=200, seed=0):
    """Max relative error between analytic and finite-difference gradients.

    Samples at least two indices from every parameter tensor (so every
    parameterized layer type is covered) and tops up to ``n_samples``
    proportionally to tensor size.  Runs in float64 regardless of the
    model's storage dtype.
    """
    if not (1e-6 <= eps <= 1e-3):
        raise ValidationError("eps must be in [1e-6, 1e-3]")
    m = model.astype(np.float64)
    x = np.asarray(window, dtype=np.float64)[None]

    m.zero_grad()
    y, caches = m.forward_train(x)
    if m.output_kind == "regression":
        _, dout = mse_loss(y, np.asarray(label, dtype=np.float64)[None])
    else:
        _, dout = nll_loss(y, np.asarray([label]))
    m.backward(dout, caches)
    analytic = m.grads()
    params = m.parameters()

    rng = np.random.default_rng(seed)
    names = sorted(params)
    picks = []
    for name in names:
        size = params[name].size
        k = min(2, size)
        picks.extend((name, int(i)) for i in rng.choice(size, size=k, replace=False))
    sizes = np.array([params[n].size for n in names])
    cum = np.cumsum(sizes)
    for fid in rng.integers(0, cum[-1], size=max(0, n_samples - len(picks))):
        j = int(np.searchsorted(cum, fid, side="right"))
        picks.append((names[j], int(fid - (cum[j] - sizes[j]))))

    max_rel = 0.0
    for name, idx in picks:
        tensor = params[name]
        orig = tensor.flat[idx]
        tensor.flat[idx] = orig + eps
        lp = _loss_only(m, x, label)
        tensor.flat[idx] = orig - eps
        lm = _loss_only(m, x, label)
        tensor.flat[idx] = orig
        numeric = (lp - lm) / (2.0 * eps)
        a = analytic.get(name, np.zeros_like(tensor)).flat[idx]
        rel = abs(a - numeric) / (abs(a) + abs(numeric) + 1e-8)
        max_rel = max(max_rel, float(rel))
    return max_rel
