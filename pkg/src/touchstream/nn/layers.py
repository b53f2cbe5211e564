"""Layer zoo for the CNN-LSTM models.

Forward passes are pure (no state written), so concurrent inference over
shared weights is safe.  Training caches are carried in an explicit
per-call list; gradients accumulate into each layer's ``grad`` dict and are
cleared with ``zero_grad``.

Shapes: convolutional layers operate on [B, C, L]; the LSTM takes [B, T, I]
(use ToTimeMajor to switch); Dense accepts [B, I] or [B, T, I].
"""

import numpy as np

from touchstream import kernels


class Layer:
    """Base layer: named parameters, buffers, and gradient storage."""

    def __init__(self, name):
        self.name = name
        self.params = {}  # trainable
        self.buffers = {}  # serialized but not trained
        self.grad = {}

    def zero_grad(self):
        self.grad = {k: np.zeros_like(v) for k, v in self.params.items()}

    def _acc_grad(self, key, value):
        if key in self.grad:
            self.grad[key] += value
        else:
            self.grad[key] = value

    def forward(self, x, cache=None):
        raise NotImplementedError

    def backward(self, dy, cache):
        raise NotImplementedError

    def out_shape(self, shape):
        return shape


class InputNorm(Layer):
    """Per-channel standardization with dataset statistics (non-trainable)."""

    def __init__(self, name, channels):
        super().__init__(name)
        self.buffers = {
            "mean": np.zeros(channels, dtype=np.float32),
            "std": np.ones(channels, dtype=np.float32),
        }

    def set_stats(self, mean, std):
        dt = self.buffers["mean"].dtype
        self.buffers["mean"] = np.asarray(mean, dtype=dt)
        self.buffers["std"] = np.maximum(np.asarray(std, dtype=dt), 1e-6)

    def forward(self, x, cache=None):
        mean = self.buffers["mean"].astype(x.dtype)
        std = self.buffers["std"].astype(x.dtype)
        return (x - mean[:, None]) / std[:, None]

    def backward(self, dy, cache):
        std = self.buffers["std"].astype(dy.dtype)
        return dy / std[:, None]


class Conv1d(Layer):
    def __init__(self, name, c_in, c_out, kernel, stride, rng=None):
        super().__init__(name)
        self.c_in, self.c_out, self.kernel, self.stride = c_in, c_out, kernel, stride
        scale = np.sqrt(2.0 / (c_in * kernel))
        rng = rng or np.random.default_rng(0)
        self.params = {
            "w": (rng.standard_normal((c_out, c_in, kernel)) * scale).astype(np.float32),
            "b": np.zeros(c_out, dtype=np.float32),
        }

    def forward(self, x, cache=None):
        y = kernels.conv1d_forward(x, self.params["w"].astype(x.dtype), self.params["b"].astype(x.dtype), self.stride)
        if cache is not None:
            cache.append(x)
        return y

    def backward(self, dy, cache):
        x = cache
        dx, dw, db = kernels.conv1d_backward(x, self.params["w"].astype(dy.dtype), self.stride, dy)
        self._acc_grad("w", dw)
        self._acc_grad("b", db)
        return dx

    def out_shape(self, shape):
        c, length = shape
        return (self.c_out, (length - self.kernel) // self.stride + 1)


class DepthwiseSeparableConv1d(Layer):
    """Per-channel convolution followed by a 1x1 channel mix."""

    def __init__(self, name, c_in, c_out, kernel, stride, rng=None):
        super().__init__(name)
        self.c_in, self.c_out, self.kernel, self.stride = c_in, c_out, kernel, stride
        rng = rng or np.random.default_rng(0)
        self.params = {
            "dw": (rng.standard_normal((c_in, kernel)) * np.sqrt(2.0 / kernel)).astype(np.float32),
            "pw": (rng.standard_normal((c_out, c_in, 1)) * np.sqrt(2.0 / c_in)).astype(np.float32),
            "b": np.zeros(c_out, dtype=np.float32),
        }

    def forward(self, x, cache=None):
        zero = np.zeros(self.c_in, dtype=x.dtype)
        mid = kernels.dwconv1d_forward(x, self.params["dw"].astype(x.dtype), zero, self.stride)
        y = kernels.conv1d_forward(mid, self.params["pw"].astype(x.dtype), self.params["b"].astype(x.dtype), 1)
        if cache is not None:
            cache.append((x, mid))
        return y

    def backward(self, dy, cache):
        x, mid = cache
        dmid, dpw, db = kernels.conv1d_backward(mid, self.params["pw"].astype(dy.dtype), 1, dy)
        dx, ddw, _ = kernels.dwconv1d_backward(x, self.params["dw"].astype(dy.dtype), self.stride, dmid)
        self._acc_grad("dw", ddw)
        self._acc_grad("pw", dpw)
        self._acc_grad("b", db)
        return dx

    def out_shape(self, shape):
        c, length = shape
        return (self.c_out, (length - self.kernel) // self.stride + 1)


class MaxPool1d(Layer):
    def __init__(self, name, size):
        super().__init__(name)
        self.size = size

    def forward(self, x, cache=None):
        y, idx = kernels.maxpool1d_forward(x, self.size)
        if cache is not None:
            cache.append((idx, x.shape[2]))
        return y

    def backward(self, dy, cache):
        idx, length = cache
        return kernels.maxpool1d_backward(idx, length, self.size, dy)

    def out_shape(self, shape):
        c, length = shape
        return (c, length // self.size)


class Downsample2(Layer):
    """Keep every second sample (no anti-alias filter)."""

    def forward(self, x, cache=None):
        if cache is not None:
            cache.append(x.shape[2])
        return np.ascontiguousarray(x[:, :, ::2])

    def backward(self, dy, cache):
        length = cache
        dx = np.zeros(dy.shape[:2] + (length,), dtype=dy.dtype)
        dx[:, :, ::2] = dy
        return dx

    def out_shape(self, shape):
        c, length = shape
        return (c, (length + 1) // 2)


class ToTimeMajor(Layer):
    """[B, C, L] -> [B, L, C] so the LSTM sees time steps."""

    def forward(self, x, cache=None):
        return np.ascontiguousarray(x.transpose(0, 2, 1))

    def backward(self, dy, cache):
        return np.ascontiguousarray(dy.transpose(0, 2, 1))

    def out_shape(self, shape):
        c, length = shape
        return (length, c)


class LSTM(Layer):
    """Single LSTM layer; hidden state is not carried across calls."""

    def __init__(self, name, input_size, hidden, return_sequences, rng=None):
        super().__init__(name)
        self.input_size, self.hidden = input_size, hidden
        self.return_sequences = return_sequences
        rng = rng or np.random.default_rng(0)
        s = 1.0 / np.sqrt(hidden)
        b = np.zeros(4 * hidden, dtype=np.float32)
        b[hidden : 2 * hidden] = 1.0  # forget-gate bias
        self.params = {
            "wx": (rng.uniform(-s, s, (input_size, 4 * hidden))).astype(np.float32),
            "wh": (rng.uniform(-s, s, (hidden, 4 * hidden))).astype(np.float32),
            "b": b,
        }

    def forward(self, x, cache=None):
        h, gates = kernels.lstm_forward(
            x, self.params["wx"].astype(x.dtype), self.params["wh"].astype(x.dtype), self.params["b"].astype(x.dtype)
        )
        if cache is not None:
            cache.append((x, gates))
        if self.return_sequences:
            return h
        return np.ascontiguousarray(h[:, -1])

    def backward(self, dy, cache):
        x, gates = cache
        B, T, _ = x.shape
        if self.return_sequences:
            dh = dy
        else:
            dh = np.zeros((B, T, self.hidden), dtype=dy.dtype)
            dh[:, -1] = dy
        dx, dwx, dwh, db = kernels.lstm_backward(
            x, self.params["wx"].astype(dy.dtype), self.params["wh"].astype(dy.dtype), gates, dh
        )
        self._acc_grad("wx", dwx)
        self._acc_grad("wh", dwh)
        self._acc_grad("b", db)
        return dx

    def out_shape(self, shape):
        t, c = shape
        return (t, self.hidden) if self.return_sequences else (self.hidden,)


class Dense(Layer):
    """Affine layer over the trailing axis, with optional ReLU."""

    def __init__(self, name, n_in, n_out, relu=False, rng=None):
        super().__init__(name)
        self.n_in, self.n_out, self.relu = n_in, n_out, relu
        rng = rng or np.random.default_rng(0)
        scale = np.sqrt(2.0 / n_in) if relu else np.sqrt(1.0 / n_in)
        self.params = {
            "w": (rng.standard_normal((n_in, n_out)) * scale).astype(np.float32),
            "b": np.zeros(n_out, dtype=np.float32),
        }

    def forward(self, x, cache=None):
        y = x @ self.params["w"].astype(x.dtype) + self.params["b"].astype(x.dtype)
        if self.relu:
            mask = y > 0
            y = y * mask
        else:
            mask = None
        if cache is not None:
            cache.append((x, mask))
        return y

    def backward(self, dy, cache):
        x, mask = cache
        if mask is not None:
            dy = dy * mask
        w = self.params["w"].astype(dy.dtype)
        if x.ndim == 3:
            dw = np.tensordot(x, dy, axes=([0, 1], [0, 1]))
            db = dy.sum(axis=(0, 1))
        else:
            dw = x.T @ dy
            db = dy.sum(axis=0)
        self._acc_grad("w", dw)
        self._acc_grad("b", db)
        return dy @ w.T

    def out_shape(self, shape):
        return shape[:-1] + (self.n_out,)


class LogSoftmax(Layer):
    """Log-softmax over the trailing axis."""

    def forward(self, x, cache=None):
        m = x.max(axis=-1, keepdims=True)
        z = x - m
        lse = np.log(np.exp(z).sum(axis=-1, keepdims=True))
        y = z - lse
        if cache is not None:
            cache.append(y)
        return y

    def backward(self, dy, cache):
        y = cache
        return dy - np.exp(y) * dy.sum(axis=-1, keepdims=True)


class Flatten(Layer):
    def forward(self, x, cache=None):
        if cache is not None:
            cache.append(x.shape)
        return np.ascontiguousarray(x.reshape(x.shape[0], -1))

    def backward(self, dy, cache):
        return dy.reshape(cache)

    def out_shape(self, shape):
        n = 1
        for s in shape:
            n *= s
        return (n,)


class CovarianceFeatures(Layer):
    """Flattened per-subwindow channel covariance of the input block.

    [B, C, L] -> [B, C*C, S] with S = (L - subwindow) // stride + 1; each
    step is the sample covariance (ddof=1) of the C channels over one
    subwindow, flattened row-major.
    """

    def __init__(self, name, subwindow, stride):
        super().__init__(name)
        if subwindow < 2:
            raise ValueError("covariance subwindow must be >= 2")
        self.subwindow, self.stride = subwindow, stride

    def forward(self, x, cache=None):
        B, C, L = x.shape
        W, s = self.subwindow, self.stride
        wins = np.lib.stride_tricks.sliding_window_view(x, W, axis=2)[:, :, ::s]  # [B,C,S,W]
        xc = wins - wins.mean(axis=3, keepdims=True)
        cov = np.einsum("bcsw,bdsw->bscd", xc, xc) / (W - 1)  # [B,S,C,C]
        S = cov.shape[1]
        y = np.ascontiguousarray(cov.reshape(B, S, C * C).transpose(0, 2, 1))
        if cache is not None:
            cache.append((x.shape, xc))
        return y

    def backward(self, dy, cache):
        (B, C, L), xc = cache
        W, s = self.subwindow, self.stride
        S = dy.shape[2]
        g = dy.transpose(0, 2, 1).reshape(B, S, C, C)
        gs = (g + g.transpose(0, 1, 3, 2)) / (W - 1)
        dxc = np.einsum("bscd,bdsw->bcsw", gs, xc)
        dxw = dxc - dxc.mean(axis=3, keepdims=True)
        dx = np.zeros((B, C, L), dtype=dy.dtype)
        for k in range(W):
            dx[:, :, k : k + s * S : s] += dxw[:, :, :, k]
        return dx

    def out_shape(self, shape):
        c, length = shape
        return (c * c, (length - self.subwindow) // self.stride + 1)
