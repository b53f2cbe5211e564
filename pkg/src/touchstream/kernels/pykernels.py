"""Pure NumPy implementations of the hot compute kernels.

These are the fallback versions of the kernels in ``_ckernels.pyx``; both
backends share the same signatures and cache conventions so they can be
swapped at import time (see ``touchstream.kernels``).

Array conventions:
    x        [B, C, L]   batch, channels, time
    w (conv) [F, C, K]   filters, in-channels, taps
    w (dw)   [C, K]      one filter per channel
    lstm x   [B, T, I]   gate order along the 4H axis is (i, f, g, o)

Convolutions are valid (no padding): Lo = (L - K) // stride + 1.
Max pooling is non-overlapping: Lo = L // size.
"""

import numpy as np


def conv1d_forward(x, w, b, stride):
    B, C, L = x.shape
    F, _, K = w.shape
    Lo = (L - K) // stride + 1
    cols = np.lib.stride_tricks.sliding_window_view(x, K, axis=2)[:, :, ::stride]
    # [B, Lo, C*K] @ [C*K, F] -> [B, Lo, F]
    cols2 = np.ascontiguousarray(cols.transpose(0, 2, 1, 3)).reshape(B, Lo, C * K)
    y = cols2 @ w.reshape(F, C * K).T + b
    return np.ascontiguousarray(y.transpose(0, 2, 1))


def conv1d_backward(x, w, stride, dy):
    B, C, L = x.shape
    F, _, K = w.shape
    Lo = dy.shape[2]
    cols = np.lib.stride_tricks.sliding_window_view(x, K, axis=2)[:, :, ::stride]
    cols2 = np.ascontiguousarray(cols.transpose(0, 2, 1, 3)).reshape(B, Lo, C * K)
    dy2 = np.ascontiguousarray(dy.transpose(0, 2, 1))  # [B, Lo, F]
    db = dy.sum(axis=(0, 2))
    dw = np.tensordot(dy2, cols2, axes=([0, 1], [0, 1])).reshape(F, C, K)
    dx = np.zeros_like(x)
    for k in range(K):
        wk = w[:, :, k]  # [F, C]
        dx[:, :, k : k + stride * Lo : stride] += np.matmul(wk.T, dy)
    return dx, dw, db


def dwconv1d_forward(x, w, b, stride):
    B, C, L = x.shape
    K = w.shape[1]
    Lo = (L - K) // stride + 1
    cols = np.lib.stride_tricks.sliding_window_view(x, K, axis=2)[:, :, ::stride]
    y = np.einsum("bclk,ck->bcl", cols, w) + b[:, None]
    return np.ascontiguousarray(y)


def dwconv1d_backward(x, w, stride, dy):
    B, C, L = x.shape
    K = w.shape[1]
    Lo = dy.shape[2]
    cols = np.lib.stride_tricks.sliding_window_view(x, K, axis=2)[:, :, ::stride]
    db = dy.sum(axis=(0, 2))
    dw = np.einsum("bcl,bclk->ck", dy, cols)
    dx = np.zeros_like(x)
    for k in range(K):
        dx[:, :, k : k + stride * Lo : stride] += dy * w[:, k][None, :, None]
    return dx, dw, db


def maxpool1d_forward(x, size):
    B, C, L = x.shape
    Lo = L // size
    xv = x[:, :, : Lo * size].reshape(B, C, Lo, size)
    idx = xv.argmax(axis=3)
    y = np.take_along_axis(xv, idx[..., None], axis=3)[..., 0]
    return np.ascontiguousarray(y), idx.astype(np.int64)


def maxpool1d_backward(idx, L, size, dy):
    B, C, Lo = dy.shape
    dx = np.zeros((B, C, L), dtype=dy.dtype)
    dxv = dx[:, :, : Lo * size].reshape(B, C, Lo, size)
    np.put_along_axis(dxv, idx[..., None], dy[..., None], axis=3)
    return dx


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def lstm_forward(x, wx, wh, b):
    B, T, I = x.shape
    H = wh.shape[0]
    pre = x @ wx + b  # [B, T, 4H]
    i = np.empty((B, T, H), dtype=x.dtype)
    f = np.empty_like(i)
    g = np.empty_like(i)
    o = np.empty_like(i)
    c = np.empty_like(i)
    hc = np.empty_like(i)
    h = np.empty_like(i)
    h_prev = np.zeros((B, H), dtype=x.dtype)
    c_prev = np.zeros((B, H), dtype=x.dtype)
    for t in range(T):
        z = pre[:, t] + h_prev @ wh
        i[:, t] = _sigmoid(z[:, :H])
        f[:, t] = _sigmoid(z[:, H : 2 * H])
        g[:, t] = np.tanh(z[:, 2 * H : 3 * H])
        o[:, t] = _sigmoid(z[:, 3 * H :])
        c[:, t] = f[:, t] * c_prev + i[:, t] * g[:, t]
        hc[:, t] = np.tanh(c[:, t])
        h[:, t] = o[:, t] * hc[:, t]
        h_prev = h[:, t]
        c_prev = c[:, t]
    return h, (i, f, g, o, c, hc)


def lstm_backward(x, wx, wh, cache, dh):
    i, f, g, o, c, hc = cache
    B, T, I = x.shape
    H = wh.shape[0]
    h = o * hc
    dz = np.zeros((B, T, 4 * H), dtype=x.dtype)
    dh_next = np.zeros((B, H), dtype=x.dtype)
    dc_next = np.zeros((B, H), dtype=x.dtype)
    for t in range(T - 1, -1, -1):
        dht = dh[:, t] + dh_next
        dct = dht * o[:, t] * (1.0 - hc[:, t] ** 2) + dc_next
        di = dct * g[:, t] * i[:, t] * (1.0 - i[:, t])
        c_prev = c[:, t - 1] if t > 0 else np.zeros((B, H), dtype=x.dtype)
        df = dct * c_prev * f[:, t] * (1.0 - f[:, t])
        dg = dct * i[:, t] * (1.0 - g[:, t] ** 2)
        do = dht * hc[:, t] * o[:, t] * (1.0 - o[:, t])
        dz[:, t, :H] = di
        dz[:, t, H : 2 * H] = df
        dz[:, t, 2 * H : 3 * H] = dg
        dz[:, t, 3 * H :] = do
        dh_next = dz[:, t] @ wh.T
        dc_next = dct * f[:, t]
    dx = dz @ wx.T
    dwx = np.tensordot(x, dz, axes=([0, 1], [0, 1]))
    h_prev = np.concatenate([np.zeros((B, 1, H), dtype=x.dtype), h[:, :-1]], axis=1)
    dwh = np.tensordot(h_prev, dz, axes=([0, 1], [0, 1]))
    db = dz.sum(axis=(0, 1))
    return dx, dwx, dwh, db
