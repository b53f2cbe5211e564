# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: 1D conv, depthwise conv, max pooling, and LSTM.

Mirrors the signatures and cache conventions of ``pykernels`` exactly;
see that module for the array layout documentation.
"""

import numpy as np

cimport cython
from libc.math cimport exp, tanh

ctypedef fused floating:
    float
    double


cdef inline floating _sig(floating z) noexcept nogil:
    if z >= 0:
        return <floating>(1.0 / (1.0 + exp(-z)))
    cdef double ez = exp(z)
    return <floating>(ez / (1.0 + ez))


def conv1d_forward(floating[:, :, ::1] x, floating[:, :, ::1] w,
                   floating[::1] b, int stride):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t F = w.shape[0], K = w.shape[2]
    cdef Py_ssize_t Lo = (L - K) // stride + 1
    dtype = np.float32 if floating is float else np.float64
    ynp = np.empty((B, F, Lo), dtype=dtype)
    cdef floating[:, :, ::1] y = ynp
    cdef Py_ssize_t bi, f, l, c, k, base
    cdef floating acc
    with nogil:
        for bi in range(B):
            for f in range(F):
                for l in range(Lo):
                    base = l * stride
                    acc = b[f]
                    for c in range(C):
                        for k in range(K):
                            acc = acc + x[bi, c, base + k] * w[f, c, k]
                    y[bi, f, l] = acc
    return ynp


def conv1d_backward(floating[:, :, ::1] x, floating[:, :, ::1] w,
                    int stride, floating[:, :, ::1] dy):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t F = w.shape[0], K = w.shape[2]
    cdef Py_ssize_t Lo = dy.shape[2]
    dtype = np.float32 if floating is float else np.float64
    dxnp = np.zeros((B, C, L), dtype=dtype)
    dwnp = np.zeros((F, C, K), dtype=dtype)
    dbnp = np.zeros(F, dtype=dtype)
    cdef floating[:, :, ::1] dx = dxnp
    cdef floating[:, :, ::1] dw = dwnp
    cdef floating[::1] db = dbnp
    cdef Py_ssize_t bi, f, l, c, k, base
    cdef floating g
    with nogil:
        for bi in range(B):
            for f in range(F):
                for l in range(Lo):
                    g = dy[bi, f, l]
                    base = l * stride
                    db[f] += g
                    for c in range(C):
                        for k in range(K):
                            dw[f, c, k] += g * x[bi, c, base + k]
                            dx[bi, c, base + k] += g * w[f, c, k]
    return dxnp, dwnp, dbnp


def dwconv1d_forward(floating[:, :, ::1] x, floating[:, ::1] w,
                     floating[::1] b, int stride):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t K = w.shape[1]
    cdef Py_ssize_t Lo = (L - K) // stride + 1
    dtype = np.float32 if floating is float else np.float64
    ynp = np.empty((B, C, Lo), dtype=dtype)
    cdef floating[:, :, ::1] y = ynp
    cdef Py_ssize_t bi, c, l, k, base
    cdef floating acc
    with nogil:
        for bi in range(B):
            for c in range(C):
                for l in range(Lo):
                    base = l * stride
                    acc = b[c]
                    for k in range(K):
                        acc = acc + x[bi, c, base + k] * w[c, k]
                    y[bi, c, l] = acc
    return ynp


def dwconv1d_backward(floating[:, :, ::1] x, floating[:, ::1] w,
                      int stride, floating[:, :, ::1] dy):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t K = w.shape[1]
    cdef Py_ssize_t Lo = dy.shape[2]
    dtype = np.float32 if floating is float else np.float64
    dxnp = np.zeros((B, C, L), dtype=dtype)
    dwnp = np.zeros((C, K), dtype=dtype)
    dbnp = np.zeros(C, dtype=dtype)
    cdef floating[:, :, ::1] dx = dxnp
    cdef floating[:, ::1] dw = dwnp
    cdef floating[::1] db = dbnp
    cdef Py_ssize_t bi, c, l, k, base
    cdef floating g
    with nogil:
        for bi in range(B):
            for c in range(C):
                for l in range(Lo):
                    g = dy[bi, c, l]
                    base = l * stride
                    db[c] += g
                    for k in range(K):
                        dw[c, k] += g * x[bi, c, base + k]
                        dx[bi, c, base + k] += g * w[c, k]
    return dxnp, dwnp, dbnp


def maxpool1d_forward(floating[:, :, ::1] x, int size):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t Lo = L // size
    dtype = np.float32 if floating is float else np.float64
    ynp = np.empty((B, C, Lo), dtype=dtype)
    idxnp = np.empty((B, C, Lo), dtype=np.int64)
    cdef floating[:, :, ::1] y = ynp
    cdef long long[:, :, ::1] idx = idxnp
    cdef Py_ssize_t bi, c, l, k, best_k, base
    cdef floating best
    with nogil:
        for bi in range(B):
            for c in range(C):
                for l in range(Lo):
                    base = l * size
                    best = x[bi, c, base]
                    best_k = 0
                    for k in range(1, size):
                        if x[bi, c, base + k] > best:
                            best = x[bi, c, base + k]
                            best_k = k
                    y[bi, c, l] = best
                    idx[bi, c, l] = best_k
    return ynp, idxnp


def maxpool1d_backward(long long[:, :, ::1] idx, Py_ssize_t L, int size,
                       floating[:, :, ::1] dy):
    cdef Py_ssize_t B = dy.shape[0], C = dy.shape[1], Lo = dy.shape[2]
    dtype = np.float32 if floating is float else np.float64
    dxnp = np.zeros((B, C, L), dtype=dtype)
    cdef floating[:, :, ::1] dx = dxnp
    cdef Py_ssize_t bi, c, l
    with nogil:
        for bi in range(B):
            for c in range(C):
                for l in range(Lo):
                    dx[bi, c, l * size + idx[bi, c, l]] += dy[bi, c, l]
    return dxnp


def lstm_forward(floating[:, :, ::1] x, floating[:, ::1] wx,
                 floating[:, ::1] wh, floating[::1] b):
    cdef Py_ssize_t B = x.shape[0], T = x.shape[1], I = x.shape[2]
    cdef Py_ssize_t H = wh.shape[0]
    dtype = np.float32 if floating is float else np.float64
    pre_np = np.asarray(x).reshape(B * T, I) @ np.asarray(wx) + np.asarray(b)
    pre_np = np.ascontiguousarray(pre_np.reshape(B, T, 4 * H))
    inp = np.empty((B, T, H), dtype=dtype)
    fnp = np.empty((B, T, H), dtype=dtype)
    gnp = np.empty((B, T, H), dtype=dtype)
    onp = np.empty((B, T, H), dtype=dtype)
    cnp = np.empty((B, T, H), dtype=dtype)
    hcnp = np.empty((B, T, H), dtype=dtype)
    hnp = np.empty((B, T, H), dtype=dtype)
    cdef floating[:, :, ::1] pre = pre_np
    cdef floating[:, :, ::1] iv = inp, fv = fnp, gv = gnp, ov = onp
    cdef floating[:, :, ::1] cv = cnp, hcv = hcnp, hv = hnp
    cdef Py_ssize_t bi, t, j, hh
    cdef floating z0, z1, z2, z3, cprev, hp
    cdef floating[:, ::1] zbuf = np.empty((B, 4 * H), dtype=dtype)
    with nogil:
        for t in range(T):
            for bi in range(B):
                for j in range(4 * H):
                    z0 = pre[bi, t, j]
                    if t > 0:
                        for hh in range(H):
                            z0 = z0 + hv[bi, t - 1, hh] * wh[hh, j]
                    zbuf[bi, j] = z0
                for j in range(H):
                    z0 = zbuf[bi, j]
                    z1 = zbuf[bi, H + j]
                    z2 = zbuf[bi, 2 * H + j]
                    z3 = zbuf[bi, 3 * H + j]
                    iv[bi, t, j] = _sig(z0)
                    fv[bi, t, j] = _sig(z1)
                    gv[bi, t, j] = <floating>tanh(z2)
                    ov[bi, t, j] = _sig(z3)
                    cprev = cv[bi, t - 1, j] if t > 0 else <floating>0.0
                    cv[bi, t, j] = fv[bi, t, j] * cprev + iv[bi, t, j] * gv[bi, t, j]
                    hcv[bi, t, j] = <floating>tanh(cv[bi, t, j])
                    hv[bi, t, j] = ov[bi, t, j] * hcv[bi, t, j]
    return hnp, (inp, fnp, gnp, onp, cnp, hcnp)


def lstm_backward(floating[:, :, ::1] x, floating[:, ::1] wx,
                  floating[:, ::1] wh, cache, floating[:, :, ::1] dh):
    cdef Py_ssize_t B = x.shape[0], T = x.shape[1], I = x.shape[2]
    cdef Py_ssize_t H = wh.shape[0]
    dtype = np.float32 if floating is float else np.float64
    inp, fnp, gnp, onp, cnp, hcnp = cache
    dznp = np.zeros((B, T, 4 * H), dtype=dtype)
    cdef floating[:, :, ::1] iv = inp, fv = fnp, gv = gnp, ov = onp
    cdef floating[:, :, ::1] cv = cnp, hcv = hcnp
    cdef floating[:, :, ::1] dz = dznp
    cdef floating[:, ::1] dh_next = np.zeros((B, H), dtype=dtype)
    cdef floating[:, ::1] dc_next = np.zeros((B, H), dtype=dtype)
    cdef Py_ssize_t bi, t, j, hh
    cdef floating dht, dct, cprev
    with nogil:
        for t in range(T - 1, -1, -1):
            for bi in range(B):
                for j in range(H):
                    dht = dh[bi, t, j] + dh_next[bi, j]
                    dct = dht * ov[bi, t, j] * (1.0 - hcv[bi, t, j] * hcv[bi, t, j]) \
                        + dc_next[bi, j]
                    cprev = cv[bi, t - 1, j] if t > 0 else <floating>0.0
                    dz[bi, t, j] = dct * gv[bi, t, j] * iv[bi, t, j] * (1.0 - iv[bi, t, j])
                    dz[bi, t, H + j] = dct * cprev * fv[bi, t, j] * (1.0 - fv[bi, t, j])
                    dz[bi, t, 2 * H + j] = dct * iv[bi, t, j] * (1.0 - gv[bi, t, j] * gv[bi, t, j])
                    dz[bi, t, 3 * H + j] = dht * hcv[bi, t, j] * ov[bi, t, j] * (1.0 - ov[bi, t, j])
                    dc_next[bi, j] = dct * fv[bi, t, j]
                for j in range(H):
                    dht = <floating>0.0
                    for hh in range(4 * H):
                        dht = dht + dz[bi, t, hh] * wh[j, hh]
                    dh_next[bi, j] = dht
    xnp = np.asarray(x)
    hnp = onp * hcnp
    dx = (dznp.reshape(B * T, 4 * H) @ np.asarray(wx).T).reshape(B, T, I)
    dwx = np.tensordot(xnp, dznp, axes=([0, 1], [0, 1]))
    h_prev = np.concatenate([np.zeros((B, 1, H), dtype=dtype), hnp[:, :-1]], axis=1)
    dwh = np.tensordot(h_prev, dznp, axes=([0, 1], [0, 1]))
    db = dznp.sum(axis=(0, 1))
    return np.ascontiguousarray(dx), dwx, dwh, db
