"""Compute-kernel backend selection.

At import time we prefer the compiled Cython extension (``_ckernels``) and
fall back to the pure NumPy implementation (``pykernels``).  The choice can
be forced with the environment variable ``TOUCHSTREAM_KERNELS``:

    TOUCHSTREAM_KERNELS=c    require the compiled extension (ImportError if absent)
    TOUCHSTREAM_KERNELS=py   force the NumPy fallback

Both backends implement the same functions with identical signatures and
cache conventions; ``benchmarks/bench_kernels.py`` compares their speed.
"""

import os

import numpy as np

from . import pykernels

_choice = os.environ.get("TOUCHSTREAM_KERNELS", "auto").lower()

if _choice == "py":
    _impl = pykernels
    BACKEND = "py"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        _impl = pykernels
        BACKEND = "py"


def backend_name():
    """Name of the active kernel backend: ``"c"`` or ``"py"``."""
    return BACKEND


def _c3(a):
    return np.ascontiguousarray(a)


def conv1d_forward(x, w, b, stride):
    return _impl.conv1d_forward(_c3(x), _c3(w), _c3(b), stride)


def conv1d_backward(x, w, stride, dy):
    return _impl.conv1d_backward(_c3(x), _c3(w), stride, _c3(dy))


def dwconv1d_forward(x, w, b, stride):
    return _impl.dwconv1d_forward(_c3(x), _c3(w), _c3(b), stride)


def dwconv1d_backward(x, w, stride, dy):
    return _impl.dwconv1d_backward(_c3(x), _c3(w), stride, _c3(dy))


def maxpool1d_forward(x, size):
    return _impl.maxpool1d_forward(_c3(x), size)


def maxpool1d_backward(idx, length, size, dy):
    return _impl.maxpool1d_backward(_c3(idx), length, size, _c3(dy))


def lstm_forward(x, wx, wh, b):
    return _impl.lstm_forward(_c3(x), _c3(wx), _c3(wh), _c3(b))


def lstm_backward(x, wx, wh, cache, dh):
    return _impl.lstm_backward(_c3(x), _c3(wx), _c3(wh), cache, _c3(dh))
