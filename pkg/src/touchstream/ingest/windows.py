"""Sliding-window framing over aligned frames."""

from dataclasses import dataclass

import numpy as np

from touchstream.errors import ValidationError


@dataclass
class WindowConfig:
    length: int  # samples
    stride: int  # samples
    columns: tuple = ()  # aligned-column subset; empty keeps all

    def validate(self):
        if self.stride < 1:
            raise ValidationError("stride must be >= 1")
        if self.length < self.stride:
            raise ValidationError("length must be >= stride")
        return self


@dataclass
class Window:
    t_end_us: int
    values: np.ndarray  # [length, channels]


def window_count(n, length, stride):
    if n < length:
        return 0
    return (n - length) // stride + 1


def window(block, cfg):
    """Iterate Windows over an AlignedBlock (or (t_us, values) pair)."""
    cfg.validate()
    t_us, values = (block.t_us, block.values) if hasattr(block, "values") else block
    cols = list(cfg.columns) if cfg.columns else slice(None)
    n = len(t_us)
    for k in range(window_count(n, cfg.length, cfg.stride)):
        lo = k * cfg.stride
        hi = lo + cfg.length
        yield Window(int(t_us[hi - 1]), values[lo:hi, cols])


def window_matrix(values, length, stride):
    """All windows as one strided view: [num, length, channels]."""
    n = values.shape[0]
    num = window_count(n, length, stride)
    if num == 0:
        return np.zeros((0, length) + values.shape[1:], dtype=values.dtype)
    wins = np.lib.stride_tricks.sliding_window_view(values, length, axis=0)
    return wins[:: stride][:num].transpose(0, 2, 1)
