"""Fingertip velocity post-processing and wrist+finger cursor fusion.

The cleaned stream is the adaptive-lowpass (1-euro) filtered velocity,
re-zeroed against the mean of the latest stable region and snapped to (0,0)
near that baseline.
"""

import math
from collections import deque
from dataclasses import dataclass

import numpy as np


class LowPass:
    def __init__(self):
        self.y = None

    def __call__(self, x, alpha):
        if self.y is None:
            self.y = np.asarray(x, dtype=np.float64).copy()
        else:
            self.y = alpha * np.asarray(x, dtype=np.float64) + (1.0 - alpha) * self.y
        return self.y


def _alpha(cutoff_hz, dt):
    tau = 1.0 / (2.0 * math.pi * cutoff_hz)
    return 1.0 / (1.0 + tau / dt)


class OneEuroFilter:
    """Adaptive low-pass: cutoff rises with signal speed (vector form)."""

    def __init__(self, min_cutoff=1.0, beta=0.05, d_cutoff=1.0):
        self.min_cutoff = min_cutoff
        self.beta = beta
        self.d_cutoff = d_cutoff
        self._x = LowPass()
        self._dx = LowPass()
        self._prev = None

    def __call__(self, x, dt):
        x = np.asarray(x, dtype=np.float64)
        if self._prev is None or dt <= 0:
            dx = np.zeros_like(x)
        else:
            dx = (x - self._prev) / dt
        self._prev = x.copy()
        edx = self._dx(dx, _alpha(self.d_cutoff, max(dt, 1e-9)))
        cutoff = self.min_cutoff + self.beta * float(np.linalg.norm(edx))
        return self._x(x, _alpha(cutoff, max(dt, 1e-9))).copy()


@dataclass
class FingertipPostConfig:
    min_cutoff: float = 1.0
    beta: float = 0.05
    d_cutoff: float = 1.0
    stable_min_duration_s: float = 0.25
    stable_norm_thresh: float = 0.05  # m/s
    stable_var_thresh: float = 4e-4  # (m/s)^2 per axis
    snap_radius: float = 0.015  # m/s


class FingertipPostprocessor:
    def __init__(self, cfg=None):
        self.cfg = cfg or FingertipPostConfig()
        if min(
            self.cfg.min_cutoff,
            self.cfg.beta,
            self.cfg.d_cutoff,
            self.cfg.stable_min_duration_s,
            self.cfg.stable_norm_thresh,
            self.cfg.stable_var_thresh,
            self.cfg.snap_radius,
        ) <= 0:
            raise ValueError("all fingertip post-processing thresholds must be > 0")
        self._filter = OneEuroFilter(self.cfg.min_cutoff, self.cfg.beta, self.cfg.d_cutoff)
        self._t = 0.0
        self._hist = deque()
        self.baseline = np.zeros(2)

    def step(self, v_raw, dt):
        """Smooth -> refresh baseline from stable regions -> snap to zero."""
        cfg = self.cfg
        self._t += dt
        v = self._filter(v_raw, dt)

        self._hist.append((self._t, v))
        while self._hist and self._t - self._hist[0][0] > cfg.stable_min_duration_s:
            self._hist.popleft()
        spans = self._t - self._hist[0][0] if self._hist else 0.0
        if spans >= 0.9 * cfg.stable_min_duration_s and len(self._hist) >= 3:
            vs = np.stack([h[1] for h in self._hist])
            norms = np.linalg.norm(vs, axis=1)
            if norms.max() < cfg.stable_norm_thresh and vs.var(axis=0).max() < cfg.stable_var_thresh:
                self.baseline = vs.mean(axis=0)

        out = v - self.baseline
        if np.linalg.norm(out) < cfg.snap_radius:
            return np.zeros(2)
        return out


class CursorFuser:
    """Integrates wrist + fingertip velocity; re-anchors on touch onsets."""

    def __init__(self, anchor=(0.0, 0.0)):
        self.anchor = np.asarray(anchor, dtype=np.float64)
        self.p = self.anchor.copy()

    def reset(self, anchor=None):
        if anchor is not None:
            self.anchor = np.asarray(anchor, dtype=np.float64)
        self.p = self.anchor.copy()

    def step(self, v_wrist, v_finger, dt, onset=False):
        if onset:
            self.reset()
        self.p = self.p + (np.asarray(v_wrist) + np.asarray(v_finger)) * dt
        return self.p.copy()
