"""Wristband tracking: orientation-constrained 1D estimate and 2D dead
reckoning with stationarity detection and bias compensation.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from touchstream import quat
from touchstream.streams import GRAVITY


# -- 1D estimate from the arm model ------------------------------------------


@dataclass
class IkConfig:
    forearm_length: float = 0.26
    upper_arm_length: float = 0.28
    shoulder_anchor: tuple = (0.0, 0.0, 0.0)
    smooth_alpha: float = 0.25  # EMA on the differentiated velocity
    pitch_limit: float = 1.4  # rad; forearm near vertical is degenerate


class IkEstimator:
    """Maps forearm orientation to lateral hand position (drift-free x)."""

    def __init__(self, cfg=None):
        self.cfg = cfg or IkConfig()
        self.x = 0.0
        self.v = 0.0
        self.degenerate = False
        self._have_prev = False

    def update(self, q, dt):
        """Returns (x position m, smoothed x velocity m/s)."""
        cfg = self.cfg
        pitch = quat.pitch_of(q)
        if abs(float(pitch)) > cfg.pitch_limit:
            self.degenerate = True
            return self.x, self.v
        self.degenerate = False
        yaw = float(quat.yaw_of(q))
        x = cfg.shoulder_anchor[0] + cfg.forearm_length * np.sin(yaw)
        if self._have_prev and dt > 0:
            v_raw = (x - self.x) / dt
            self.v += cfg.smooth_alpha * (v_raw - self.v)
        self.x = x
        self._have_prev = True
        return self.x, self.v


# -- stationarity -------------------------------------------------------------


@dataclass
class StationarityConfig:
    window_s: float = 0.15
    accel_mag_thresh: float = 0.25  # |mean accel magnitude - g| (m/s^2)
    accel_var_thresh: float = 0.02  # (m/s^2)^2
    gyro_mag_thresh: float = 0.1  # rad/s
    gyro_var_thresh: float = 0.005  # (rad/s)^2
    decay_tau_s: float = 0.05


def detect_stationary(accel_win, gyro_win, cfg=None):
    """True iff accel magnitude deviation, accel variance, gyro magnitude,
    and gyro variance are all below their thresholds."""
    cfg = cfg or StationarityConfig()
    accel_win = np.asarray(accel_win, dtype=np.float64)
    gyro_win = np.asarray(gyro_win, dtype=np.float64)
    if len(accel_win) == 0 or len(gyro_win) == 0:
        return False
    a_mag = np.linalg.norm(accel_win, axis=1)
    g_mag = np.linalg.norm(gyro_win, axis=1)
    return bool(
        abs(a_mag.mean() - GRAVITY) < cfg.accel_mag_thresh
        and a_mag.var() < cfg.accel_var_thresh
        and g_mag.mean() < cfg.gyro_mag_thresh
        and g_mag.var() < cfg.gyro_var_thresh
    )


# -- bias estimation ------------------------------------------------------------


def estimate_bias(times_s, velocities):
    """Per-axis least-squares slope of v(t) over a moving interval."""
    t = np.asarray(times_s, dtype=np.float64)
    v = np.asarray(velocities, dtype=np.float64)
    tc = t - t.mean()
    denom = (tc**2).sum()
    if denom <= 0:
        return np.zeros(v.shape[1])
    return (tc[:, None] * (v - v.mean(axis=0))).sum(axis=0) / denom


@dataclass
class BiasConfig:
    window_s: float = 1.0
    min_window_s: float = 0.5
    gain: float = 0.8  # fraction of the regression slope folded in per window


@dataclass
class DeadReckonConfig:
    stationarity: StationarityConfig = field(default_factory=StationarityConfig)
    bias: BiasConfig = field(default_factory=BiasConfig)
    enable_stationarity: bool = True
    enable_bias: bool = True


class DeadReckoner:
    """Surface-plane (x, y) velocity/position by double integration.

    Gravity is removed with the caller-supplied orientation; drift is
    mitigated by exponential velocity decay while stationary and by a
    running linear-regression estimate of the acceleration bias during
    continuous motion.
    """

    def __init__(self, cfg=None):
        self.cfg = cfg or DeadReckonConfig()
        self.v = np.zeros(2)
        self.p = np.zeros(2)
        self.bias_est = np.zeros(2)
        self.stationary = False
        self._t = 0.0
        self._imu_win = deque()
        self._vel_hist = deque()
        self._motion_since = None

    def step(self, accel_device, gyro_device, q, dt):
        """Advance one sample; returns (v, p, stationary)."""
        cfg = self.cfg
        self._t += dt
        a_w = quat.rotate(q, np.asarray(accel_device, dtype=np.float64))
        a_w = a_w + np.array([0.0, 0.0, -GRAVITY])
        a_xy = a_w[:2] - self.bias_est
        self.v = self.v + a_xy * dt
        self.p = self.p + self.v * dt

        st_cfg = cfg.stationarity
        if cfg.enable_stationarity and gyro_device is not None:
            self._imu_win.append((self._t, np.asarray(accel_device, float), np.asarray(gyro_device, float)))
            while self._imu_win and self._t - self._imu_win[0][0] > st_cfg.window_s:
                self._imu_win.popleft()
            full = (
                len(self._imu_win) >= 3
                and self._t - self._imu_win[0][0] >= 0.9 * st_cfg.window_s
            )
            if full:
                acc = np.stack([w[1] for w in self._imu_win])
                gyr = np.stack([w[2] for w in self._imu_win])
                self.stationary = detect_stationary(acc, gyr, st_cfg)
            else:
                self.stationary = False
            if self.stationary:
                self.v = self.v * np.exp(-dt / st_cfg.decay_tau_s)

        if cfg.enable_bias:
            b = cfg.bias
            if self.stationary:
                self._motion_since = None
                self._vel_hist.clear()
            else:
                if self._motion_since is None:
                    self._motion_since = self._t
                self._vel_hist.append((self._t, self.v.copy()))
                while self._vel_hist and self._t - self._vel_hist[0][0] > b.window_s:
                    self._vel_hist.popleft()
                span = self._t - self._vel_hist[0][0] if self._vel_hist else 0.0
                if (
                    span >= b.min_window_s
                    and self._t - self._motion_since >= b.window_s
                ):
                    times = [h[0] for h in self._vel_hist]
                    vels = [h[1] for h in self._vel_hist]
                    slope = estimate_bias(times, np.stack(vels))
                    self.bias_est = self.bias_est + b.gain * slope
                    self._vel_hist.clear()
                    self._motion_since = self._t
        return self.v.copy(), self.p.copy(), self.stationary
