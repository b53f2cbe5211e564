"""Forward sensor models: ground truth -> the seven raw streams.

Continuous-time views of the 240 Hz ground truth are built with cubic
splines, then sampled at each stream's native timestamps.  All randomness
derives from one seed through named substreams, so output is bit-identical
for identical (ground truth, params, seed).
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import butter, lfilter

from touchstream import quat
from touchstream.errors import ValidationError
from touchstream.ingest.recording import RawRecording
from touchstream.streams import CHANNELS, GRAVITY, SAMPLE_PERIOD_US, StreamId

#: contact force model: steady hold level plus an impact bump per onset
HOLD_FORCE = 1.0
IMPACT_FORCE_GAIN = 4.0  # per (m/s) of approach speed
FORCE_DECAY_S = 0.05

_DEFAULT_NOISE = {
    StreamId.EMG: 0.03,
    StreamId.BIOZ: 0.004,
    StreamId.IRPROX: 0.01,
    StreamId.TOF1: 0.004,
    StreamId.TOF64: 0.008,
    StreamId.IMU: 0.02,  # accel m/s^2; gyro noise is this * GYRO_NOISE_SCALE
    StreamId.MAG: 0.3,
}
GYRO_NOISE_SCALE = 0.25


@dataclass
class SensorParams:
    noise_std: dict = field(default_factory=lambda: dict(_DEFAULT_NOISE))
    accel_bias: tuple = (0.0, 0.0, 0.0)  # m/s^2, device frame
    gyro_bias: tuple = (0.0, 0.0, 0.0)  # rad/s
    impact_freq_hz: float = 300.0
    impact_decay_s: float = 0.015
    impact_gain: float = 60.0  # peak accel (m/s^2) per (m/s) approach speed
    impact_release_factor: float = 0.4
    emg_mixing: tuple = ()  # 8x3 over (force, speed, tonic) sources
    emg_force_gain: float = 3.0
    emg_speed_gain: float = 8.0
    emg_tonic: float = 0.25
    emg_band_hz: tuple = (20.0, 450.0)
    bioz_baseline: tuple = (1.0, 0.25, 0.8, -0.15)  # (i0, q0, i1, q1)
    bioz_delta: tuple = (-0.30, 0.10, -0.22, 0.08)
    bioz_settle_s: float = 0.04
    ir_gains: tuple = ()  # 4x2 over (extension, lateral velocity)
    ir_offset: tuple = (0.2, 0.25, 0.15, 0.3)
    tof_standoff: float = 0.02
    tof_max_range: float = 1.2
    mag_world: tuple = (22.0, 4.0, -40.0)  # uT
    dropout_prob: float = 0.0

    def __post_init__(self):
        if not self.emg_mixing:
            rng = np.random.default_rng(1234)
            self.emg_mixing = tuple(
                tuple(row) for row in (0.5 + rng.random((8, 3))) * np.array([1.0, 0.8, 0.6])
            )
        if not self.ir_gains:
            self.ir_gains = ((0.9, 0.5), (0.7, -0.6), (1.1, 0.3), (0.8, -0.4))

    def validate(self):
        if any(v < 0 for v in self.noise_std.values()):
            raise ValidationError("noise std-devs must be >= 0")
        if self.bioz_settle_s <= 0:
            raise ValidationError("bioz settle time must be > 0")
        if not np.all(np.isfinite(np.asarray(self.emg_mixing))):
            raise ValidationError("emg mixing matrix must be finite")
        return self

    @classmethod
    def randomized(cls, seed):
        """A synthetic per-wearer profile: perturbed gains, biases, baselines."""
        rng = np.random.default_rng(seed)
        base = cls()
        return cls(
            noise_std=dict(base.noise_std),
            accel_bias=tuple(rng.normal(0.0, 0.01, 3)),
            gyro_bias=tuple(rng.normal(0.0, 0.002, 3)),
            impact_gain=float(base.impact_gain * rng.uniform(0.7, 1.3)),
            emg_mixing=tuple(
                tuple(row) for row in (0.5 + rng.random((8, 3))) * np.array([1.0, 0.8, 0.6])
            ),
            emg_force_gain=float(base.emg_force_gain * rng.uniform(0.8, 1.25)),
            emg_speed_gain=float(base.emg_speed_gain * rng.uniform(0.8, 1.25)),
            bioz_baseline=tuple(np.asarray(base.bioz_baseline) + rng.normal(0, 0.08, 4)),
            bioz_delta=tuple(np.asarray(base.bioz_delta) * rng.uniform(0.7, 1.4)),
            bioz_settle_s=float(base.bioz_settle_s * rng.uniform(0.8, 1.3)),
            ir_gains=tuple(
                tuple(g * rng.uniform(0.8, 1.2) for g in row) for row in base.ir_gains
            ),
            ir_offset=tuple(np.asarray(base.ir_offset) + rng.uniform(-0.05, 0.05, 4)),
        )

    def content_hash(self):
        doc = json.dumps(
            {
                k: (dict(v) if isinstance(v, dict) else v)
                for k, v in sorted(self.__dict__.items())
                if k != "noise_std"
            }
            | {"noise_std": {int(k): v for k, v in sorted(self.noise_std.items())}},
            sort_keys=True,
            default=float,
        )
        return hashlib.sha256(doc.encode()).hexdigest()[:16]


def _stream_times(gt, stream_id):
    period = SAMPLE_PERIOD_US[stream_id]
    n = int(gt.t[-1] * 1e6 // period) + 1
    return period * np.arange(n, dtype=np.int64)


def _force_series(gt, t_s):
    force = np.where(_sample_series(gt.contact.astype(np.float64), gt, t_s) > 0.5, HOLD_FORCE, 0.0)
    for ev in gt.events:
        if ev.kind != "onset":
            continue
        rel = t_s - ev.t
        m = (rel >= 0) & (rel < 6 * FORCE_DECAY_S)
        force[m] += IMPACT_FORCE_GAIN * ev.speed * np.exp(-rel[m] / FORCE_DECAY_S)
    return force


def _sample_series(series, gt, t_s):
    return np.interp(t_s, gt.t, series)


def synthesize_streams(gt, params, seed):
    """Render a RawRecording from ground truth under a sensor profile."""
    params.validate()
    gt.validate()
    ss = np.random.SeedSequence(seed)
    rngs = {
        name: np.random.default_rng(child)
        for name, child in zip(
            ("emg_src", "emg", "bioz", "ir", "tof1", "tof64", "imu", "mag", "dropout"),
            ss.spawn(9),
        )
    }

    pos_spline = CubicSpline(gt.t, gt.wrist_pos, axis=0)
    finger_spline = CubicSpline(gt.t, gt.fingertip_xy, axis=0)
    quat_spline = CubicSpline(gt.t, gt.wrist_quat, axis=0)

    # device-frame angular velocity at ground-truth midpoints
    dq = quat.mul(quat.conj(gt.wrist_quat[:-1]), gt.wrist_quat[1:])
    omega = quat.to_rotvec(dq) * gt.fs
    t_mid = (gt.t[:-1] + gt.t[1:]) / 2.0
    if len(t_mid) >= 2:
        omega_spline = CubicSpline(t_mid, omega, axis=0)
    else:
        omega_spline = lambda ts: np.zeros((len(np.atleast_1d(ts)), 3))

    streams = {}

    # -- IMU ------------------------------------------------------------
    ts = _stream_times(gt, StreamId.IMU)
    t_s = ts / 1e6
    a_w = pos_spline(t_s, 2)
    g_w = np.array([0.0, 0.0, -GRAVITY])
    q = quat.normalize(np.clip(quat_spline(t_s), -1.5, 1.5))
    accel_dev = quat.rotate_inv(q, a_w - g_w)
    mix = np.array([0.15, 0.05, 0.8])
    for ev in gt.events:
        speed = ev.speed * (1.0 if ev.kind == "onset" else params.impact_release_factor)
        rel = t_s - ev.t
        m = (rel >= 0) & (rel < 6 * params.impact_decay_s)
        burst = (
            params.impact_gain
            * speed
            * np.exp(-rel[m] / params.impact_decay_s)
            * np.sin(2 * np.pi * params.impact_freq_hz * rel[m])
        )
        accel_dev[m] += burst[:, None] * mix
    accel_dev += np.asarray(params.accel_bias)
    gyro_dev = omega_spline(np.clip(t_s, t_mid[0], t_mid[-1])) + np.asarray(params.gyro_bias)
    std = params.noise_std[StreamId.IMU]
    accel_dev += rngs["imu"].normal(0.0, std, accel_dev.shape)
    gyro_dev += rngs["imu"].normal(0.0, std * GYRO_NOISE_SCALE, gyro_dev.shape)
    streams[StreamId.IMU] = (ts, np.hstack([accel_dev, gyro_dev]).astype(np.float32))

    # -- magnetometer -----------------------------------------------------
    ts = _stream_times(gt, StreamId.MAG)
    t_s = ts / 1e6
    q = quat.normalize(np.clip(quat_spline(t_s), -1.5, 1.5))
    mag = quat.rotate_inv(q, np.asarray(params.mag_world, dtype=np.float64))
    mag += rngs["mag"].normal(0.0, params.noise_std[StreamId.MAG], mag.shape)
    streams[StreamId.MAG] = (ts, mag.astype(np.float32))

    # -- sEMG -------------------------------------------------------------
    ts = _stream_times(gt, StreamId.EMG)
    t_s = ts / 1e6
    fs = 1e6 / SAMPLE_PERIOD_US[StreamId.EMG]
    force = _force_series(gt, t_s)
    finger_speed = np.linalg.norm(finger_spline(t_s, 1), axis=1)
    wrist_speed = np.linalg.norm(pos_spline(t_s, 1)[:, :2], axis=1)
    envelopes = np.stack(
        [
            params.emg_tonic + params.emg_force_gain * force,
            params.emg_tonic + params.emg_speed_gain * (finger_speed + 0.5 * wrist_speed),
            np.full(len(t_s), params.emg_tonic),
        ],
        axis=1,
    )
    white = rngs["emg_src"].standard_normal((len(t_s), 3))
    lo, hi = params.emg_band_hz
    b, a = butter(4, [lo / (fs / 2), hi / (fs / 2)], btype="band")
    sources = lfilter(b, a, white, axis=0) * envelopes
    emg = sources @ np.asarray(params.emg_mixing).T
    emg += rngs["emg"].normal(0.0, params.noise_std[StreamId.EMG], emg.shape)
    if params.dropout_prob > 0:
        mask = rngs["dropout"].random(emg.shape) < params.dropout_prob
        emg[mask] = 0.0
    streams[StreamId.EMG] = (ts, emg.astype(np.float32))

    # -- bioimpedance -------------------------------------------------------
    ts = _stream_times(gt, StreamId.BIOZ)
    t_s = ts / 1e6
    body = (_sample_series((gt.contact_kind == 2).astype(np.float64), gt, t_s) > 0.5).astype(
        np.float64
    )
    bioz_fs = 1e6 / SAMPLE_PERIOD_US[StreamId.BIOZ]
    alpha = np.exp(-(1.0 / bioz_fs) / params.bioz_settle_s)
    settled = lfilter([1.0 - alpha], [1.0, -alpha], body)
    bioz = np.asarray(params.bioz_baseline) + settled[:, None] * np.asarray(params.bioz_delta)
    bioz += rngs["bioz"].normal(0.0, params.noise_std[StreamId.BIOZ], bioz.shape)
    streams[StreamId.BIOZ] = (ts, bioz.astype(np.float32))

    # -- IR proximity ---------------------------------------------------------
    ts = _stream_times(gt, StreamId.IRPROX)
    t_s = ts / 1e6
    z = pos_spline(t_s)[:, 2]
    h_ref = max(float(gt.wrist_pos[:, 2].max()), 1e-3)
    extension = np.clip(1.0 - z / h_ref, 0.0, 1.0) + 0.3 * _force_series(gt, t_s)
    vx = pos_spline(t_s, 1)[:, 0] + finger_spline(t_s, 1)[:, 0]
    deviation = np.clip(vx / 0.3, -1.5, 1.5)
    latents = np.stack([extension, deviation], axis=1)
    ir = latents @ np.asarray(params.ir_gains).T + np.asarray(params.ir_offset)
    ir += rngs["ir"].normal(0.0, params.noise_std[StreamId.IRPROX], ir.shape)
    streams[StreamId.IRPROX] = (ts, ir.astype(np.float32))

    # -- ToF -----------------------------------------------------------------
    ts = _stream_times(gt, StreamId.TOF1)
    t_s = ts / 1e6
    z = pos_spline(t_s)[:, 2]
    present = _sample_series(gt.surface_present.astype(np.float64), gt, t_s) > 0.5
    d = np.where(present, z + params.tof_standoff, params.tof_max_range)
    d = d + rngs["tof1"].normal(0.0, params.noise_std[StreamId.TOF1], d.shape)
    streams[StreamId.TOF1] = (ts, np.clip(d, 0.0, params.tof_max_range)[:, None].astype(np.float32))

    ts = _stream_times(gt, StreamId.TOF64)
    t_s = ts / 1e6
    z = pos_spline(t_s)[:, 2]
    present = _sample_series(gt.surface_present.astype(np.float64), gt, t_s) > 0.5
    gy, gx = np.mgrid[0:8, 0:8]
    zone_sec = 1.0 / np.cos(np.deg2rad(22.5) * np.hypot(gx - 3.5, gy - 3.5).ravel() / 4.95)
    depth = (z[:, None] + params.tof_standoff) * zone_sec[None, :]
    depth = np.where(present[:, None], depth, params.tof_max_range)
    depth = depth + rngs["tof64"].normal(0.0, params.noise_std[StreamId.TOF64], depth.shape)
    streams[StreamId.TOF64] = (
        ts,
        np.clip(depth, 0.0, params.tof_max_range).astype(np.float32),
    )

    rec = RawRecording(
        streams=streams,
        metadata={"seed": int(seed), "sensor_params": params.content_hash()},
    )
    return rec.validate()
