"""Complementary orientation filter: gyro integration with gravity and
magnetic-north corrections.

The filter state is a device->world quaternion.  Accel correction pulls the
predicted gravity direction toward the measured one; the magnetometer
correction is restricted to the component about the vertical (yaw) so it
cannot fight the gravity correction.
"""

from dataclasses import dataclass, field

import numpy as np

from touchstream import quat


@dataclass
class OrientationConfig:
    accel_gain: float = 3.0  # 1/s
    mag_gain: float = 0.8  # 1/s
    use_accel: bool = True
    use_mag: bool = True
    mag_world: tuple = (22.0, 4.0, -40.0)


@dataclass
class OrientationState:
    q: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    gyro_bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    correction_skipped: bool = False


def orientation_update(state, accel, gyro, mag, dt, cfg=None):
    """One filter step; returns a new OrientationState."""
    cfg = cfg or OrientationConfig()
    if dt <= 0:
        return OrientationState(state.q.copy(), state.gyro_bias.copy(), False)
    accel = np.asarray(accel, dtype=np.float64)
    gyro = np.asarray(gyro, dtype=np.float64)

    q = quat.mul(state.q, quat.from_rotvec((gyro - state.gyro_bias) * dt))

    skipped = False
    g_pred = quat.rotate_inv(q, np.array([0.0, 0.0, 1.0]))
    if cfg.use_accel:
        norm = np.linalg.norm(accel)
        if norm < 1e-6:
            skipped = True
        else:
            g_meas = accel / norm
            corr = np.cross(g_meas, g_pred)
            q = quat.mul(q, quat.from_rotvec(min(cfg.accel_gain * dt, 1.0) * corr))
            g_pred = quat.rotate_inv(q, np.array([0.0, 0.0, 1.0]))
    if cfg.use_mag and mag is not None:
        m = np.asarray(mag, dtype=np.float64)
        norm = np.linalg.norm(m)
        ref = np.asarray(cfg.mag_world, dtype=np.float64)
        if norm > 1e-9:
            m_meas = m / norm
            m_pred = quat.rotate_inv(q, ref / np.linalg.norm(ref))
            corr = np.cross(m_meas, m_pred)
            corr = np.dot(corr, g_pred) * g_pred  # yaw component only
            q = quat.mul(q, quat.from_rotvec(min(cfg.mag_gain * dt, 1.0) * corr))

    return OrientationState(quat.normalize(q), state.gyro_bias.copy(), skipped)
