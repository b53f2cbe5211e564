"""Quaternion helpers (scalar-first convention, device->world rotations).

All functions accept either a single quaternion [4] or a batch [N, 4].
"""

import numpy as np


def normalize(q):
    q = np.asarray(q, dtype=np.float64)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def mul(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conj(q):
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def rotate(q, v):
    """Rotate vectors v by quaternions q (device -> world for pose quats)."""
    q = np.asarray(q, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    w = q[..., :1]
    u = q[..., 1:]
    cross = np.cross(u, v)
    return v + 2.0 * (w * cross + np.cross(u, cross))


def rotate_inv(q, v):
    return rotate(conj(q), v)


def from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis, axis=-1, keepdims=True)
    angle = np.asarray(angle, dtype=np.float64)
    half = angle / 2.0
    s = np.sin(half)
    return np.concatenate(
        [np.cos(half)[..., None], axis * s[..., None]], axis=-1
    )


def from_rotvec(rv):
    """Exponential map: rotation vector [.., 3] -> quaternion."""
    rv = np.asarray(rv, dtype=np.float64)
    angle = np.linalg.norm(rv, axis=-1, keepdims=True)
    small = angle[..., 0] < 1e-12
    half = angle / 2.0
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = np.where(angle > 1e-12, rv / angle, 0.0)
    q = np.concatenate([np.cos(half), axis * np.sin(half)], axis=-1)
    q[small] = np.array([1.0, 0.0, 0.0, 0.0])
    return q


def to_rotvec(q):
    """Logarithm map: quaternion -> rotation vector."""
    q = normalize(q)
    w = np.clip(q[..., 0], -1.0, 1.0)
    angle = 2.0 * np.arccos(np.abs(w))
    sign = np.where(w < 0, -1.0, 1.0)
    s = np.sqrt(np.maximum(1.0 - w * w, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = np.where(s[..., None] > 1e-12, q[..., 1:] / s[..., None], 0.0)
    return sign[..., None] * axis * angle[..., None]


def from_euler_zyx(yaw, pitch, roll):
    """Intrinsic z-y-x (yaw about world z, then pitch, then roll)."""
    qz = from_axis_angle(np.array([0.0, 0.0, 1.0]), np.asarray(yaw))
    qy = from_axis_angle(np.array([0.0, 1.0, 0.0]), np.asarray(pitch))
    qx = from_axis_angle(np.array([1.0, 0.0, 0.0]), np.asarray(roll))
    return mul(mul(qz, qy), qx)


def yaw_of(q):
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.arctan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))


def pitch_of(q):
    q = np.asarray(q, dtype=np.float64)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.arcsin(np.clip(2.0 * (w * y - z * x), -1.0, 1.0))


def angle_between(a, b):
    """Rotation angle (rad) taking quaternion a to b."""
    d = np.abs(np.sum(normalize(a) * normalize(b), axis=-1))
    return 2.0 * np.arccos(np.clip(d, -1.0, 1.0))
