"""Scenario scripting: deterministic ground-truth hand/wrist kinematics.

A scenario is an ordered list of action segments (taps, holds, swipes,
shape traces, null motions) on a horizontal surface plane at z=0.  The
scripted trajectories are C1-smooth (minimum-jerk strokes), so the ground
truth can be differentiated twice for the forward sensor models.  Contact
onset/offset events anchor each touching segment at its ``start`` time.

Wrist yaw is coupled to lateral position through a two-segment arm model
(yaw = asin(x / forearm_length)) so the orientation-based 1D estimate and
the surface-plane kinematics describe the same motion.
"""

from dataclasses import dataclass, field

import numpy as np
import yaml

from touchstream import quat
from touchstream.errors import ValidationError
from touchstream.streams import GROUND_TRUTH_RATE_HZ

SCHEMA_VERSION = 1

SEGMENT_KINDS = ("tap", "hold", "swipe", "trace", "null-motion")
SURFACES = ("world", "body", "none")

#: finger-on-surface dwell for a plain tap (s)
TAP_DWELL = 0.08
#: settle time inside a contact before/after path motion (s)
PATH_DWELL = 0.06
#: padding around a touching segment during which the surface is "present"
SURFACE_PAD = 0.3

DEFAULT_FOREARM_LENGTH = 0.26
DEFAULT_HOVER = 0.04
PITCH_GAIN = 0.25  # wrist pitch (rad) per unit normalized descent
ROLL_AMPLITUDE = 0.4


@dataclass
class Segment:
    kind: str
    start: float
    surface: str = "world"
    amplitude: float = DEFAULT_HOVER  # approach height above the surface (m)
    approach_speed: float = 0.3  # m/s
    hold_time: float = 0.0  # s; 0 means the default tap dwell
    speed: float = 0.25  # path speed for swipe/trace/null legs (m/s)
    waypoints: tuple = ()  # xy deltas (m), applied in order
    finger_fraction: float = 0.0  # share of path motion done by the fingertip
    roll_cycles: float = 0.0  # wrist-roll oscillation (null motion only)

    def validate(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValidationError(f"unknown segment kind '{self.kind}'")
        if self.surface not in SURFACES:
            raise ValidationError(f"unknown surface '{self.surface}'")
        if self.kind == "null-motion":
            if self.surface != "none":
                raise ValidationError("null-motion segments must use surface 'none'")
        elif self.surface == "none":
            raise ValidationError(f"{self.kind} segments need a world or body surface")
        if self.amplitude <= 0 or self.approach_speed <= 0 or self.speed <= 0:
            raise ValidationError("amplitude, approach_speed and speed must be > 0")
        if self.hold_time < 0:
            raise ValidationError("hold_time must be >= 0")
        wp = np.asarray(self.waypoints, dtype=np.float64)
        if wp.size and (wp.ndim != 2 or wp.shape[1] != 2 or not np.all(np.isfinite(wp))):
            raise ValidationError("waypoints must be finite [K, 2] xy deltas")
        if self.kind in ("swipe", "trace") and not self.waypoints:
            raise ValidationError(f"{self.kind} segments need waypoints")
        if not 0.0 <= self.finger_fraction <= 1.0:
            raise ValidationError("finger_fraction must be in [0, 1]")


@dataclass
class ScenarioSpec:
    seed: int
    duration: float
    segments: list = field(default_factory=list)
    hover: float = DEFAULT_HOVER
    forearm_length: float = DEFAULT_FOREARM_LENGTH

    def validate(self):
        if self.duration <= 0:
            raise ValidationError("duration must be > 0")
        for seg in self.segments:
            seg.validate()


@dataclass
class SimEvent:
    t: float
    kind: str  # "onset" | "offset"
    source: str  # "world" | "body"
    speed: float = 0.0  # approach/release speed driving the impact transient


@dataclass
class GroundTruth:
    fs: float
    t: np.ndarray  # seconds [n]
    wrist_pos: np.ndarray  # [n, 3] surface-plane x, y and height z
    wrist_quat: np.ndarray  # [n, 4] device->world, scalar first
    fingertip_xy: np.ndarray  # [n, 2] fingertip relative to the wrist
    contact: np.ndarray  # bool [n]
    contact_kind: np.ndarray  # int8 [n]: 0 none, 1 world, 2 body
    surface_present: np.ndarray  # int8 [n]
    events: list

    @property
    def duration(self):
        return float(self.t[-1] + 1.0 / self.fs)

    def validate(self):
        n = len(self.t)
        for name in ("wrist_pos", "wrist_quat", "fingertip_xy", "contact", "contact_kind"):
            if len(getattr(self, name)) != n:
                raise ValidationError(f"ground-truth series '{name}' length mismatch")
        norms = np.linalg.norm(self.wrist_quat, axis=1)
        if np.abs(norms - 1.0).max() > 1e-6:
            raise ValidationError("ground-truth quaternions are not unit norm")
        kinds = [e.kind for e in self.events]
        if kinds and (kinds[0] != "onset" or any(a == b for a, b in zip(kinds, kinds[1:]))):
            raise ValidationError("events must alternate onset/offset")


def _minjerk(tau):
    return tau**3 * (10.0 - 15.0 * tau + 6.0 * tau**2)


def _stroke_duration(dist, speed):
    # minimum-jerk peak speed is 1.875 * d / T
    return max(1.875 * dist / speed, 0.08)


class _Fill:
    """Forward-filling minimum-jerk move plan for one scalar series."""

    def __init__(self, t, initial):
        self.t = t
        self.arr = np.full(len(t), initial, dtype=np.float64)

    def move(self, t0, t1, target):
        i0 = int(np.searchsorted(self.t, t0, side="left"))
        i1 = int(np.searchsorted(self.t, t1, side="left"))
        start = self.arr[i0 - 1] if i0 > 0 else self.arr[0]
        self.arr[i0:] = target
        if i1 > i0:
            tau = (self.t[i0:i1] - t0) / (t1 - t0)
            self.arr[i0:i1] = start + (target - start) * _minjerk(tau)
        return target


def _segment_extent(seg):
    """(t_begin, t_end, schedule) for a validated segment."""
    if seg.kind == "null-motion":
        legs = [np.asarray(w, dtype=np.float64) for w in seg.waypoints]
        dur = sum(_stroke_duration(np.linalg.norm(d), seg.speed) for d in legs)
        dur = max(dur, 0.2)
        return seg.start, seg.start + dur

    t_app = _stroke_duration(seg.amplitude, seg.approach_speed)
    if seg.kind in ("tap", "hold"):
        contact_t = seg.hold_time if seg.hold_time > 0 else TAP_DWELL
    else:
        legs = [np.asarray(w, dtype=np.float64) for w in seg.waypoints]
        path_t = sum(_stroke_duration(np.linalg.norm(d), seg.speed) for d in legs)
        contact_t = PATH_DWELL + path_t + PATH_DWELL
    return seg.start - t_app, seg.start + contact_t + t_app


def script_scenario(spec):
    """Turn a scenario into sampled ground truth at 240 Hz."""
    spec.validate()
    fs = GROUND_TRUTH_RATE_HZ
    n = int(round(spec.duration * fs))
    t = np.arange(n) / fs

    extents = []
    for seg in spec.segments:
        lo, hi = _segment_extent(seg)
        if lo < 0 or hi > spec.duration:
            raise ValidationError(
                f"segment '{seg.kind}' at {seg.start:.3f}s spills outside the scenario "
                f"(occupies {lo:.3f}..{hi:.3f}s)"
            )
        extents.append((lo, hi, seg))
    extents.sort(key=lambda e: e[0])
    for (_, hi, a), (lo2, _, b) in zip(extents, extents[1:]):
        if lo2 < hi:
            raise ValidationError(
                f"segments '{a.kind}' and '{b.kind}' overlap in time"
            )

    wx = _Fill(t, 0.0)
    wy = _Fill(t, 0.0)
    fx = _Fill(t, 0.0)
    fy = _Fill(t, 0.0)
    z = _Fill(t, spec.hover)
    roll = np.zeros(n)
    events = []
    surface = np.zeros(n, dtype=np.int8)

    for lo, hi, seg in extents:
        if seg.kind == "null-motion":
            cursor = lo
            for delta in seg.waypoints:
                d = np.asarray(delta, dtype=np.float64)
                leg_t = _stroke_duration(np.linalg.norm(d), seg.speed)
                wx.move(cursor, cursor + leg_t, wx.arr[-1] + d[0])
                wy.move(cursor, cursor + leg_t, wy.arr[-1] + d[1])
                cursor += leg_t
            if seg.roll_cycles > 0:
                m = (t >= lo) & (t < hi)
                tau = (t[m] - lo) / (hi - lo)
                roll[m] += ROLL_AMPLITUDE * np.sin(np.pi * tau) ** 2 * np.sin(
                    2.0 * np.pi * seg.roll_cycles * tau
                )
            continue

        t_app = _stroke_duration(seg.amplitude, seg.approach_speed)
        onset_t = seg.start
        offset_t = hi - t_app
        z.move(onset_t - t_app, onset_t, 0.0)
        z.move(offset_t, offset_t + t_app, spec.hover)
        if seg.kind in ("swipe", "trace"):
            cursor = onset_t + PATH_DWELL
            ff = seg.finger_fraction
            for delta in seg.waypoints:
                d = np.asarray(delta, dtype=np.float64)
                leg_t = _stroke_duration(np.linalg.norm(d), seg.speed)
                wx.move(cursor, cursor + leg_t, wx.arr[-1] + (1 - ff) * d[0])
                wy.move(cursor, cursor + leg_t, wy.arr[-1] + (1 - ff) * d[1])
                fx.move(cursor, cursor + leg_t, fx.arr[-1] + ff * d[0])
                fy.move(cursor, cursor + leg_t, fy.arr[-1] + ff * d[1])
                cursor += leg_t
            # finger re-centers while the hand lifts off
            if ff > 0:
                fx.move(offset_t, offset_t + t_app, 0.0)
                fy.move(offset_t, offset_t + t_app, 0.0)
        speed = seg.approach_speed
        events.append(SimEvent(onset_t, "onset", seg.surface, speed))
        events.append(SimEvent(offset_t, "offset", seg.surface, speed))
        pad_lo = max(lo - SURFACE_PAD, 0.0)
        pad_hi = min(hi + SURFACE_PAD, spec.duration)
        surface[(t >= pad_lo) & (t < pad_hi)] = 1

    contact = np.zeros(n, dtype=bool)
    kind = np.zeros(n, dtype=np.int8)
    for on, off in zip(events[::2], events[1::2]):
        m = (t >= on.t) & (t < off.t)
        contact[m] = True
        kind[m] = 1 if on.source == "world" else 2

    yaw = np.arcsin(np.clip(wx.arr / spec.forearm_length, -0.99, 0.99))
    pitch = PITCH_GAIN * np.clip((spec.hover - z.arr) / spec.hover, 0.0, 1.0)
    quats = quat.from_euler_zyx(yaw, pitch, roll)

    gt = GroundTruth(
        fs=fs,
        t=t,
        wrist_pos=np.stack([wx.arr, wy.arr, z.arr], axis=1),
        wrist_quat=quats,
        fingertip_xy=np.stack([fx.arr, fy.arr], axis=1),
        contact=contact,
        contact_kind=kind,
        surface_present=surface,
        events=events,
    )
    gt.validate()
    return gt


# -- scenario file I/O -------------------------------------------------------


def scenario_to_yaml(spec, path):
    doc = {
        "schema_version": SCHEMA_VERSION,
        "seed": int(spec.seed),
        "duration": float(spec.duration),
        "hover": float(spec.hover),
        "forearm_length": float(spec.forearm_length),
        "segments": [
            {
                "kind": s.kind,
                "start": float(s.start),
                "surface": s.surface,
                "amplitude": float(s.amplitude),
                "approach_speed": float(s.approach_speed),
                "hold_time": float(s.hold_time),
                "speed": float(s.speed),
                "waypoints": [[float(a), float(b)] for a, b in s.waypoints],
                "finger_fraction": float(s.finger_fraction),
                "roll_cycles": float(s.roll_cycles),
            }
            for s in spec.segments
        ],
    }
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def scenario_from_yaml(path):
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValidationError("scenario file is not a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported scenario schema_version {version!r}")
    try:
        segments = [
            Segment(
                kind=s["kind"],
                start=float(s["start"]),
                surface=s.get("surface", "world"),
                amplitude=float(s.get("amplitude", DEFAULT_HOVER)),
                approach_speed=float(s.get("approach_speed", 0.3)),
                hold_time=float(s.get("hold_time", 0.0)),
                speed=float(s.get("speed", 0.25)),
                waypoints=tuple(tuple(p) for p in s.get("waypoints", [])),
                finger_fraction=float(s.get("finger_fraction", 0.0)),
                roll_cycles=float(s.get("roll_cycles", 0.0)),
            )
            for s in doc.get("segments", [])
        ]
        spec = ScenarioSpec(
            seed=int(doc["seed"]),
            duration=float(doc["duration"]),
            segments=segments,
            hover=float(doc.get("hover", DEFAULT_HOVER)),
            forearm_length=float(doc.get("forearm_length", DEFAULT_FOREARM_LENGTH)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed scenario file: {exc!r}") from exc
    spec.validate()
    return spec
