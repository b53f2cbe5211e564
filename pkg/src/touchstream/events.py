"""Touch event post-processing, the stateful touch timeline, gesture
classification, and the surface-context activation gate.
"""

from dataclasses import dataclass, field

import numpy as np

from touchstream.errors import ValidationError
from touchstream.nn.archs import EVENT_CLASSES, GESTURE_CLASSES

#: refractory intervals between repeat detections, per model
DEBOUNCE_WORLD_S = 0.160
DEBOUNCE_BODY_S = 0.056


@dataclass
class EventPostConfig:
    thresholds: dict = field(default_factory=dict)  # class name -> (0, 1)
    debounce_s: float = DEBOUNCE_WORLD_S
    default_threshold: float = 0.5

    def threshold(self, name):
        value = self.thresholds.get(name, self.default_threshold)
        if not 0.0 < value < 1.0:
            raise ValidationError(f"threshold for '{name}' must be in (0, 1)")
        return value

    def validate(self):
        if self.debounce_s < 0:
            raise ValidationError("debounce must be >= 0")
        for name in self.thresholds:
            self.threshold(name)
        return self


@dataclass
class DetectedEvent:
    t_us: int
    kind: str  # class name, e.g. "onset"/"offset" or a gesture
    source: str  # "world" | "body" | "gesture"
    prob: float = 1.0


class EventDetector:
    """Streaming threshold + argmax + per-class debounce over window probs."""

    def __init__(self, cfg, classes=EVENT_CLASSES, source="world", null_class="null"):
        self.cfg = cfg.validate()
        self.classes = tuple(classes)
        self.source = source
        self.null_class = null_class
        self._last_emit = {}

    def step(self, t_us, probs):
        """Feed one window's class probabilities; returns an event or None."""
        probs = np.asarray(probs, dtype=np.float64)
        if probs.shape != (len(self.classes),) or not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must be one finite value per class")
        c = int(np.argmax(probs))
        name = self.classes[c]
        if name == self.null_class:
            return None
        if probs[c] < self.cfg.threshold(name):
            return None
        last = self._last_emit.get(name)
        if last is not None and (t_us - last) < self.cfg.debounce_s * 1e6:
            return None
        self._last_emit[name] = t_us
        return DetectedEvent(int(t_us), name, self.source, float(probs[c]))


def postprocess_events(prob_stream, cfg, classes=EVENT_CLASSES, source="world"):
    """Batch form of EventDetector over (t_us, probs) pairs."""
    det = EventDetector(cfg, classes=classes, source=source)
    out = []
    for t_us, probs in prob_stream:
        ev = det.step(t_us, probs)
        if ev is not None:
            out.append(ev)
    return out


@dataclass
class TouchTimeline:
    events: list  # accepted events, strictly alternating per source
    intervals: list  # (t_on_us, t_off_us or None, source)
    dropped: dict  # source -> count of out-of-order/duplicate events


def touch_state(events):
    """Integrate onset/offset events into a contact-state timeline.

    An onset while untouched opens an interval; an offset while touched
    closes it.  Anything else is dropped and counted per source.
    """
    ordered = sorted(events, key=lambda e: e.t_us)
    accepted = []
    intervals = []
    dropped = {}
    open_at = {}
    for ev in ordered:
        if ev.kind not in ("onset", "offset"):
            dropped[ev.source] = dropped.get(ev.source, 0) + 1
            continue
        touched = ev.source in open_at
        if ev.kind == "onset" and not touched:
            open_at[ev.source] = ev.t_us
            accepted.append(ev)
        elif ev.kind == "offset" and touched:
            intervals.append((open_at.pop(ev.source), ev.t_us, ev.source))
            accepted.append(ev)
        else:
            dropped[ev.source] = dropped.get(ev.source, 0) + 1
    for source, t_on in sorted(open_at.items()):
        intervals.append((t_on, None, source))
    intervals.sort(key=lambda iv: iv[0])
    return TouchTimeline(accepted, intervals, dropped)


def contact_series(timeline, t_us):
    """Boolean contact state sampled at the given times."""
    t_us = np.asarray(t_us)
    out = np.zeros(len(t_us), dtype=bool)
    for t_on, t_off, _src in timeline.intervals:
        hi = t_off if t_off is not None else np.inf
        out |= (t_us >= t_on) & (t_us < hi)
    return out


def classify_gesture(window, model, cfg=None):
    """Single-window gesture decision with its own threshold rule."""
    if model.arch_id != "gesture":
        raise ValidationError("classify_gesture needs the gesture architecture")
    cfg = cfg or EventPostConfig(debounce_s=0.0)
    probs = np.exp(model.forward(np.asarray(window, dtype=np.float32))[0])
    c = int(np.argmax(probs))
    name = GESTURE_CLASSES[c]
    if name != "null" and probs[c] >= cfg.threshold(name):
        return name
    return "null"


# -- surface context ------------------------------------------------------------


@dataclass
class SurfaceContextConfig:
    plane_rms_thresh: float = 0.01  # m
    coverage_frac: float = 0.6
    edge_depth_thresh: float = 0.10  # m
    max_range: float = 1.2
    valid_margin: float = 0.95  # zones beyond margin*max_range are "no return"


def surface_context(tof64_frame, tof1_range=None, cfg=None):
    """Classify the 8x8 depth grid: no_surface, planar_surface, or edge."""
    cfg = cfg or SurfaceContextConfig()
    depth = np.asarray(tof64_frame, dtype=np.float64).reshape(8, 8)
    valid = depth < cfg.valid_margin * cfg.max_range
    coverage = valid.mean()
    if coverage < 0.25:
        return "no_surface"

    halves = (
        (depth[:, :4], depth[:, 4:]),
        (depth[:4, :], depth[4:, :]),
    )
    for a, b in halves:
        if abs(np.median(a) - np.median(b)) > cfg.edge_depth_thresh:
            return "edge"

    if coverage < cfg.coverage_frac:
        return "no_surface"
    gy, gx = np.mgrid[0:8, 0:8]
    A = np.stack([gx[valid], gy[valid], np.ones(valid.sum())], axis=1)
    z = depth[valid]
    coef, *_ = np.linalg.lstsq(A, z, rcond=None)
    rms = float(np.sqrt(((A @ coef - z) ** 2).mean()))
    if rms < cfg.plane_rms_thresh:
        return "planar_surface"
    return "no_surface"


class SurfaceGate:
    """Blocks world-touch events while no surface is under the hand."""

    def __init__(self, cfg=None):
        self.cfg = cfg or SurfaceContextConfig()
        self.context = "no_surface"

    def update(self, tof64_frame, tof1_range=None):
        self.context = surface_context(tof64_frame, tof1_range, self.cfg)
        return self.context

    def allows(self, event):
        if event.source == "world":
            return self.context != "no_surface"
        return True


# -- event text format ---------------------------------------------------------


def events_to_text(events):
    """Line-delimited records: t_us<TAB>source<TAB>kind."""
    return "".join(f"{e.t_us}\t{e.source}\t{e.kind}\n" for e in events)


def events_from_text(text):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValidationError(f"events line {lineno}: expected 3 tab-separated fields")
        out.append(DetectedEvent(int(parts[0]), parts[2], parts[1]))
    return out
