"""Window labeling: onset/offset/null classes anchored at window ends."""

import numpy as np

from touchstream.errors import ValidationError
from touchstream.streams import ALIGNED_RATE_HZ

LABEL_NULL = 0
LABEL_ONSET = 1
LABEL_OFFSET = 2

DEFAULT_TOLERANCE_S = 0.025


def label_for_times(events, end_times_s, tolerance_s, source=None):
    """Class label per window-end time.

    A window is onset/offset iff such an event lies within +/- tolerance of
    the window's final sample time; when several qualify, the earliest event
    wins.  ``source`` restricts to world or body events.
    """
    end_times_s = np.asarray(end_times_s, dtype=np.float64)
    labels = np.zeros(len(end_times_s), dtype=np.int64)
    chosen = np.full(len(end_times_s), np.inf)
    for ev in events:
        if source is not None and ev.source != source:
            continue
        m = np.abs(end_times_s - ev.t) <= tolerance_s
        take = m & (ev.t < chosen)
        labels[take] = LABEL_ONSET if ev.kind == "onset" else LABEL_OFFSET
        chosen[take] = ev.t
    return labels


def export_labels(gt, windowing, center_tolerance_s=DEFAULT_TOLERANCE_S, source=None):
    """Per-window labels for a (length, stride) config on the 2 kHz grid.

    windowing: dict with "length" and "stride" in seconds.
    """
    length_s = float(windowing["length"])
    stride_s = float(windowing["stride"])
    if center_tolerance_s > length_s:
        raise ValidationError("tolerance must not exceed the window length")
    if stride_s <= 0 or length_s <= 0:
        raise ValidationError("window length and stride must be > 0")
    dt = 1.0 / ALIGNED_RATE_HZ
    length = int(round(length_s / dt))
    stride = int(round(stride_s / dt))
    n = int(gt.duration / dt)
    if n < length:
        return np.zeros(0, dtype=np.int64)
    num = (n - length) // stride + 1
    ends = (length - 1 + stride * np.arange(num)) * dt
    return label_for_times(gt.events, ends, center_tolerance_s, source=source)
