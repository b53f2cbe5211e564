"""Resampling and time alignment of multirate streams onto the 2 kHz grid.

Each aligned column is the linear interpolation of its source stream at the
grid times; the grid covers the intersection of the matrix streams' time
ranges (no extrapolation).  The 8x8 ToF stream is not interpolated into the
matrix; it is carried as a low-rate side channel.
"""

from dataclasses import dataclass

import numpy as np

from touchstream.errors import EmptyRangeError, MissingStreamError, ValidationError
from touchstream.streams import ALIGNED_COLUMNS, ALIGNED_PERIOD_US, CHANNELS, StreamId

#: stream -> (first column index in the aligned layout)
_MATRIX_STREAMS = (
    (StreamId.EMG, 0),
    (StreamId.BIOZ, 8),
    (StreamId.IRPROX, 12),
    (StreamId.TOF1, 16),
    (StreamId.IMU, 17),
    (StreamId.MAG, 23),
)


@dataclass
class AlignedBlock:
    t_us: np.ndarray  # int64 [N], spaced exactly ALIGNED_PERIOD_US
    values: np.ndarray  # float32 [N, 26]
    tof64_t_us: np.ndarray  # int64 [M]
    tof64: np.ndarray  # float32 [M, 64]

    def __len__(self):
        return len(self.t_us)

    def frames(self):
        """Iterate (t_us, row) pairs."""
        for i in range(len(self.t_us)):
            yield int(self.t_us[i]), self.values[i]


def resample_align(rec):
    """Align a recording onto the 2 kHz grid; returns an AlignedBlock."""
    for sid, _ in _MATRIX_STREAMS:
        if sid not in rec.streams:
            raise MissingStreamError(f"required stream {sid.name} missing")
        ts, _samples = rec.streams[sid]
        if len(ts) < 2:
            raise MissingStreamError(
                f"stream {sid.name} needs >= 2 samples to interpolate, has {len(ts)}"
            )
    lo = max(int(rec.streams[sid][0][0]) for sid, _ in _MATRIX_STREAMS)
    hi = min(int(rec.streams[sid][0][-1]) for sid, _ in _MATRIX_STREAMS)
    t0 = -(-lo // ALIGNED_PERIOD_US) * ALIGNED_PERIOD_US  # ceil to grid
    if t0 > hi:
        raise EmptyRangeError("stream time ranges do not overlap on the grid")
    n = (hi - t0) // ALIGNED_PERIOD_US + 1
    grid = t0 + ALIGNED_PERIOD_US * np.arange(n, dtype=np.int64)

    values = np.empty((n, len(ALIGNED_COLUMNS)), dtype=np.float32)
    gridf = grid.astype(np.float64)
    for sid, col0 in _MATRIX_STREAMS:
        ts, samples = rec.streams[sid]
        tsf = ts.astype(np.float64)
        for c in range(CHANNELS[sid]):
            values[:, col0 + c] = np.interp(gridf, tsf, samples[:, c].astype(np.float64))
    if not np.all(np.isfinite(values)):
        raise ValidationError("aligned output contains non-finite values")

    if StreamId.TOF64 in rec.streams:
        tof_ts, tof = rec.streams[StreamId.TOF64]
        keep = (tof_ts >= t0) & (tof_ts <= hi)
        tof64_t = tof_ts[keep]
        tof64 = np.asarray(tof[keep], dtype=np.float32)
    else:
        tof64_t = np.zeros(0, dtype=np.int64)
        tof64 = np.zeros((0, 64), dtype=np.float32)
    return AlignedBlock(t_us=grid, values=values, tof64_t_us=tof64_t, tof64=tof64)
