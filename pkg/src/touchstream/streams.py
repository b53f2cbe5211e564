"""Shared sensor-stream vocabulary: ids, channel counts, rates, column layout.

Every module that touches stream data (simulator, ingest, models, runtime)
imports these constants so the channel bookkeeping lives in one place.
"""

from enum import IntEnum


class StreamId(IntEnum):
    EMG = 1
    BIOZ = 2
    IRPROX = 3
    TOF1 = 4
    TOF64 = 5
    IMU = 6
    MAG = 7


#: channels per stream
CHANNELS = {
    StreamId.EMG: 8,
    StreamId.BIOZ: 4,  # two complex channels as (i0, q0, i1, q1)
    StreamId.IRPROX: 4,
    StreamId.TOF1: 1,
    StreamId.TOF64: 64,
    StreamId.IMU: 6,  # accel xyz then gyro xyz
    StreamId.MAG: 3,
}

#: nominal sampling rate in Hz
NOMINAL_RATE_HZ = {
    StreamId.EMG: 2000.0,
    StreamId.BIOZ: 2000.0,
    StreamId.IRPROX: 100.0,
    StreamId.TOF1: 40.0,
    StreamId.TOF64: 15.0,
    StreamId.IMU: 890.0,
    StreamId.MAG: 110.0,
}

#: integer microsecond sample periods used by the simulator; each is within
#: +/-1% of the nominal rate (890 Hz has no integer-microsecond period).
SAMPLE_PERIOD_US = {
    StreamId.EMG: 500,
    StreamId.BIOZ: 500,
    StreamId.IRPROX: 10_000,
    StreamId.TOF1: 25_000,
    StreamId.TOF64: 66_667,
    StreamId.IMU: 1_124,
    StreamId.MAG: 9_091,
}

STREAM_NAMES = {
    StreamId.EMG: "emg",
    StreamId.BIOZ: "bioz",
    StreamId.IRPROX: "ir",
    StreamId.TOF1: "tof1",
    StreamId.TOF64: "tof64",
    StreamId.IMU: "imu",
    StreamId.MAG: "mag",
}

#: the 2 kHz time-aligned matrix; ToF-64 rides as a separate low-rate side
#: channel and is not part of this layout.
ALIGNED_RATE_HZ = 2000
ALIGNED_PERIOD_US = 500

ALIGNED_COLUMNS = (
    tuple(f"emg{i}" for i in range(8))
    + ("bioz_i0", "bioz_q0", "bioz_i1", "bioz_q1")
    + tuple(f"ir{i}" for i in range(4))
    + ("tof1",)
    + ("accel_x", "accel_y", "accel_z")
    + ("gyro_x", "gyro_y", "gyro_z")
    + ("mag_x", "mag_y", "mag_z")
)

COLUMN_INDEX = {name: i for i, name in enumerate(ALIGNED_COLUMNS)}

#: aligned-column subsets consumed by each model
_EMG_COLS = tuple(range(0, 8))
_BIOZ_COLS = tuple(range(8, 12))
_IR_COLS = tuple(range(12, 16))
_ACCEL_COLS = tuple(range(17, 20))
_GYRO_COLS = tuple(range(20, 23))
_IMU_COLS = _ACCEL_COLS + _GYRO_COLS

MODEL_COLUMNS = {
    "world_touch": _EMG_COLS + _IR_COLS + _IMU_COLS,
    "body_touch": _BIOZ_COLS,
    "fingertip": _EMG_COLS + _IR_COLS + _IMU_COLS,
    "gesture": _IR_COLS + _IMU_COLS,
}

#: window length/stride in aligned samples (2 kHz)
MODEL_WINDOWS = {
    "world_touch": (2000, 17),  # 1 s window, 8.5 ms stride
    "body_touch": (500, 12),  # 250 ms window, 6 ms stride
    "fingertip": (400, 25),  # 200 ms window, 12.5 ms stride
    "gesture": (2000, 17),
}

GROUND_TRUTH_RATE_HZ = 240.0
GRAVITY = 9.81
