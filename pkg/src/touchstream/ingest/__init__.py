"""Stream ingest: wire protocol, recording files, alignment, windowing."""

from .align import AlignedBlock, resample_align
from .packets import (
    StreamPacket,
    decode_packet,
    encode_packet,
    iter_packets,
    packetize_recording,
    recording_from_packets,
)
from .recording import RawRecording, read_recording, write_recording
from .windows import Window, WindowConfig, window, window_count, window_matrix

__all__ = [
    "AlignedBlock",
    "RawRecording",
    "StreamPacket",
    "Window",
    "WindowConfig",
    "decode_packet",
    "encode_packet",
    "iter_packets",
    "packetize_recording",
    "read_recording",
    "recording_from_packets",
    "resample_align",
    "window",
    "window_count",
    "window_matrix",
    "write_recording",
]
