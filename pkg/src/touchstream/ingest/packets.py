"""Wire protocol: framed sensor packets with CRC-32 trailer.

Frame layout (little-endian):

    magic    2B   b"TF"
    version  1B   0x01
    header  16B   stream_id u8, flags u8 (reserved, 0), base_timestamp u64 (us),
                  sample_count u16, sample_period u32 (us)
    payload       sample_count * channels * 4 bytes of IEEE-754 binary32
    crc      4B   CRC-32 over version + header + payload

Channel count is implied by the stream id (see ``touchstream.streams``).
"""

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from touchstream.errors import FramingError, ValidationError
from touchstream.streams import CHANNELS, StreamId

MAGIC = b"TF"
VERSION = 1
_HEADER = struct.Struct("<BBQHI")  # 16 bytes
HEADER_SIZE = _HEADER.size
PREAMBLE_SIZE = 3  # magic + version
CRC_SIZE = 4


@dataclass
class StreamPacket:
    stream_id: StreamId
    base_timestamp_us: int
    sample_count: int
    sample_period_us: int
    samples: np.ndarray  # [count, channels] float32

    @property
    def timestamps_us(self):
        return self.base_timestamp_us + self.sample_period_us * np.arange(
            self.sample_count, dtype=np.int64
        )


def encode_packet(stream_id, timestamps_us, samples):
    """Frame one packet; timestamps must be uniformly spaced."""
    stream_id = StreamId(stream_id)
    timestamps_us = np.asarray(timestamps_us, dtype=np.int64)
    samples = np.asarray(samples, dtype="<f4")
    n = len(timestamps_us)
    if n == 0:
        raise ValidationError("cannot encode an empty packet")
    if samples.shape != (n, CHANNELS[stream_id]):
        raise ValidationError(
            f"samples must be [{n}, {CHANNELS[stream_id]}] for {stream_id.name}, "
            f"got {samples.shape}"
        )
    if n > 1:
        periods = np.diff(timestamps_us)
        if not np.all(periods == periods[0]):
            raise ValidationError("packet timestamps must be uniformly spaced")
        period = int(periods[0])
        if period <= 0:
            raise ValidationError("sample period must be positive")
    else:
        period = 1
    if n > 0xFFFF:
        raise ValidationError("sample count exceeds u16")
    header = _HEADER.pack(int(stream_id), 0, int(timestamps_us[0]), n, period)
    payload = samples.tobytes()
    body = bytes([VERSION]) + header + payload
    crc = zlib.crc32(body)
    return MAGIC + body + struct.pack("<I", crc)


def decode_packet(data, offset=0):
    """Decode one packet at ``offset``; returns (StreamPacket, next_offset)."""
    view = memoryview(data)
    if len(view) - offset < PREAMBLE_SIZE + HEADER_SIZE + CRC_SIZE:
        raise FramingError(
            f"truncated frame at byte {offset}: "
            f"{len(view) - offset} bytes remain", offset
        )
    if bytes(view[offset : offset + 2]) != MAGIC:
        raise FramingError(f"bad magic at byte {offset}", offset)
    if view[offset + 2] != VERSION:
        raise FramingError(
            f"unsupported protocol version {view[offset + 2]} at byte {offset}",
            offset,
        )
    hdr_at = offset + PREAMBLE_SIZE
    sid, _flags, base_ts, count, period = _HEADER.unpack_from(view, hdr_at)
    try:
        stream_id = StreamId(sid)
    except ValueError:
        raise FramingError(f"unknown stream id {sid} at byte {offset}", offset) from None
    payload_len = count * CHANNELS[stream_id] * 4
    end = hdr_at + HEADER_SIZE + payload_len + CRC_SIZE
    if len(view) < end:
        raise FramingError(
            f"truncated payload at byte {offset}: need {end - offset} bytes, "
            f"have {len(view) - offset}", offset
        )
    body = view[offset + 2 : end - CRC_SIZE]
    (crc_stored,) = struct.unpack_from("<I", view, end - CRC_SIZE)
    crc = zlib.crc32(body)
    if crc != crc_stored:
        raise FramingError(
            f"CRC mismatch at byte {offset}: stored {crc_stored:#010x}, "
            f"computed {crc:#010x}", offset
        )
    payload = view[hdr_at + HEADER_SIZE : end - CRC_SIZE]
    samples = (
        np.frombuffer(payload, dtype="<f4")
        .reshape(count, CHANNELS[stream_id])
        .copy()
    )
    pkt = StreamPacket(stream_id, base_ts, count, period, samples)
    return pkt, end


def iter_packets(data, offset=0):
    """Yield every packet in a concatenated frame buffer."""
    while offset < len(data):
        pkt, offset = decode_packet(data, offset)
        yield pkt


def packetize_recording(rec, boundary_ms=10):
    """Serialize a recording as frames cut at fixed time boundaries.

    Packets across streams are interleaved in (base timestamp, stream id)
    order, as a live device would emit them.
    """
    boundary_us = int(boundary_ms) * 1000
    frames = []
    for sid in sorted(rec.streams, key=int):
        ts, samples = rec.streams[sid]
        if len(ts) == 0:
            continue
        period = int(ts[1] - ts[0]) if len(ts) > 1 else 1
        per = max(1, boundary_us // max(period, 1))
        for start in range(0, len(ts), per):
            chunk = slice(start, start + per)
            frames.append(
                (int(ts[start]), int(sid), encode_packet(sid, ts[chunk], samples[chunk]))
            )
    frames.sort(key=lambda f: (f[0], f[1]))
    return b"".join(f[2] for f in frames)


def recording_from_packets(data, metadata=None):
    """Rebuild a recording from a concatenated frame buffer."""
    from .recording import RawRecording

    parts = {}
    for pkt in iter_packets(data):
        parts.setdefault(pkt.stream_id, []).append(pkt)
    streams = {}
    for sid, pkts in parts.items():
        pkts.sort(key=lambda p: p.base_timestamp_us)
        ts = np.concatenate([p.timestamps_us for p in pkts])
        samples = np.concatenate([p.samples for p in pkts], axis=0)
        streams[sid] = (ts, samples)
    return RawRecording(streams=streams, metadata=dict(metadata or {}))
