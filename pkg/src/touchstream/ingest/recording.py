"""Session recordings: the in-memory container and the chunked file format.

File layout (little-endian):

    magic    b"TSR1"
    version  u16
    metadata u32 length + UTF-8 JSON object
    streams  u8 count, then per stream:
             id u8, name u8-len + utf-8, channels u16, period u32 (us),
             sample count u64
    chunks   u32 frame length + one wire-protocol frame, repeated to EOF

Chunk payloads are the same CRC-protected frames as the live protocol, so
corruption is detected per chunk.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from touchstream.errors import IntegrityError, ValidationError
from touchstream.streams import CHANNELS, NOMINAL_RATE_HZ, STREAM_NAMES, StreamId

from .packets import decode_packet, encode_packet

MAGIC = b"TSR1"
VERSION = 1


@dataclass
class RawRecording:
    streams: dict  # StreamId -> (timestamps_us int64 [N], samples float32 [N, C])
    metadata: dict = field(default_factory=dict)

    def validate(self):
        for sid, (ts, samples) in self.streams.items():
            sid = StreamId(sid)
            ts = np.asarray(ts)
            if samples.ndim != 2 or samples.shape[1] != CHANNELS[sid]:
                raise ValidationError(
                    f"{sid.name}: expected {CHANNELS[sid]} channels, got {samples.shape}"
                )
            if len(ts) != len(samples):
                raise ValidationError(f"{sid.name}: timestamp/sample length mismatch")
            if len(ts) > 1:
                dt = np.diff(ts)
                if not np.all(dt > 0):
                    raise ValidationError(f"{sid.name}: timestamps not strictly increasing")
                rate = 1e6 / dt.mean()
                nominal = NOMINAL_RATE_HZ[sid]
                if abs(rate - nominal) > 0.01 * nominal:
                    raise ValidationError(
                        f"{sid.name}: mean rate {rate:.1f} Hz outside 1% of {nominal} Hz"
                    )
        return self

    def duration_s(self):
        ends = [ts[-1] for ts, _ in self.streams.values() if len(ts)]
        return max(ends) / 1e6 if ends else 0.0

    def equals(self, other):
        if set(self.streams) != set(other.streams) or self.metadata != other.metadata:
            return False
        for sid, (ts, samples) in self.streams.items():
            ots, osamples = other.streams[sid]
            if not (np.array_equal(ts, ots) and np.array_equal(samples, osamples)):
                return False
        return True


def write_recording(rec, sink):
    """Write a recording; ``sink`` is a path or binary file object."""
    if hasattr(sink, "write"):
        _write(rec, sink)
    else:
        with open(sink, "wb") as fh:
            _write(rec, fh)


def _write(rec, fh):
    fh.write(MAGIC)
    fh.write(struct.pack("<H", VERSION))
    meta = json.dumps(rec.metadata, sort_keys=True).encode("utf-8")
    fh.write(struct.pack("<I", len(meta)))
    fh.write(meta)
    sids = sorted(rec.streams, key=int)
    fh.write(struct.pack("<B", len(sids)))
    for sid in sids:
        ts, samples = rec.streams[sid]
        sid = StreamId(sid)
        name = STREAM_NAMES[sid].encode("utf-8")
        period = int(ts[1] - ts[0]) if len(ts) > 1 else 0
        fh.write(struct.pack("<BB", int(sid), len(name)))
        fh.write(name)
        fh.write(struct.pack("<HIQ", CHANNELS[sid], period, len(ts)))
    for sid in sids:
        ts, samples = rec.streams[sid]
        # one chunk per ~100 ms keeps corrupt-chunk blast radius small
        period = int(ts[1] - ts[0]) if len(ts) > 1 else 1
        per = max(1, 100_000 // max(period, 1))
        for start in range(0, len(ts), per):
            sl = slice(start, start + per)
            frame = encode_packet(sid, ts[sl], np.asarray(samples[sl], dtype=np.float32))
            fh.write(struct.pack("<I", len(frame)))
            fh.write(frame)


def read_recording(source):
    """Read a recording; ``source`` is a path or binary file object."""
    if hasattr(source, "read"):
        raw = source.read()
    else:
        with open(source, "rb") as fh:
            raw = fh.read()
    if raw[:4] != MAGIC:
        raise IntegrityError("not a recording file (bad magic)")
    (version,) = struct.unpack_from("<H", raw, 4)
    if version != VERSION:
        raise IntegrityError(f"unsupported recording version {version}")
    (mlen,) = struct.unpack_from("<I", raw, 6)
    at = 10
    metadata = json.loads(raw[at : at + mlen].decode("utf-8")) if mlen else {}
    at += mlen
    (n_streams,) = struct.unpack_from("<B", raw, at)
    at += 1
    declared = {}
    for _ in range(n_streams):
        sid, nlen = struct.unpack_from("<BB", raw, at)
        at += 2 + nlen
        channels, period, count = struct.unpack_from("<HIQ", raw, at)
        at += struct.calcsize("<HIQ")
        declared[StreamId(sid)] = count

    parts = {}
    chunk_index = 0
    while at < len(raw):
        if len(raw) - at < 4:
            raise IntegrityError(
                f"file truncated after chunk {chunk_index - 1} (dangling length field)"
            )
        (flen,) = struct.unpack_from("<I", raw, at)
        at += 4
        if len(raw) - at < flen:
            raise IntegrityError(
                f"file truncated mid-chunk; last complete chunk is {chunk_index - 1}"
            )
        try:
            pkt, _ = decode_packet(raw, at)
        except Exception as exc:
            raise IntegrityError(f"chunk {chunk_index} corrupt: {exc}") from exc
        parts.setdefault(pkt.stream_id, []).append(pkt)
        at += flen
        chunk_index += 1

    streams = {}
    for sid, pkts in parts.items():
        ts = np.concatenate([p.timestamps_us for p in pkts])
        samples = np.concatenate([p.samples for p in pkts], axis=0)
        streams[sid] = (ts, samples)
    for sid, count in declared.items():
        have = len(streams.get(sid, ((), ()))[0])
        if have != count:
            raise IntegrityError(
                f"{StreamId(sid).name}: stream table declares {count} samples, "
                f"chunks carry {have}"
            )
        if count == 0:
            streams.setdefault(
                sid,
                (
                    np.zeros(0, dtype=np.int64),
                    np.zeros((0, CHANNELS[StreamId(sid)]), dtype=np.float32),
                ),
            )
    return RawRecording(streams=streams, metadata=metadata)
