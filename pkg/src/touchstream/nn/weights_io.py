"""Weight store serialization: versioned, little-endian, content-hashed.

Layout (all little-endian):
    magic   b"TSW1"
    version u16
    arch id u16 length + utf-8 bytes
    count   u32
    entries name(u16 len + utf-8), kind u8 (0 param / 1 buffer),
            ndim u8, dims u32*ndim, payload float32
    trailer sha256 over everything before it
"""

import hashlib
import io
import struct

import numpy as np

from touchstream.errors import ArchMismatchError, IntegrityError

from .archs import build_model

MAGIC = b"TSW1"
VERSION = 1


def _write_str(buf, s):
    raw = s.encode("utf-8")
    buf.write(struct.pack("<H", len(raw)))
    buf.write(raw)


def state_dict(model):
    """(name, kind, float32 array) triples for every parameter and buffer."""
    out = []
    for name, arr in sorted(model.parameters().items()):
        out.append((name, 0, np.asarray(arr, dtype=np.float32)))
    for name, arr in sorted(model.named_buffers().items()):
        out.append((name, 1, np.asarray(arr, dtype=np.float32)))
    return out


def save_weights(model, path):
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<H", VERSION))
    _write_str(buf, model.arch_id)
    entries = state_dict(model)
    buf.write(struct.pack("<I", len(entries)))
    for name, kind, arr in entries:
        _write_str(buf, name)
        buf.write(struct.pack("<BB", kind, arr.ndim))
        buf.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        buf.write(arr.astype("<f4").tobytes())
    body = buf.getvalue()
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(hashlib.sha256(body).digest())


class WeightsFile:
    def __init__(self, arch_id, entries):
        self.arch_id = arch_id
        self.entries = entries  # name -> (kind, array)


def load_weights(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 32 + 10:
        raise IntegrityError(f"weight file truncated: {len(raw)} bytes")
    body, digest = raw[:-32], raw[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise IntegrityError("weight file content hash mismatch")
    view = io.BytesIO(body)
    if view.read(4) != MAGIC:
        raise IntegrityError("bad weight file magic")
    (version,) = struct.unpack("<H", view.read(2))
    if version != VERSION:
        raise IntegrityError(f"unsupported weight file version {version}")
    (alen,) = struct.unpack("<H", view.read(2))
    arch_id = view.read(alen).decode("utf-8")
    (count,) = struct.unpack("<I", view.read(4))
    entries = {}
    for _ in range(count):
        (nlen,) = struct.unpack("<H", view.read(2))
        name = view.read(nlen).decode("utf-8")
        kind, ndim = struct.unpack("<BB", view.read(2))
        dims = struct.unpack(f"<{ndim}I", view.read(4 * ndim))
        n = int(np.prod(dims)) if dims else 1
        payload = view.read(4 * n)
        if len(payload) != 4 * n:
            raise IntegrityError(f"weight entry '{name}' truncated")
        entries[name] = (kind, np.frombuffer(payload, dtype="<f4").reshape(dims).copy())
    return WeightsFile(arch_id, entries)


def apply_weights(model, wf):
    if wf.arch_id != model.arch_id:
        raise ArchMismatchError(
            f"weights are for '{wf.arch_id}', model is '{model.arch_id}'"
        )
    expect = {name: 0 for name in model.parameters()}
    expect.update({name: 1 for name in model.named_buffers()})
    got = {name: kind for name, (kind, _) in wf.entries.items()}
    if expect != got:
        missing = sorted(set(expect) - set(got))
        extra = sorted(set(got) - set(expect))
        raise ArchMismatchError(
            f"weight key set mismatch (missing={missing}, unexpected={extra})"
        )
    params = model.parameters()
    buffers = model.named_buffers()
    for name, (kind, arr) in wf.entries.items():
        target = params[name] if kind == 0 else buffers[name]
        if target.shape != arr.shape:
            raise ArchMismatchError(f"shape mismatch for '{name}'")
        target[...] = arr
    return model


def load_model(path, seed=0):
    wf = load_weights(path)
    model = build_model(wf.arch_id, seed=seed)
    return apply_weights(model, wf)
