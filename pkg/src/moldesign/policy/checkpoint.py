"""Checkpoint file format.

Layout: magic ``GXF1``; little-endian u32 length of a UTF-8 JSON manifest
{config, alphabet, tensors: [{name, shape}, ...]}; raw little-endian float32
tensor data concatenated in manifest order; little-endian u32 CRC-32 of the
data section.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from ..alphabet import Alphabet
from ..errors import CorruptCheckpoint
from .config import PolicyConfig
from .params import PolicyParams

MAGIC = b"GXF1"


def save_checkpoint(params: PolicyParams, alphabet: Alphabet, path) -> None:
    names = params.names()
    manifest = {
        "config": params.config.to_json(),
        "alphabet": alphabet.to_json(),
        "tensors": [{"name": n, "shape": list(params[n].shape)} for n in names],
    }
    blob = json.dumps(manifest, separators=(",", ":")).encode()
    payload = b"".join(
        np.ascontiguousarray(params[n], dtype="<f4").tobytes() for n in names
    )
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF))


def load_checkpoint(path):
    """Returns (params, alphabet). Raises CorruptCheckpoint on any mismatch."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise CorruptCheckpoint("bad magic bytes")
    (blob_len,) = struct.unpack_from("<I", raw, 4)
    manifest_end = 8 + blob_len
    if manifest_end + 4 > len(raw):
        raise CorruptCheckpoint("truncated manifest")
    try:
        manifest = json.loads(raw[8:manifest_end].decode())
        config = PolicyConfig.from_json(manifest["config"])
        alphabet = Alphabet.from_json(manifest["alphabet"])
        entries = manifest["tensors"]
    except (ValueError, KeyError, TypeError) as exc:
        raise CorruptCheckpoint(f"unreadable manifest: {exc}") from exc

    payload = raw[manifest_end:-4]
    (crc_stored,) = struct.unpack_from("<I", raw, len(raw) - 4)
    if zlib.crc32(payload) & 0xFFFFFFFF != crc_stored:
        raise CorruptCheckpoint("payload CRC mismatch")

    expected_floats = sum(int(np.prod(e["shape"])) for e in entries)
    if expected_floats * 4 != len(payload):
        raise CorruptCheckpoint(
            f"payload holds {len(payload) // 4} floats, manifest expects {expected_floats}"
        )
    tensors = {}
    offset = 0
    for e in entries:
        shape = tuple(e["shape"])
        count = int(np.prod(shape))
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        tensors[e["name"]] = arr.reshape(shape).astype(np.float32)
        offset += count * 4
    try:
        params = PolicyParams(config, tensors)
    except ValueError as exc:
        raise CorruptCheckpoint(str(exc)) from exc
    return params, alphabet
