"""Canonical serialization of keys and ciphertexts.

Format: a 2-byte big-endian tag length, the UTF-8 scheme tag, a 4-byte
component count, then each magnitude as a 4-byte big-endian length
followed by its minimal big-endian bytes (zero encodes as length 0).
Byte-exactness is only promised within one artifact version; the format
exists so transcripts can digest and compare ciphertexts exactly.
"""

from __future__ import annotations

import hashlib
import struct
from collections.abc import Sequence

from .errors import SerializationError


def encode_natural(value: int) -> bytes:
    if value < 0:
        raise SerializationError("naturals only")
    return value.to_bytes((value.bit_length() + 7) // 8, "big")


def encode_naturals(tag: str, values: Sequence[int]) -> bytes:
    tag_bytes = tag.encode("utf-8")
    parts = [struct.pack(">H", len(tag_bytes)), tag_bytes,
             struct.pack(">I", len(values))]
    for value in values:
        magnitude = encode_natural(value)
        parts.append(struct.pack(">I", len(magnitude)))
        parts.append(magnitude)
    return b"".join(parts)


def decode_naturals(blob: bytes) -> tuple[str, list[int]]:
    try:
        (tag_len,) = struct.unpack_from(">H", blob, 0)
        offset = 2 + tag_len
        tag = blob[2:offset].decode("utf-8")
        (count,) = struct.unpack_from(">I", blob, offset)
        offset += 4
        values = []
        for _ in range(count):
            (mag_len,) = struct.unpack_from(">I", blob, offset)
            offset += 4
            magnitude = blob[offset:offset + mag_len]
            if len(magnitude) != mag_len:
                raise SerializationError("truncated magnitude")
            if mag_len and magnitude[0] == 0:
                raise SerializationError("non-canonical leading zero")
            values.append(int.from_bytes(magnitude, "big"))
            offset += mag_len
    except struct.error as exc:
        raise SerializationError(str(exc)) from exc
    if offset != len(blob):
        raise SerializationError("trailing bytes")
    return tag, values


def digest_hex(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()
