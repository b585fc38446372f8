"""Writer for the engine's ADVE v1 store format (structural branch).

Byte layout, little-endian throughout::

    magic b"ADVE" | uint16 version=1 | uint8 branch_tag | uint32 dim
    | uint64 count | per record: uint16 id length, UTF-8 utt_id, dim float32

This is an independent implementation from the published layout; round-trip
compatibility with the engine's reader is pinned by the contract tests.
"""

from __future__ import annotations

import struct
from typing import Sequence

import numpy as np

from .errors import BridgeError

MAGIC = b"ADVE"
VERSION = 1
STRUCTURAL_TAG = 0

_HEADER = struct.Struct("<4sHBIQ")
_ID_LEN = struct.Struct("<H")


def store_bytes(records: Sequence[tuple[str, np.ndarray]], branch_tag: int = STRUCTURAL_TAG) -> bytes:
    """Serialize (utt_id, vector) pairs; all vectors must share one dimension."""
    if not records:
        raise BridgeError("refusing to write an empty store")
    dim = int(np.asarray(records[0][1]).size)
    seen: set[str] = set()
    chunks = [_HEADER.pack(MAGIC, VERSION, branch_tag, dim, len(records))]
    for utt_id, vector in records:
        arr = np.asarray(vector, dtype=np.float64).reshape(-1)
        if arr.size != dim:
            raise BridgeError(f"{utt_id!r}: dimension {arr.size} != {dim}")
        if not np.all(np.isfinite(arr)):
            raise BridgeError(f"{utt_id!r}: non-finite embedding values")
        if not utt_id or utt_id in seen:
            raise BridgeError(f"empty or duplicate utt_id {utt_id!r}")
        seen.add(utt_id)
        encoded = utt_id.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise BridgeError(f"utt_id {utt_id!r} exceeds 65535 bytes")
        chunks.append(_ID_LEN.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(arr.astype("<f4").tobytes())
    return b"".join(chunks)


def write_store_file(records: Sequence[tuple[str, np.ndarray]], path) -> int:
    blob = store_bytes(records)
    with open(path, "wb") as fh:
        fh.write(blob)
    return len(blob)
