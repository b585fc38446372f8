"""ADVE v1 embedding store: a compact little-endian binary format.

Layout::

    header : magic b"ADVE" | uint16 version=1 | uint8 branch_tag
             | uint32 dim | uint64 count                          (19 bytes)
    record : uint16 utt_id byte length | utt_id UTF-8 bytes
             | dim * float32

All integers and floats are little-endian; branch_tag is 0=structural,
1=artifact, 2=fused.  Files are a deterministic function of their input
(no timestamps, no randomness): identical embeddings produce identical
bytes.  Reading widens vectors to float64; the round trip is bit-exact
for any float32-representable input, and every strict prefix of a valid
file fails to parse.
"""

from __future__ import annotations

import io
import struct
from typing import BinaryIO, Sequence

import numpy as np

from .core import BRANCHES, Embedding
from .errors import FormatError, ValidationError

MAGIC = b"ADVE"
VERSION = 1

_HEADER = struct.Struct("<4sHBIQ")
_ID_LEN = struct.Struct("<H")

BRANCH_TAGS = {name: tag for tag, name in enumerate(BRANCHES)}
TAG_BRANCHES = {tag: name for name, tag in BRANCH_TAGS.items()}


def write_store(records: Sequence[Embedding], sink: BinaryIO) -> int:
    """Serialize embeddings to ``sink``; returns the byte count written.

    All records must share one (branch, dim) pair and have unique utt_ids.
    """
    if not records:
        raise ValidationError("cannot write an empty embedding store")
    branch = records[0].branch
    dim = records[0].dim
    seen: set[str] = set()
    for rec in records:
        if rec.dim != dim:
            raise FormatError(
                f"mixed dimensions in store: {rec.utt_id!r} has dim {rec.dim}, "
                f"expected {dim}"
            )
        if rec.branch != branch:
            raise ValidationError(
                f"mixed branches in store: {rec.utt_id!r} is {rec.branch!r}, "
                f"expected {branch!r}"
            )
        if rec.utt_id in seen:
            raise ValidationError(f"duplicate utt_id {rec.utt_id!r} in store")
        seen.add(rec.utt_id)

    written = 0
    written += sink.write(
        _HEADER.pack(MAGIC, VERSION, BRANCH_TAGS[branch], dim, len(records))
    )
    for rec in records:
        id_bytes = rec.utt_id.encode("utf-8")
        if len(id_bytes) > 0xFFFF:
            raise ValidationError(f"utt_id {rec.utt_id!r} exceeds 65535 bytes")
        written += sink.write(_ID_LEN.pack(len(id_bytes)))
        written += sink.write(id_bytes)
        written += sink.write(rec.vector.astype("<f4").tobytes())
    return written


def read_store(source: BinaryIO) -> list[Embedding]:
    """Parse an ADVE v1 stream; the exact inverse of :func:`write_store`.

    Raises :class:`FormatError` naming the byte offset on any truncation,
    bad magic/version, unknown branch tag, or trailing bytes.
    """
    offset = 0

    def take(n: int, what: str) -> bytes:
        nonlocal offset
        chunk = source.read(n)
        if len(chunk) != n:
            raise FormatError(
                f"truncated store: expected {n} bytes for {what} "
                f"at byte offset {offset}, got {len(chunk)}"
            )
        offset += n
        return chunk

    magic, version, branch_tag, dim, count = _HEADER.unpack(take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}; expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported store version {version}; expected {VERSION}")
    if branch_tag not in TAG_BRANCHES:
        raise FormatError(f"unknown branch tag {branch_tag}")
    if dim < 1:
        raise FormatError(f"header dim must be >= 1, got {dim}")
    branch = TAG_BRANCHES[branch_tag]

    records = []
    for index in range(count):
        (id_len,) = _ID_LEN.unpack(take(_ID_LEN.size, f"record {index} id length"))
        if id_len == 0:
            raise FormatError(f"record {index} has empty utt_id at byte offset {offset}")
        try:
            utt_id = take(id_len, f"record {index} utt_id").decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"record {index} utt_id is not valid UTF-8: {exc}") from exc
        raw = take(4 * dim, f"record {index} vector")
        vector = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        records.append(Embedding(utt_id=utt_id, branch=branch, vector=vector))

    if source.read(1):
        raise FormatError(f"trailing data after {count} records at byte offset {offset}")
    return records


def save_store(records: Sequence[Embedding], path) -> int:
    with open(path, "wb") as fh:
        return write_store(records, fh)


def load_store(path) -> list[Embedding]:
    with open(path, "rb") as fh:
        return read_store(fh)


def store_bytes(records: Sequence[Embedding]) -> bytes:
    buf = io.BytesIO()
    write_store(records, buf)
    return buf.getvalue()
