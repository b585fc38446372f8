"""Manifest parsing and WAV ingestion for the bridge."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.io import wavfile

from .errors import BridgeError

_SPLITS = ("train", "validation", "test")


@dataclass(frozen=True)
class ManifestEntry:
    utt_id: str
    label: str
    is_bonafide: bool
    split: str
    source_path: str | None


def read_manifest(path) -> list[ManifestEntry]:
    """JSON-lines manifest: utt_id, label, is_bonafide, split[, source_path]."""
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            try:
                entry = ManifestEntry(
                    utt_id=obj["utt_id"],
                    label=obj["label"],
                    is_bonafide=obj["is_bonafide"],
                    split=obj["split"],
                    source_path=obj.get("source_path"),
                )
            except KeyError as exc:
                raise BridgeError(f"{path}:{lineno}: missing key {exc.args[0]!r}") from exc
            if entry.split not in _SPLITS:
                raise BridgeError(f"{path}:{lineno}: unknown split {entry.split!r}")
            if not entry.utt_id or entry.utt_id in seen:
                raise BridgeError(f"{path}:{lineno}: empty or duplicate utt_id")
            seen.add(entry.utt_id)
            entries.append(entry)
    if not entries:
        raise BridgeError(f"{path}: empty manifest")
    return entries


def load_wav(path) -> tuple[np.ndarray, int]:
    """(mono float64 samples in [-1, 1], sample rate); PCM16 or float32 only."""
    try:
        rate, data = wavfile.read(path)
    except (ValueError, OSError) as exc:
        raise BridgeError(f"{path}: cannot read WAV ({exc})") from exc
    if data.dtype == np.int16:
        wave = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        wave = data.astype(np.float64)
    else:
        raise BridgeError(f"{path}: unsupported WAV encoding {data.dtype}")
    if wave.ndim == 2:
        wave = wave.mean(axis=1)
    return np.clip(wave, -1.0, 1.0), int(rate)
