"""Batch extraction: manifest of audio files -> structural ADVE store."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import ManifestEntry, load_wav, read_manifest
from .backbones import BUILTIN_SPECTRAL, get_backbone
from .errors import BridgeError
from .storefmt import write_store_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtractorConfig:
    """Which backbone to run and how.

    ``layer`` selects the hidden representation to mean-pool (-1 = last);
    ``batch_size`` chunks the utterance loop (memory control, not padded
    batching, so pooled vectors never depend on batch composition);
    ``spectral_dim`` only affects the builtin backbone.
    """

    model: str = BUILTIN_SPECTRAL
    layer: int = -1
    batch_size: int = 8
    device: str = "cpu"
    spectral_dim: int = 64

    def __post_init__(self):
        if not self.model:
            raise BridgeError("model identifier must be non-empty")
        if self.batch_size < 1:
            raise BridgeError("batch_size must be >= 1")
        if self.spectral_dim < 1:
            raise BridgeError("spectral_dim must be >= 1")


def extract(
    entries: list[ManifestEntry],
    config: ExtractorConfig,
    audio_root: str | None = None,
) -> tuple[list[tuple[str, np.ndarray]], list[tuple[str, str]]]:
    """One mean-pooled vector per utterance, in manifest order.

    Per-utterance decode or inference failures are collected, not fatal;
    backbone load failures and a fully-failed manifest are fatal.
    """
    backbone = get_backbone(
        config.model, layer=config.layer, device=config.device,
        spectral_dim=config.spectral_dim,
    )
    records: list[tuple[str, np.ndarray]] = []
    failures: list[tuple[str, str]] = []
    dim: int | None = None

    for start in range(0, len(entries), config.batch_size):
        for entry in entries[start : start + config.batch_size]:
            if entry.source_path is None:
                failures.append((entry.utt_id, "no source_path in manifest"))
                continue
            path = Path(audio_root) / entry.source_path if audio_root else Path(entry.source_path)
            try:
                wave, rate = load_wav(path)
                vector = np.asarray(backbone.embed(wave, rate), dtype=np.float64)
            except (BridgeError, OSError) as exc:
                failures.append((entry.utt_id, str(exc)))
                continue
            if vector.ndim != 1 or not np.all(np.isfinite(vector)):
                failures.append((entry.utt_id, "backbone produced a non-finite or non-1D vector"))
                continue
            if dim is None:
                dim = vector.size
            elif vector.size != dim:
                raise BridgeError(
                    f"backbone dimension drifted: {entry.utt_id!r} gave {vector.size}, "
                    f"expected {dim}"
                )
            records.append((entry.utt_id, vector))

    if not records:
        raise BridgeError(
            f"every utterance failed extraction; first failure: {failures[0]}"
        )
    for utt_id, message in failures:
        logger.warning("extraction failed for %s: %s", utt_id, message)
    return records, failures


def extract_to_file(
    manifest_path,
    out_path,
    config: ExtractorConfig,
    audio_root: str | None = None,
) -> tuple[int, list[tuple[str, str]]]:
    """Read the manifest, extract, write the structural store; returns
    (embedding count, failures)."""
    entries = read_manifest(manifest_path)
    records, failures = extract(entries, config, audio_root=audio_root)
    write_store_file(records, out_path)
    return len(records), failures
