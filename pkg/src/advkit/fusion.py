"""Branch combination: z-normalize each branch, concatenate, L2-normalize.

Single-branch passthrough modes (structural_only / artifact_only) share the
same normalize-then-unit pipeline, so every output embedding is unit-norm
and cosine-comparable regardless of mode.  Normalization statistics are
fitted once on a reference store and frozen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Embedding
from .errors import ValidationError

MODES = ("fused", "structural_only", "artifact_only")


@dataclass(frozen=True, eq=False)
class NormalizerStats:
    """Per-dimension mean/std (population convention, std floored)."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        std = np.asarray(self.std, dtype=np.float64)
        if mean.shape != std.shape or mean.ndim != 1:
            raise ValidationError("normalizer mean/std must be 1-D and same shape")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(std))):
            raise ValidationError("normalizer statistics must be finite")
        if np.any(std <= 0.0):
            raise ValidationError("normalizer std entries must be > 0")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    def apply(self, vector: np.ndarray) -> np.ndarray:
        if vector.size != self.dim:
            raise ValidationError(
                f"vector dim {vector.size} does not match normalizer dim {self.dim}"
            )
        return (vector - self.mean) / self.std


def fit_normalizer(store: Sequence[Embedding], floor: float = 1e-6) -> NormalizerStats:
    """Per-dimension mean/std over a store; std floored at ``floor``."""
    if not store:
        raise ValidationError("cannot fit a normalizer on an empty store")
    if floor <= 0.0:
        raise ValidationError("std floor must be > 0")
    matrix = np.stack([emb.vector for emb in store])
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)  # population (ddof=0)
    return NormalizerStats(mean=mean, std=np.maximum(std, floor))


@dataclass(frozen=True)
class BranchConfig:
    """Branch-selection mode plus the fitted normalization for each branch."""

    mode: str
    structural: NormalizerStats | None = None
    artifact: NormalizerStats | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode in ("fused", "structural_only") and self.structural is None:
            raise ValidationError(f"mode {self.mode!r} requires structural normalizer stats")
        if self.mode in ("fused", "artifact_only") and self.artifact is None:
            raise ValidationError(f"mode {self.mode!r} requires artifact normalizer stats")

    def to_json(self) -> str:
        doc: dict = {"mode": self.mode}
        for name, stats in (("structural", self.structural), ("artifact", self.artifact)):
            if stats is not None:
                doc[name] = {"mean": stats.mean.tolist(), "std": stats.std.tolist()}
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BranchConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed branch config JSON: {exc.msg}") from exc
        if not isinstance(doc, dict) or "mode" not in doc:
            raise ValidationError("branch config must be an object with a 'mode' key")
        stats = {}
        for name in ("structural", "artifact"):
            if name in doc:
                entry = doc[name]
                if not isinstance(entry, dict) or "mean" not in entry or "std" not in entry:
                    raise ValidationError(f"branch config {name!r} needs mean and std arrays")
                stats[name] = NormalizerStats(
                    mean=np.asarray(entry["mean"], dtype=np.float64),
                    std=np.asarray(entry["std"], dtype=np.float64),
                )
        return cls(mode=doc["mode"], structural=stats.get("structural"), artifact=stats.get("artifact"))


def _require(emb: Embedding | None, stats: NormalizerStats, side: str) -> np.ndarray:
    if emb is None:
        raise ValidationError(f"mode requires a {side} embedding, got none")
    return stats.apply(emb.vector)


def fuse(
    structural: Embedding | None,
    artifact: Embedding | None,
    config: BranchConfig,
) -> Embedding:
    """Combine branch embeddings per ``config.mode``; output is unit-norm."""
    if config.mode == "fused":
        s = _require(structural, config.structural, "structural")
        a = _require(artifact, config.artifact, "artifact")
        if structural.utt_id != artifact.utt_id:
            raise ValidationError(
                f"branch utt_ids disagree: {structural.utt_id!r} vs {artifact.utt_id!r}"
            )
        utt_id = structural.utt_id
        combined = np.concatenate([s, a])  # structural first, fixed convention
    elif config.mode == "structural_only":
        combined = _require(structural, config.structural, "structural")
        utt_id = structural.utt_id
    else:
        combined = _require(artifact, config.artifact, "artifact")
        utt_id = artifact.utt_id

    norm = float(np.linalg.norm(combined))
    if norm == 0.0:
        raise ValidationError(f"utt_id {utt_id!r}: zero vector after normalization")
    return Embedding(utt_id=utt_id, branch="fused", vector=combined / norm)


def fuse_stores(
    structural: Sequence[Embedding] | None,
    artifact: Sequence[Embedding] | None,
    config: BranchConfig,
) -> list[Embedding]:
    """Apply :func:`fuse` across whole stores, aligned by utt_id.

    In fused mode both stores must cover exactly the same utt_ids; output
    follows the order of the mode's primary store (structural for fused and
    structural_only, artifact for artifact_only).
    """
    if config.mode == "fused":
        if structural is None or artifact is None:
            raise ValidationError("fused mode requires both stores")
        art_map = {emb.utt_id: emb for emb in artifact}
        missing = [emb.utt_id for emb in structural if emb.utt_id not in art_map]
        extra = set(art_map) - {emb.utt_id for emb in structural}
        if missing or extra:
            raise ValidationError(
                f"stores disagree on utt_ids (missing from artifact: {sorted(missing)[:5]}, "
                f"extra in artifact: {sorted(extra)[:5]})"
            )
        return [fuse(emb, art_map[emb.utt_id], config) for emb in structural]
    if config.mode == "structural_only":
        if structural is None:
            raise ValidationError("structural_only mode requires a structural store")
        return [fuse(emb, None, config) for emb in structural]
    if artifact is None:
        raise ValidationError("artifact_only mode requires an artifact store")
    return [fuse(None, emb, config) for emb in artifact]


def fit_config(
    mode: str,
    structural: Sequence[Embedding] | None = None,
    artifact: Sequence[Embedding] | None = None,
    floor: float = 1e-6,
) -> BranchConfig:
    """Fit the normalizers a mode needs and bundle them into a config."""
    needs_structural = mode in ("fused", "structural_only")
    needs_artifact = mode in ("fused", "artifact_only")
    return BranchConfig(
        mode=mode,
        structural=fit_normalizer(structural, floor) if needs_structural else None,
        artifact=fit_normalizer(artifact, floor) if needs_artifact else None,
    )


def save_config(config: BranchConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config.to_json() + "\n")


def load_config(path) -> BranchConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return BranchConfig.from_json(fh.read())
