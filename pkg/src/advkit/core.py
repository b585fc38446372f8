"""Shared domain types: method labels, utterance records, embeddings.

All types validate their invariants on construction and are treated as
immutable afterwards, so they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

SPLITS = ("train", "validation", "test")
BRANCHES = ("structural", "artifact", "fused")


@dataclass(frozen=True)
class MethodLabel:
    """One exact generation method, or the bonafide (genuine audio) class.

    Within a corpus each name denotes exactly one method and at most one
    name may carry ``is_bonafide=True``; those corpus-level rules are
    enforced where corpora are assembled (see :mod:`advkit.manifest`).
    """

    name: str
    is_bonafide: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValidationError("method label name must be non-empty")
        if "\n" in self.name or "\t" in self.name:
            raise ValidationError(
                f"method label {self.name!r} contains a newline or tab"
            )


@dataclass(frozen=True)
class UtteranceRecord:
    """Identity of one audio sample within a corpus."""

    utt_id: str
    label: MethodLabel
    split: str
    source_path: str | None = None

    def __post_init__(self):
        if not self.utt_id:
            raise ValidationError("utt_id must be non-empty")
        if self.split not in SPLITS:
            raise ValidationError(
                f"unknown split {self.split!r}; expected one of {SPLITS}"
            )


@dataclass(frozen=True, eq=False)
class Embedding:
    """Fixed-dimension real vector attached to an utterance.

    ``branch`` records provenance (structural / artifact / fused).  Vectors
    are held as float64 in memory regardless of on-disk precision; entries
    must be finite.
    """

    utt_id: str
    branch: str
    vector: np.ndarray

    def __post_init__(self):
        if not self.utt_id:
            raise ValidationError("utt_id must be non-empty")
        if self.branch not in BRANCHES:
            raise ValidationError(
                f"unknown branch {self.branch!r}; expected one of {BRANCHES}"
            )
        vec = np.asarray(self.vector, dtype=np.float64)
        if vec.ndim != 1 or vec.size < 1:
            raise ValidationError("embedding vector must be 1-D and non-empty")
        if not np.all(np.isfinite(vec)):
            raise ValidationError(
                f"embedding {self.utt_id!r} contains non-finite entries"
            )
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return int(self.vector.size)

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return (
            self.utt_id == other.utt_id
            and self.branch == other.branch
            and np.array_equal(self.vector, other.vector)
        )
