"""Trial scoring: enrollment centroids, cosine similarity, decisions,
and bonafide-posterior detection scores.

A method is represented by the L2-normalized mean of its L2-normalized
embeddings (normalize-then-average, so high-norm outliers cannot dominate).
Trial scores are cosines between the two side centroids; a trial is accepted
as "same" only when its score strictly exceeds the threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .core import Embedding, MethodLabel, UtteranceRecord
from .errors import ValidationError
from .trials import TRIAL_LABELS, TrialPair

_SCORE_SLACK = 1e-9


@dataclass(frozen=True)
class ScoredTrial:
    trial_id: str
    score: float
    label: str

    def __post_init__(self):
        if self.label not in TRIAL_LABELS:
            raise ValidationError(
                f"scored trial {self.trial_id!r}: unknown label {self.label!r}"
            )
        if not np.isfinite(self.score) or abs(self.score) > 1.0 + _SCORE_SLACK:
            raise ValidationError(
                f"scored trial {self.trial_id!r}: score {self.score} outside [-1, 1]"
            )


@dataclass(frozen=True, eq=False)
class MethodCentroid:
    """Unit-norm representative vector for one method."""

    label: MethodLabel
    vector: np.ndarray
    support: int

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.float64)
        if self.support < 1:
            raise ValidationError("centroid support must be >= 1")
        if abs(float(np.linalg.norm(vec)) - 1.0) > _SCORE_SLACK:
            raise ValidationError(f"centroid for {self.label.name!r} is not unit-norm")
        object.__setattr__(self, "vector", vec)


def _unit(vec: np.ndarray, what: str) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ValidationError(f"cannot L2-normalize zero vector ({what})")
    return vec / norm


def centroid(embeddings: Sequence[Embedding]) -> np.ndarray:
    """L2-normalized arithmetic mean of L2-normalized embedding vectors."""
    if not embeddings:
        raise ValidationError("centroid of empty embedding sequence")
    dim = embeddings[0].dim
    rows = []
    for emb in embeddings:
        if emb.dim != dim:
            raise ValidationError(
                f"centroid inputs disagree on dimension: {emb.dim} vs {dim}"
            )
        rows.append(_unit(emb.vector, f"embedding {emb.utt_id!r}"))
    mean = np.mean(rows, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise ValidationError("centroid mean is zero (inputs cancel)")
    return mean / norm


def as_store_map(store: Sequence[Embedding] | Mapping[str, Embedding]) -> Mapping[str, Embedding]:
    if isinstance(store, Mapping):
        return store
    return {emb.utt_id: emb for emb in store}


def score_trials(
    trials: Sequence[TrialPair],
    store: Sequence[Embedding] | Mapping[str, Embedding],
) -> list[ScoredTrial]:
    """Cosine between enrollment and verification centroids, trial order kept."""
    emb_map = as_store_map(store)
    scored = []
    for trial in trials:
        sides = []
        for ids in (trial.enroll_ids, trial.verify_ids):
            embs = []
            for utt_id in ids:
                if utt_id not in emb_map:
                    raise ValidationError(
                        f"trial {trial.trial_id!r} references utt_id {utt_id!r} "
                        f"missing from the embedding store"
                    )
                embs.append(emb_map[utt_id])
            sides.append(centroid(embs))
        score = float(np.dot(sides[0], sides[1]))
        scored.append(ScoredTrial(trial_id=trial.trial_id, score=score, label=trial.label))
    return scored


def decide(scored: Sequence[ScoredTrial], threshold: float) -> list[str]:
    """"same" iff score strictly exceeds the threshold; a tie is rejected."""
    if not np.isfinite(threshold):
        raise ValidationError("decision threshold must be finite")
    return ["same" if trial.score > threshold else "different" for trial in scored]


def method_centroids(
    embeddings: Sequence[Embedding], records: Sequence[UtteranceRecord]
) -> list[MethodCentroid]:
    """One centroid per method present in both store and manifest, sorted by name."""
    label_of = {rec.utt_id: rec.label for rec in records}
    groups: dict[str, list[Embedding]] = {}
    labels: dict[str, MethodLabel] = {}
    for emb in embeddings:
        if emb.utt_id not in label_of:
            raise ValidationError(f"utt_id {emb.utt_id!r} missing from the manifest")
        label = label_of[emb.utt_id]
        groups.setdefault(label.name, []).append(emb)
        labels[label.name] = label
    return [
        MethodCentroid(
            label=labels[name],
            vector=centroid(groups[name]),
            support=len(groups[name]),
        )
        for name in sorted(groups)
    ]


@dataclass(frozen=True)
class DetectionScore:
    utt_id: str
    score: float
    is_bonafide: bool


def detection_scores(
    embeddings: Sequence[Embedding],
    records: Sequence[UtteranceRecord],
    centroids: Sequence[MethodCentroid],
    temperature: float = 0.1,
) -> list[DetectionScore]:
    """Bonafide posterior per utterance: softmax over centroid cosines.

    score(u) = exp(cos(u, c_bonafide)/tau) / sum_k exp(cos(u, c_k)/tau),
    a nearest-centroid substitute for a trained detection head.
    """
    if temperature <= 0:
        raise ValidationError("temperature must be > 0")
    bonafide = [c for c in centroids if c.label.is_bonafide]
    if len(bonafide) != 1:
        raise ValidationError(
            f"need exactly one bonafide centroid, got {len(bonafide)}"
        )
    if len(centroids) < 2:
        raise ValidationError("need at least one non-bonafide centroid")
    flag_of = {rec.utt_id: rec.label.is_bonafide for rec in records}
    matrix = np.stack([c.vector for c in centroids])
    bona_index = next(i for i, c in enumerate(centroids) if c.label.is_bonafide)

    out = []
    for emb in embeddings:
        if emb.utt_id not in flag_of:
            raise ValidationError(f"utt_id {emb.utt_id!r} missing from the manifest")
        unit = _unit(emb.vector, f"embedding {emb.utt_id!r}")
        logits = matrix @ unit / temperature
        logits -= logits.max()  # stable softmax
        weights = np.exp(logits)
        posterior = float(weights[bona_index] / weights.sum())
        out.append(
            DetectionScore(
                utt_id=emb.utt_id, score=posterior, is_bonafide=flag_of[emb.utt_id]
            )
        )
    return out


def write_scored(scored: Sequence[ScoredTrial], sink: IO[str]) -> None:
    for trial in scored:
        sink.write(
            json.dumps(
                {"trial_id": trial.trial_id, "score": trial.score, "label": trial.label},
                separators=(",", ":"),
            )
            + "\n"
        )


def read_scored(source: IO[str] | Iterable[str]) -> list[ScoredTrial]:
    scored = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scored line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or not {"trial_id", "score", "label"} <= obj.keys():
            raise ValidationError(f"scored line {lineno}: expected keys trial_id, score, label")
        if not isinstance(obj["score"], (int, float)) or isinstance(obj["score"], bool):
            raise ValidationError(f"scored line {lineno}: score must be a number")
        try:
            scored.append(
                ScoredTrial(trial_id=obj["trial_id"], score=float(obj["score"]), label=obj["label"])
            )
        except ValidationError as exc:
            raise ValidationError(f"scored line {lineno}: {exc}") from exc
    return scored


def write_detection(scores: Sequence[DetectionScore], sink: IO[str]) -> None:
    for det in scores:
        sink.write(
            json.dumps(
                {"utt_id": det.utt_id, "score": det.score, "is_bonafide": det.is_bonafide},
                separators=(",", ":"),
            )
            + "\n"
        )


def read_detection(source: IO[str] | Iterable[str]) -> list[DetectionScore]:
    out = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"detection line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or not {"utt_id", "score", "is_bonafide"} <= obj.keys():
            raise ValidationError(
                f"detection line {lineno}: expected keys utt_id, score, is_bonafide"
            )
        out.append(
            DetectionScore(
                utt_id=obj["utt_id"],
                score=float(obj["score"]),
                is_bonafide=bool(obj["is_bonafide"]),
            )
        )
    return out


def load_scored(path) -> list[ScoredTrial]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_scored(fh)


def save_scored(scored: Sequence[ScoredTrial], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_scored(scored, fh)


def save_detection(scores: Sequence[DetectionScore], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_detection(scores, fh)
