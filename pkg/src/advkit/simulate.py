"""Synthetic method-cluster corpora with controllable separation.

Each method gets a centroid drawn uniformly on the unit sphere and scaled by
the separation multiplier; samples are the centroid plus isotropic Gaussian
noise, L2-normalized.  Everything is driven by one PCG64 stream per spec
seed, so a spec generates the same corpus on every run.  A 2-D projection
(top-2 principal components via power iteration) stands in for stochastic
neighbor layouts when plotting clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .core import SPLITS, Embedding, MethodLabel, UtteranceRecord
from .errors import ValidationError

_POWER_TOL = 1e-9
_POWER_MAX_ITER = 10_000
_START_SEED = 0  # fixed start-vector stream for the power iteration


@dataclass(frozen=True)
class ClusterSpec:
    n_methods: int
    samples_per_method: int
    dim: int
    separation: float
    intra_std: float
    seed: int
    bonafide_separation: float | None = None
    split: str = "test"

    def __post_init__(self):
        if self.n_methods < 2:
            raise ValidationError("need at least 2 methods")
        if self.samples_per_method < 1:
            raise ValidationError("samples_per_method must be >= 1")
        if self.dim < 2:
            raise ValidationError("dim must be >= 2")
        if not np.isfinite(self.separation) or self.separation < 0:
            raise ValidationError("separation must be finite and >= 0")
        if not np.isfinite(self.intra_std) or self.intra_std <= 0:
            raise ValidationError("intra_std must be finite and > 0")
        if self.bonafide_separation is not None and (
            not np.isfinite(self.bonafide_separation) or self.bonafide_separation < 0
        ):
            raise ValidationError("bonafide_separation must be finite and >= 0")
        if self.split not in SPLITS:
            raise ValidationError(f"split must be one of {SPLITS}")


def generate(spec: ClusterSpec) -> tuple[list[UtteranceRecord], list[Embedding]]:
    """(manifest records, unit-norm embeddings with branch "fused")."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    clusters = [(f"M{i:03d}", spec.separation) for i in range(spec.n_methods)]
    if spec.bonafide_separation is not None:
        clusters.append(("bonafide", spec.bonafide_separation))

    records: list[UtteranceRecord] = []
    embeddings: list[Embedding] = []
    for name, scale in clusters:
        direction = rng.standard_normal(spec.dim)
        center = scale * direction / np.linalg.norm(direction)
        noise = spec.intra_std * rng.standard_normal((spec.samples_per_method, spec.dim))
        samples = center + noise
        norms = np.linalg.norm(samples, axis=1)
        if np.any(norms == 0.0):
            raise ValidationError(f"degenerate zero-norm sample in cluster {name!r}")
        samples /= norms[:, None]
        label = MethodLabel(name=name, is_bonafide=(name == "bonafide"))
        for j, row in enumerate(samples):
            utt_id = f"{name}-{j:04d}"
            records.append(
                UtteranceRecord(utt_id=utt_id, label=label, split=spec.split)
            )
            embeddings.append(Embedding(utt_id=utt_id, branch="fused", vector=row))
    return records, embeddings


def _orthogonal_fallback(v: np.ndarray) -> np.ndarray:
    # Deterministic unit vector orthogonal to v, for rank-deficient covariance.
    basis = np.zeros_like(v)
    basis[int(np.argmin(np.abs(v)))] = 1.0
    u = basis - np.dot(basis, v) * v
    return u / np.linalg.norm(u)


def _top_eigenvector(matrix: np.ndarray, start: np.ndarray) -> tuple[np.ndarray, float]:
    v = start / np.linalg.norm(start)
    for _ in range(_POWER_MAX_ITER):
        w = matrix @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            break  # matrix annihilates v: eigenvalue 0, caller handles direction
        w /= norm
        if min(np.linalg.norm(w - v), np.linalg.norm(w + v)) < _POWER_TOL:
            v = w
            break
        v = w
    peak = int(np.argmax(np.abs(v)))
    if v[peak] < 0:
        v = -v
    return v, float(v @ matrix @ v)


@dataclass(frozen=True)
class ProjectedPoint:
    utt_id: str
    x: float
    y: float
    label: str


def project_2d(
    embeddings: Sequence[Embedding], records: Sequence[UtteranceRecord]
) -> list[ProjectedPoint]:
    """Mean-centered projection onto the top-2 principal directions."""
    if len(embeddings) < 3:
        raise ValidationError("projection needs at least 3 embeddings")
    if embeddings[0].dim < 2:
        raise ValidationError("projection needs dimension >= 2")
    label_of = {rec.utt_id: rec.label.name for rec in records}
    for emb in embeddings:
        if emb.utt_id not in label_of:
            raise ValidationError(f"utt_id {emb.utt_id!r} missing from the manifest")

    matrix = np.stack([emb.vector for emb in embeddings])
    centered = matrix - matrix.mean(axis=0)
    cov = centered.T @ centered / len(embeddings)
    if float(np.trace(cov)) == 0.0:
        raise ValidationError("covariance has rank 0 (all points identical)")

    start_rng = np.random.Generator(np.random.PCG64(_START_SEED))
    v1, lam1 = _top_eigenvector(cov, start_rng.standard_normal(cov.shape[0]))
    deflated = cov - lam1 * np.outer(v1, v1)
    v2, lam2 = _top_eigenvector(deflated, start_rng.standard_normal(cov.shape[0]))
    if lam2 <= _POWER_TOL * lam1:
        v2 = _orthogonal_fallback(v1)

    coords = centered @ np.stack([v1, v2], axis=1)
    return [
        ProjectedPoint(
            utt_id=emb.utt_id,
            x=float(coords[i, 0]),
            y=float(coords[i, 1]),
            label=label_of[emb.utt_id],
        )
        for i, emb in enumerate(embeddings)
    ]


def write_projection_csv(points: Sequence[ProjectedPoint], sink: IO[str]) -> None:
    """CSV of utterance coordinates plus one `centroid:<label>` row per label."""
    sink.write("utt_id,x,y,label\n")
    for p in points:
        sink.write(f"{p.utt_id},{p.x!r},{p.y!r},{p.label}\n")
    by_label: dict[str, list[ProjectedPoint]] = {}
    for p in points:
        by_label.setdefault(p.label, []).append(p)
    for label in sorted(by_label):
        xs = float(np.mean([p.x for p in by_label[label]]))
        ys = float(np.mean([p.y for p in by_label[label]]))
        sink.write(f"centroid:{label},{xs!r},{ys!r},{label}\n")


def save_projection_csv(points: Sequence[ProjectedPoint], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_projection_csv(points, fh)
