"""Verification metrics: ROC/DET curve, EER, AUROC, fixed-rate operating
points, and the eight-metric report.

Conventions, fixed here and relied on by callers:

* "same" is the acceptance (positive) class; FAR is the fraction of
  different-trials accepted, FRR the fraction of same-trials rejected.
* The curve holds one operating point per distinct score value v, giving the
  rates when every trial scoring >= v is accepted, plus an above-max endpoint
  (FAR 0, FRR 1) and a below-min endpoint (FAR 1, FRR 0).  Curve thresholds
  label the points with the score values themselves (endpoints sit 1.0
  outside the score range).
* Decisions use the strict ">" rule, so thresholds returned by :func:`eer`
  and :func:`operating_point` are *realizable*: the midpoint of the gap
  below the labeled score value, where decide() reproduces the point's
  rates exactly.
* EER interpolates FAR and FRR linearly between the two adjacent curve
  points where FAR - FRR changes sign; an exact FAR == FRR point is
  returned directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import ValidationError
from .scoring import ScoredTrial


def _split_scores(scored: Sequence[ScoredTrial]) -> tuple[np.ndarray, np.ndarray]:
    same = np.array([t.score for t in scored if t.label == "same"], dtype=np.float64)
    diff = np.array([t.score for t in scored if t.label == "different"], dtype=np.float64)
    if same.size == 0 or diff.size == 0:
        raise ValidationError(
            f"need at least one trial of each class, got {same.size} same / {diff.size} different"
        )
    return same, diff


@dataclass(frozen=True)
class RocCurve:
    """Operating points along strictly decreasing thresholds.

    FAR is non-decreasing and FRR non-increasing along the sequence.
    """

    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def __len__(self) -> int:
        return len(self.thresholds)

    def realizable_threshold(self, index: int) -> float:
        """A threshold at which decide() reproduces this point's rates."""
        if index < len(self.thresholds) - 1:
            return float((self.thresholds[index] + self.thresholds[index + 1]) / 2.0)
        return float(self.thresholds[index])

    def write_csv(self, sink: IO[str]) -> None:
        sink.write("threshold,far,frr\n")
        for t, fa, fr in zip(self.thresholds, self.far, self.frr):
            sink.write(f"{t!r},{fa!r},{fr!r}\n")


def roc(scored: Sequence[ScoredTrial]) -> RocCurve:
    same, diff = _split_scores(scored)
    values = np.unique(np.concatenate([same, diff]))[::-1]  # distinct, descending
    same_sorted = np.sort(same)
    diff_sorted = np.sort(diff)
    # Rates for accepting score >= v: ties collapse into the single point at v.
    far_inner = (diff.size - np.searchsorted(diff_sorted, values, side="left")) / diff.size
    frr_inner = np.searchsorted(same_sorted, values, side="left") / same.size
    thresholds = np.concatenate([[values[0] + 1.0], values, [values[-1] - 1.0]])
    far = np.concatenate([[0.0], far_inner, [1.0]])
    frr = np.concatenate([[1.0], frr_inner, [0.0]])
    return RocCurve(thresholds=thresholds, far=far, frr=frr)


def eer(scored: Sequence[ScoredTrial]) -> tuple[float, float]:
    """(EER value, realizable threshold at the crossing)."""
    curve = roc(scored)
    gap = curve.far - curve.frr  # non-decreasing, runs from -1 to +1
    exact = np.flatnonzero(gap == 0.0)
    if exact.size:
        i = int(exact[0])
        return float(curve.far[i]), curve.realizable_threshold(i)
    j = int(np.argmax(gap > 0.0))
    i = j - 1
    dfar = curve.far[j] - curve.far[i]
    dfrr = curve.frr[j] - curve.frr[i]
    u = (curve.frr[i] - curve.far[i]) / (dfar - dfrr)
    value = float(curve.far[i] + u * dfar)
    threshold = float(curve.thresholds[i] + u * (curve.thresholds[j] - curve.thresholds[i]))
    return value, threshold


def auroc(scored: Sequence[ScoredTrial]) -> float:
    """Pair-ordering statistic: P(same score > diff score) + 0.5 P(tie)."""
    same, diff = _split_scores(scored)
    ranks = rankdata(np.concatenate([same, diff]), method="average")
    rank_sum = float(ranks[: same.size].sum())
    return (rank_sum - same.size * (same.size + 1) / 2.0) / (same.size * diff.size)


@dataclass(frozen=True)
class OperatingPoint:
    threshold: float
    far: float
    frr: float


def operating_point(
    scored: Sequence[ScoredTrial],
    max_far: float | None = None,
    max_frr: float | None = None,
) -> OperatingPoint:
    """Best achievable curve point under FAR <= alpha or FRR <= alpha.

    No interpolation: the reported rates are empirically realizable.  Under a
    FAR cap the point minimizes FRR (ties resolved toward higher FAR), and
    symmetrically under an FRR cap.
    """
    if (max_far is None) == (max_frr is None):
        raise ValidationError("specify exactly one of max_far / max_frr")
    alpha = max_far if max_far is not None else max_frr
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"constraint must lie in (0, 1), got {alpha}")
    curve = roc(scored)
    if max_far is not None:
        # far is non-decreasing: feasible points form a prefix.
        feasible = np.flatnonzero(curve.far <= alpha)
        i = int(feasible[-1])
    else:
        # frr is non-increasing: feasible points form a suffix.
        feasible = np.flatnonzero(curve.frr <= alpha)
        i = int(feasible[0])
    return OperatingPoint(
        threshold=curve.realizable_threshold(i),
        far=float(curve.far[i]),
        frr=float(curve.frr[i]),
    )


@dataclass(frozen=True)
class ConfusionCounts:
    n_same: int
    n_different: int
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class MetricsReport:
    """The eight-metric bundle at one decision threshold."""

    acc: float
    far: float
    frr: float
    eer: float
    f1: float
    auroc: float
    frr_at_far1: float
    far_at_frr1: float
    threshold_used: float
    counts: ConfusionCounts

    def as_dict(self) -> dict:
        return {
            "acc": self.acc,
            "far": self.far,
            "frr": self.frr,
            "eer": self.eer,
            "f1": self.f1,
            "auroc": self.auroc,
            "frr_at_far1": self.frr_at_far1,
            "far_at_frr1": self.far_at_frr1,
            "threshold_used": self.threshold_used,
            "counts": {
                "n_same": self.counts.n_same,
                "n_different": self.counts.n_different,
                "tp": self.counts.tp,
                "fp": self.counts.fp,
                "tn": self.counts.tn,
                "fn": self.counts.fn,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def report(scored: Sequence[ScoredTrial], threshold: float) -> MetricsReport:
    """Confusion counts at ``threshold`` (strict ">") plus the full suite.

    The threshold comes from calibration, never from the scored set itself;
    FAR and FRR are exact rational counts.
    """
    if not np.isfinite(threshold):
        raise ValidationError("report threshold must be finite")
    same, diff = _split_scores(scored)
    tp = int(np.sum(same > threshold))
    fn = same.size - tp
    fp = int(np.sum(diff > threshold))
    tn = diff.size - fp
    eer_value, _ = eer(scored)
    return MetricsReport(
        acc=(tp + tn) / (same.size + diff.size),
        far=fp / diff.size,
        frr=fn / same.size,
        eer=eer_value,
        f1=2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0,
        auroc=auroc(scored),
        frr_at_far1=operating_point(scored, max_far=0.01).frr,
        far_at_frr1=operating_point(scored, max_frr=0.01).far,
        threshold_used=float(threshold),
        counts=ConfusionCounts(
            n_same=int(same.size),
            n_different=int(diff.size),
            tp=tp,
            fp=fp,
            tn=tn,
            fn=fn,
        ),
    )


def calibrate(scored: Sequence[ScoredTrial]) -> float:
    """Decision threshold at the validation EER crossing."""
    _, threshold = eer(scored)
    return threshold
