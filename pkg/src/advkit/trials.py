"""Verification trial construction and persistence.

A trial compares an enrollment side (#E utterances of one method) against a
verification side (#V utterances); "same" trials draw both sides from one
method, "different" trials from an ordered pair of distinct methods.  All
randomness flows through one PCG64 stream (the repo's fixed RNG), so a
(manifest, parameters, seed) triple always yields the same trial list.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .core import UtteranceRecord
from .errors import ValidationError

logger = logging.getLogger(__name__)

TRIAL_LABELS = ("same", "different")


@dataclass(frozen=True)
class TrialPair:
    """One verification trial; enrollment and verification ids are disjoint."""

    trial_id: str
    enroll_ids: tuple[str, ...]
    verify_ids: tuple[str, ...]
    label: str

    def __post_init__(self):
        if not self.trial_id:
            raise ValidationError("trial_id must be non-empty")
        if self.label not in TRIAL_LABELS:
            raise ValidationError(
                f"trial {self.trial_id!r}: unknown label {self.label!r}; "
                f"expected one of {TRIAL_LABELS}"
            )
        object.__setattr__(self, "enroll_ids", tuple(self.enroll_ids))
        object.__setattr__(self, "verify_ids", tuple(self.verify_ids))
        if len(self.enroll_ids) < 1 or len(self.verify_ids) < 1:
            raise ValidationError(f"trial {self.trial_id!r}: both sides need >= 1 id")
        if len(set(self.enroll_ids)) != len(self.enroll_ids):
            raise ValidationError(f"trial {self.trial_id!r}: duplicate enrollment ids")
        if len(set(self.verify_ids)) != len(self.verify_ids):
            raise ValidationError(f"trial {self.trial_id!r}: duplicate verification ids")
        if set(self.enroll_ids) & set(self.verify_ids):
            raise ValidationError(
                f"trial {self.trial_id!r}: enrollment and verification ids overlap"
            )


def _rng(seed: int) -> np.random.Generator:
    # PCG64 is the fixed, documented generator for all trial sampling.
    return np.random.Generator(np.random.PCG64(seed))


def _group_by_method(records: Sequence[UtteranceRecord]) -> dict[str, list[UtteranceRecord]]:
    groups: dict[str, list[UtteranceRecord]] = {}
    for rec in records:
        groups.setdefault(rec.label.name, []).append(rec)
    return groups


def eligible_methods(
    records: Sequence[UtteranceRecord], e_count: int, v_count: int
) -> tuple[dict[str, list[UtteranceRecord]], list[str]]:
    """Split methods into (eligible groups, excluded names) for #E/#V sampling."""
    groups = _group_by_method(records)
    need = e_count + v_count
    eligible = {name: g for name, g in groups.items() if len(g) >= need}
    excluded = sorted(name for name, g in groups.items() if len(g) < need)
    return eligible, excluded


def generate_trials(
    records: Sequence[UtteranceRecord],
    e_count: int,
    v_count: int,
    trials_per_class: int,
    seed: int,
) -> list[TrialPair]:
    """Sample ``trials_per_class`` same and different trials.

    Methods with fewer than #E + #V utterances are excluded (logged).  Same
    trials draw a method uniformly, then #E+#V distinct utterances; different
    trials draw an ordered pair of distinct methods, enrollment from the
    first, verification from the second.  Trials may repeat across the list
    (sampling with replacement at the trial level), never within a trial.
    Output: all same trials then all different trials, ids "t000000", ...
    """
    if e_count < 1 or v_count < 1:
        raise ValidationError("e_count and v_count must be >= 1")
    if trials_per_class < 1:
        raise ValidationError("trials_per_class must be >= 1")
    splits = {rec.split for rec in records}
    if len(splits) > 1:
        raise ValidationError(
            f"trial generation expects records of one split, got {sorted(splits)}"
        )

    eligible, excluded = eligible_methods(records, e_count, v_count)
    if excluded:
        logger.warning(
            "excluding %d method(s) with fewer than %d utterances: %s",
            len(excluded), e_count + v_count, ", ".join(excluded),
        )
    if len(eligible) < 2:
        raise ValidationError(
            f"need >= 2 methods with at least {e_count + v_count} utterances, "
            f"have {len(eligible)} (excluded: {', '.join(excluded) or 'none'})"
        )

    methods = sorted(eligible)
    ids_by_method = {name: [rec.utt_id for rec in eligible[name]] for name in methods}
    rng = _rng(seed)
    trials: list[TrialPair] = []

    for _ in range(trials_per_class):
        name = methods[int(rng.integers(len(methods)))]
        ids = ids_by_method[name]
        picked = rng.choice(len(ids), size=e_count + v_count, replace=False)
        trials.append(
            TrialPair(
                trial_id=f"t{len(trials):06d}",
                enroll_ids=tuple(ids[i] for i in picked[:e_count]),
                verify_ids=tuple(ids[i] for i in picked[e_count:]),
                label="same",
            )
        )

    for _ in range(trials_per_class):
        a = int(rng.integers(len(methods)))
        b = int(rng.integers(len(methods) - 1))
        if b >= a:
            b += 1
        enroll_pool = ids_by_method[methods[a]]
        verify_pool = ids_by_method[methods[b]]
        e_idx = rng.choice(len(enroll_pool), size=e_count, replace=False)
        v_idx = rng.choice(len(verify_pool), size=v_count, replace=False)
        trials.append(
            TrialPair(
                trial_id=f"t{len(trials):06d}",
                enroll_ids=tuple(enroll_pool[i] for i in e_idx),
                verify_ids=tuple(verify_pool[i] for i in v_idx),
                label="different",
            )
        )
    return trials


def balance_subset(
    records: Sequence[UtteranceRecord], per_type: int = 1000, seed: int = 0
) -> list[UtteranceRecord]:
    """Per method, sample min(per_type, available) records without replacement.

    The subset preserves manifest order; sampling is deterministic in seed.
    """
    if per_type < 1:
        raise ValidationError("per_type must be >= 1")
    if not records:
        raise ValidationError("cannot balance an empty manifest")

    index_by_method: dict[str, list[int]] = {}
    for i, rec in enumerate(records):
        index_by_method.setdefault(rec.label.name, []).append(i)

    rng = _rng(seed)
    keep: list[int] = []
    for name in sorted(index_by_method):
        indices = index_by_method[name]
        if len(indices) <= per_type:
            keep.extend(indices)
        else:
            picked = rng.choice(len(indices), size=per_type, replace=False)
            keep.extend(indices[i] for i in picked)
    return [records[i] for i in sorted(keep)]


def verify_labels(trials: Iterable[TrialPair], records: Sequence[UtteranceRecord]) -> None:
    """Recompute every trial's label from the manifest; raise on any mismatch."""
    method_of = {rec.utt_id: rec.label.name for rec in records}
    for trial in trials:
        try:
            enroll = {method_of[i] for i in trial.enroll_ids}
            verify = {method_of[i] for i in trial.verify_ids}
        except KeyError as exc:
            raise ValidationError(
                f"trial {trial.trial_id!r} references unknown utt_id {exc.args[0]!r}"
            ) from exc
        if len(enroll) != 1 or len(verify) != 1:
            raise ValidationError(
                f"trial {trial.trial_id!r}: each side must be a single method"
            )
        expected = "same" if enroll == verify else "different"
        if trial.label != expected:
            raise ValidationError(
                f"trial {trial.trial_id!r}: label {trial.label!r} but manifest says {expected!r}"
            )


def write_trials(trials: Sequence[TrialPair], sink: IO[str]) -> None:
    for trial in trials:
        sink.write(
            json.dumps(
                {
                    "trial_id": trial.trial_id,
                    "enroll": list(trial.enroll_ids),
                    "verify": list(trial.verify_ids),
                    "label": trial.label,
                },
                separators=(",", ":"),
            )
            + "\n"
        )


def read_trials(source: IO[str] | Iterable[str]) -> list[TrialPair]:
    """Parse a trial JSON-lines stream, re-validating every trial invariant."""
    trials: list[TrialPair] = []
    seen: set[str] = set()
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"trials line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict) or not {"trial_id", "enroll", "verify", "label"} <= obj.keys():
            raise ValidationError(
                f"trials line {lineno}: expected keys trial_id, enroll, verify, label"
            )
        enroll = obj["enroll"]
        verify = obj["verify"]
        if not isinstance(enroll, list) or not all(isinstance(x, str) for x in enroll):
            raise ValidationError(f"trials line {lineno}: enroll must be a list of strings")
        if not isinstance(verify, list) or not all(isinstance(x, str) for x in verify):
            raise ValidationError(f"trials line {lineno}: verify must be a list of strings")
        try:
            trial = TrialPair(
                trial_id=obj["trial_id"],
                enroll_ids=tuple(enroll),
                verify_ids=tuple(verify),
                label=obj["label"],
            )
        except ValidationError as exc:
            raise ValidationError(f"trials line {lineno}: {exc}") from exc
        if trial.trial_id in seen:
            raise ValidationError(
                f"trials line {lineno}: duplicate trial_id {trial.trial_id!r}"
            )
        seen.add(trial.trial_id)
        trials.append(trial)
    return trials


def load_trials(path) -> list[TrialPair]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_trials(fh)


def save_trials(trials: Sequence[TrialPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_trials(trials, fh)
