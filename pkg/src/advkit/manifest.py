"""Corpus manifests: UTF-8 JSON-lines, one utterance per line.

Required keys per line: ``utt_id``, ``label``, ``is_bonafide``, ``split``;
optional ``source_path``.  Corpus-level rules enforced on read: unique
utt_ids, a label name always carries the same bonafide flag, and at most
one label name is bonafide.
"""

from __future__ import annotations

import json
from typing import IO, Iterable, Sequence

from .core import SPLITS, MethodLabel, UtteranceRecord
from .errors import ValidationError

_REQUIRED_KEYS = {"utt_id", "label", "is_bonafide", "split"}
_ALLOWED_KEYS = _REQUIRED_KEYS | {"source_path"}


def read_manifest(source: IO[str] | Iterable[str]) -> list[UtteranceRecord]:
    """Parse a manifest stream; errors name the offending 1-based line."""
    records: list[UtteranceRecord] = []
    seen_ids: dict[str, int] = {}
    label_flags: dict[str, bool] = {}
    bonafide_name: str | None = None

    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"manifest line {lineno}: malformed JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise ValidationError(f"manifest line {lineno}: expected a JSON object")

        missing = _REQUIRED_KEYS - obj.keys()
        if missing:
            raise ValidationError(
                f"manifest line {lineno}: missing keys {sorted(missing)}"
            )
        unknown = obj.keys() - _ALLOWED_KEYS
        if unknown:
            raise ValidationError(
                f"manifest line {lineno}: unknown keys {sorted(unknown)}"
            )

        utt_id = obj["utt_id"]
        name = obj["label"]
        is_bonafide = obj["is_bonafide"]
        split = obj["split"]
        source_path = obj.get("source_path")
        if not isinstance(utt_id, str) or not isinstance(name, str):
            raise ValidationError(f"manifest line {lineno}: utt_id and label must be strings")
        if not isinstance(is_bonafide, bool):
            raise ValidationError(f"manifest line {lineno}: is_bonafide must be a boolean")
        if split not in SPLITS:
            raise ValidationError(
                f"manifest line {lineno}: unknown split {split!r}; expected one of {SPLITS}"
            )
        if source_path is not None and not isinstance(source_path, str):
            raise ValidationError(f"manifest line {lineno}: source_path must be a string")

        if utt_id in seen_ids:
            raise ValidationError(
                f"manifest line {lineno}: duplicate utt_id {utt_id!r} "
                f"(first seen on line {seen_ids[utt_id]})"
            )
        if name in label_flags and label_flags[name] != is_bonafide:
            raise ValidationError(
                f"manifest line {lineno}: label {name!r} changes its bonafide flag"
            )
        if is_bonafide:
            if bonafide_name is not None and bonafide_name != name:
                raise ValidationError(
                    f"manifest line {lineno}: second bonafide label {name!r} "
                    f"(already have {bonafide_name!r})"
                )
            bonafide_name = name

        try:
            record = UtteranceRecord(
                utt_id=utt_id,
                label=MethodLabel(name=name, is_bonafide=is_bonafide),
                split=split,
                source_path=source_path,
            )
        except ValidationError as exc:
            raise ValidationError(f"manifest line {lineno}: {exc}") from exc
        seen_ids[utt_id] = lineno
        label_flags[name] = is_bonafide
        records.append(record)
    return records


def write_manifest(records: Sequence[UtteranceRecord], sink: IO[str]) -> None:
    """Emit records as JSON-lines in the given order (deterministic bytes)."""
    for rec in records:
        obj = {
            "utt_id": rec.utt_id,
            "label": rec.label.name,
            "is_bonafide": rec.label.is_bonafide,
            "split": rec.split,
        }
        if rec.source_path is not None:
            obj["source_path"] = rec.source_path
        sink.write(json.dumps(obj, separators=(",", ":")) + "\n")


def load_manifest(path) -> list[UtteranceRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        return read_manifest(fh)


def save_manifest(records: Sequence[UtteranceRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_manifest(records, fh)
