import io

import pytest

from advkit.core import MethodLabel, UtteranceRecord
from advkit.errors import ValidationError
from advkit.manifest import read_manifest, write_manifest


def parse(text):
    return read_manifest(io.StringIO(text))


def test_single_line():
    records = parse('{"utt_id":"u1","label":"A19","is_bonafide":false,"split":"test"}\n')
    assert len(records) == 1
    assert records[0].utt_id == "u1"
    assert records[0].label == MethodLabel("A19", False)
    assert records[0].split == "test"
    assert records[0].source_path is None


def test_source_path_kept():
    records = parse(
        '{"utt_id":"u1","label":"A","is_bonafide":false,"split":"test","source_path":"x/y.wav"}\n'
    )
    assert records[0].source_path == "x/y.wav"


def test_duplicate_utt_id_names_line():
    text = (
        '{"utt_id":"u1","label":"A","is_bonafide":false,"split":"test"}\n'
        '{"utt_id":"u1","label":"B","is_bonafide":false,"split":"test"}\n'
    )
    with pytest.raises(ValidationError, match="line 2"):
        parse(text)


def test_bad_json_names_line():
    text = (
        '{"utt_id":"u1","label":"A","is_bonafide":false,"split":"test"}\n'
        "{not json}\n"
        '{"utt_id":"u3","label":"A","is_bonafide":false,"split":"test"}\n'
    )
    with pytest.raises(ValidationError, match="line 2"):
        parse(text)


def test_unknown_split_rejected():
    with pytest.raises(ValidationError, match="split"):
        parse('{"utt_id":"u1","label":"A","is_bonafide":false,"split":"dev"}\n')


def test_missing_key_rejected():
    with pytest.raises(ValidationError, match="missing"):
        parse('{"utt_id":"u1","label":"A","split":"test"}\n')


def test_unknown_key_rejected():
    with pytest.raises(ValidationError, match="unknown"):
        parse('{"utt_id":"u1","label":"A","is_bonafide":false,"split":"test","extra":1}\n')


def test_label_flag_must_be_consistent():
    text = (
        '{"utt_id":"u1","label":"A","is_bonafide":true,"split":"test"}\n'
        '{"utt_id":"u2","label":"A","is_bonafide":false,"split":"test"}\n'
    )
    with pytest.raises(ValidationError, match="bonafide"):
        parse(text)


def test_at_most_one_bonafide_label():
    text = (
        '{"utt_id":"u1","label":"real","is_bonafide":true,"split":"test"}\n'
        '{"utt_id":"u2","label":"genuine","is_bonafide":true,"split":"test"}\n'
    )
    with pytest.raises(ValidationError, match="second bonafide"):
        parse(text)


def test_label_with_tab_rejected():
    with pytest.raises(ValidationError):
        parse('{"utt_id":"u1","label":"A\\tB","is_bonafide":false,"split":"test"}\n')


def test_round_trip():
    records = [
        UtteranceRecord("u1", MethodLabel("A", False), "train", "a.wav"),
        UtteranceRecord("u2", MethodLabel("bonafide", True), "validation", None),
        UtteranceRecord("u3", MethodLabel("B, with comma", False), "test", None),
    ]
    buf = io.StringIO()
    write_manifest(records, buf)
    assert read_manifest(io.StringIO(buf.getvalue())) == records


def test_blank_lines_skipped():
    records = parse('\n{"utt_id":"u1","label":"A","is_bonafide":false,"split":"test"}\n\n')
    assert len(records) == 1
