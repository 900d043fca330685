import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ecgsec.ecg_data import (
    TEST,
    TRAIN,
    Dataset,
    EcgRecord,
    Manifest,
    ManifestEntry,
    deserialize_record,
    load_dataset,
    load_record,
    read_manifest,
    serialize_record,
    synthetic_dataset,
    write_manifest,
    write_record,
)
from ecgsec.errors import DataError


def write_lines(path, lines, trailing=True):
    path.write_text("\n".join(lines) + ("\n" if trailing else ""))
    return path


def test_zeros_file(tmp_path):
    r = load_record(write_lines(tmp_path / "z.txt", ["0.0"] * 300), 3)
    assert r.n == 300 and r.subject_id == 3
    assert not r.samples.any()


def test_no_trailing_newline(tmp_path):
    r = load_record(write_lines(tmp_path / "a.txt", ["1", "2", "3"], trailing=False), 0, n=3)
    assert r.samples.tolist() == [1.0, 2.0, 3.0]


def test_order_preserved(tmp_path):
    vals = [f"{i * 0.5}" for i in range(10)]
    r = load_record(write_lines(tmp_path / "o.txt", vals), 0, n=10)
    assert r.samples.tolist() == [i * 0.5 for i in range(10)]


def test_wrong_length(tmp_path):
    with pytest.raises(DataError) as e:
        load_record(write_lines(tmp_path / "s.txt", ["0.0"] * 299), 0)
    assert e.value.code == "WRONG_LENGTH"


def test_parse_error_reports_line(tmp_path):
    lines = ["0.0"] * 300
    lines[4] = "abc"
    with pytest.raises(DataError) as e:
        load_record(write_lines(tmp_path / "p.txt", lines), 0)
    assert e.value.code == "PARSE_ERROR"
    assert "line 5" in e.value.message


@pytest.mark.parametrize("bad", ["nan", "inf", "-inf", "1e40"])
def test_non_finite(tmp_path, bad):
    lines = ["0.0"] * 300
    lines[7] = bad
    with pytest.raises(DataError) as e:
        load_record(write_lines(tmp_path / "n.txt", lines), 0)
    assert e.value.code == "NON_FINITE"


def test_missing_file(tmp_path):
    with pytest.raises(DataError) as e:
        load_record(tmp_path / "nope.txt", 0)
    assert e.value.code == "IO_ERROR"


def test_write_record_round_trip(tmp_path, rng):
    r = EcgRecord(1, rng.normal(size=300))
    write_record(tmp_path / "r.txt", r)
    assert load_record(tmp_path / "r.txt", 1) == r


def _manifest(tmp_path, rows):
    entries = []
    for i, (sid, split) in enumerate(rows):
        p = write_lines(tmp_path / f"rec{i}.txt", [str(float(sid + i))] * 4)
        entries.append(ManifestEntry(p.relative_to(tmp_path), sid, split))
    write_manifest(tmp_path / "m.csv", entries)
    return tmp_path / "m.csv"


def test_two_subjects(tmp_path):
    path = _manifest(tmp_path, [(0, TRAIN), (0, TEST), (1, TRAIN), (1, TEST)])
    ds = load_dataset(path, n=4)
    assert len(ds.records) == 4
    assert [r.subject_id for r in ds.train] == [0, 1]
    assert [r.subject_id for r in ds.test] == [0, 1]


def test_dataset_loading_is_deterministic(tmp_path):
    path = _manifest(tmp_path, [(0, TRAIN), (1, TRAIN), (1, TEST)])
    assert load_dataset(path, n=4).records == load_dataset(path, n=4).records


def test_open_set_subject(tmp_path):
    path = _manifest(tmp_path, [(0, TRAIN), (0, TRAIN), (2, TEST)])
    with pytest.raises(DataError) as e:
        load_dataset(path, n=4)
    assert e.value.code == "OPEN_SET_SUBJECT"


def test_empty_manifest(tmp_path):
    (tmp_path / "m.csv").write_text("path,subject_id,split\n")
    with pytest.raises(DataError) as e:
        load_dataset(tmp_path / "m.csv", n=4)
    assert e.value.code == "TOO_FEW_TRAINING"


def test_manifest_validation(tmp_path):
    (tmp_path / "a.csv").write_text("file,label\nx,1\n")
    with pytest.raises(DataError, match="BAD_MANIFEST"):
        read_manifest(tmp_path / "a.csv")
    (tmp_path / "b.csv").write_text("path,subject_id,split\nx,1,VALIDATE\n")
    with pytest.raises(DataError, match="BAD_MANIFEST"):
        read_manifest(tmp_path / "b.csv")
    (tmp_path / "c.csv").write_text("path,subject_id,split\nx,1,train\nx,2,test\n")
    with pytest.raises(DataError, match="DUPLICATE_PATH"):
        read_manifest(tmp_path / "c.csv")
    (tmp_path / "d.csv").write_text("path,subject_id,split\nx,one,train\n")
    with pytest.raises(DataError, match="BAD_MANIFEST"):
        read_manifest(tmp_path / "d.csv")


def test_manifest_paths_relative_to_manifest(tmp_path):
    (tmp_path / "sub").mkdir()
    (tmp_path / "sub" / "m.csv").write_text("path,subject_id,split\nr.txt,4,train\n")
    m = read_manifest(tmp_path / "sub" / "m.csv")
    assert m.entries[0].path == tmp_path / "sub" / "r.txt"
    assert m.entries[0].split == TRAIN


def test_serialize_300_samples_is_1200_bytes():
    assert len(serialize_record(EcgRecord(0, np.ones(300)))) == 300 * 32 // 8


def test_serialize_zero_record():
    assert serialize_record(EcgRecord(0, np.zeros(300))) == bytes(1200)


def test_serialize_layout_is_little_endian_float32():
    data = serialize_record(EcgRecord(0, [1.0, -2.5]))
    assert data == struct.pack("<ff", 1.0, -2.5)


finite_f32 = st.floats(width=32, allow_nan=False, allow_infinity=False)


@given(st.lists(finite_f32, min_size=0, max_size=400))
def test_serialize_round_trip_bit_exact(values):
    r = EcgRecord(None, np.array(values, dtype=np.float32))
    back = deserialize_record(serialize_record(r))
    assert back.samples.tobytes() == r.samples.tobytes()


def test_deserialize_rejects_partial_sample():
    with pytest.raises(DataError, match="WRONG_LENGTH"):
        deserialize_record(bytes(7))


def test_deserialize_rejects_nan():
    with pytest.raises(DataError, match="NON_FINITE"):
        deserialize_record(struct.pack("<ff", 1.0, float("nan")))


def test_record_validation():
    with pytest.raises(DataError, match="BAD_SUBJECT_ID"):
        EcgRecord(-1, [0.0])
    with pytest.raises(DataError, match="NON_FINITE"):
        EcgRecord(0, [0.0, float("inf")])


def test_dataset_requires_training():
    with pytest.raises(DataError, match="TOO_FEW_TRAINING"):
        Dataset((EcgRecord(0, [1.0]),), (TRAIN,))


def test_synthetic_dataset_shape():
    ds = synthetic_dataset(3, 2, 1, n=50, seed=1)
    assert len(ds.train) == 6 and len(ds.test) == 3
    assert all(r.n == 50 for r in ds.records)


def test_manifest_rejects_duplicates_directly():
    e = ManifestEntry("a", 0, TRAIN)
    with pytest.raises(DataError):
        Manifest((e, e))
