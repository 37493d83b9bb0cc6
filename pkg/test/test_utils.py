# -*- coding: utf-8 -*-

# Copyright 2025 The sinailab Authors
#  MIT License (https://opensource.org/licenses/MIT)

import os

import numpy as np
import pytest

from sinailab.utils import (
    RandomStream,
    as_stream,
    content_hash,
    find_files,
    read_csv,
    read_hdf5,
    read_json,
    register_run,
    sha256_file,
    stream_id,
    write_csv,
    write_hdf5,
    write_json,
)
from sinailab.utils.types import (
    float_or_none,
    float_range,
    int_or_none,
    sci_int,
    str2bool,
)


@pytest.mark.parametrize(
    "value, expected",
    [("1:2:0.5", [1.0, 1.5, 2.0]), ("1:4:0.5", [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]),
     ("[2, 4,8]", [2.0, 4.0, 8.0]), ("3", [3.0]), ("0.5,1.5", [0.5, 1.5])],
)
def test_float_range(value, expected):
    assert float_range(value) == expected


def test_float_range_rejects_bad_ranges():
    with pytest.raises(ValueError):
        float_range("1:2")
    with pytest.raises(ValueError):
        float_range("2:1:0.5")
    with pytest.raises(ValueError):
        float_range("1:2:0")


def test_sci_int():
    assert sci_int("1e6") == 1000000
    assert sci_int("250") == 250
    with pytest.raises(ValueError):
        sci_int("1.5")


def test_none_parsers():
    assert int_or_none("none") is None
    assert int_or_none("12") == 12
    assert float_or_none("null") is None
    assert float_or_none("0.25") == 0.25


def test_str2bool():
    assert str2bool("Yes") is True
    assert str2bool("0") is False
    with pytest.raises(ValueError):
        str2bool("maybe")


def test_stream_is_deterministic():
    a = RandomStream(7, "env").generator(3).random(5)
    b = RandomStream(7, "env").generator(3).random(5)
    np.testing.assert_array_equal(a, b)


def test_streams_differ_by_seed_name_and_block():
    base = RandomStream(7, "env").generator(0).random(4)
    assert not np.array_equal(base, RandomStream(8, "env").generator(0).random(4))
    assert not np.array_equal(base, RandomStream(7, "walk").generator(0).random(4))
    assert not np.array_equal(base, RandomStream(7, "env").generator(1).random(4))
    assert not np.array_equal(base, RandomStream(7, "env").substream(0).generator(0).random(4))


def test_stream_id_and_as_stream():
    assert stream_id("env") == stream_id("env")
    assert stream_id(5) == 5
    s = RandomStream(3, "x")
    assert as_stream(s) is s
    assert as_stream(4, "y").to_dict() == {"seed": 4, "stream": stream_id("y")}
    assert as_stream(None, "y").seed == 0
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        s.generator(-1)


def test_json_and_hash_are_canonical(tmp_path):
    path = str(tmp_path / "a.json")
    write_json({"b": np.float64(1.5), "a": np.arange(3)}, path)
    assert read_json(path) == {"a": [0, 1, 2], "b": 1.5}
    assert content_hash({"a": 1, "b": 2}) == content_hash({"b": 2, "a": 1})
    assert content_hash({"a": 1}) != content_hash({"a": 2})
    first = sha256_file(path)
    write_json({"a": np.arange(3), "b": 1.5}, path)
    assert sha256_file(path) == first
    # no temporary files are left behind
    assert os.listdir(tmp_path) == ["a.json"]


def test_csv_round_trip(tmp_path):
    path = str(tmp_path / "t.csv")
    write_csv([{"x": 1, "y": "a"}, {"x": 2, "y": "b"}], path)
    rows, fieldnames = read_csv(path, dict_reader=True)
    assert fieldnames == ["x", "y"]
    assert [r["y"] for r in rows] == ["a", "b"]
    with pytest.raises(ValueError):
        write_csv([], path)


def test_hdf5_round_trip(tmp_path):
    path = str(tmp_path / "p.h5")
    write_hdf5(path, "walk/0/positions", np.arange(5))
    np.testing.assert_array_equal(read_hdf5(path, "walk/0/positions"), np.arange(5))


def test_register_run_and_find_files(tmp_path, monkeypatch):
    monkeypatch.setenv("SINAI_LAB_DIR", str(tmp_path / "lab"))
    register_run(str(tmp_path / "run1"), "env", "abc", 0)
    register_run(str(tmp_path / "run2"), "wells", "def", 3)
    rows, fieldnames = read_csv(str(tmp_path / "lab" / "index.csv"), dict_reader=True)
    assert fieldnames == ["outdir", "verb", "input_hash", "status"]
    assert [r["verb"] for r in rows] == ["env", "wells"]
    assert [r["status"] for r in rows] == ["0", "3"]

    write_json({}, str(tmp_path / "run1" / "results.json"))
    write_json({}, str(tmp_path / "run2" / "sub" / "results.json"))
    found = find_files(str(tmp_path), "results.json", include_root_dir=False)
    assert found == ["run1/results.json", "run2/sub/results.json"]
