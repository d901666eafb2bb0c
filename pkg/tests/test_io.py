import json
import math

import numpy as np
from hypothesis import given, strategies as st

from mellin_hilbert.io import format_number, jsonable, read_csv, write_csv, write_json, write_text_atomic


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_seventeen_digits_round_trip(x):
    assert float(format_number(x)) == x


def test_format_passthrough():
    assert format_number(3) == "3"
    assert format_number(np.int64(-2)) == "-2"
    assert format_number(True) == "1"
    assert format_number("abc") == "abc"
    assert format_number(0.1) == "0.10000000000000001"


def test_csv_round_trip(tmp_path):
    rows = [(0.1, 1 / 3, -2e-300), (1e300, math.pi, 0.0)]
    p = write_csv(tmp_path / "sub" / "t.csv", ["a", "b", "c"], rows)
    cols = read_csv(p)
    assert list(cols) == ["a", "b", "c"]
    assert np.array_equal(cols["b"], [1 / 3, math.pi])
    assert not list(p.parent.glob(".*.tmp"))


def test_atomic_write_replaces_whole_file(tmp_path):
    p = tmp_path / "f.txt"
    write_text_atomic(p, "old contents that are long")
    write_text_atomic(p, "new")
    assert p.read_text() == "new"
    assert [q.name for q in tmp_path.iterdir()] == ["f.txt"]


def test_jsonable_and_write_json(tmp_path):
    obj = {"z": 1 + 2j, "arr": np.array([1.0, np.nan]), "n": np.int32(4), "b": np.bool_(True)}
    assert jsonable(obj) == {"z": [1.0, 2.0], "arr": [1.0, None], "n": 4, "b": True}
    p = write_json(tmp_path / "r.json", obj)
    assert json.loads(p.read_text())["z"] == [1.0, 2.0]
