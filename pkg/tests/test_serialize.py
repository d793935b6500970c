import json
import math

import numpy as np

from dirac_levinson.serialize import config_hash, dumps, fmt_float, rows_to_csv, stamp


def test_seventeen_digits():
    assert fmt_float(0.1) == "0.10000000000000001"
    assert fmt_float(1.0) == "1.0"
    assert float(fmt_float(math.pi)) == math.pi


def test_stable_key_order():
    a = dumps({"b": 1, "a": [np.float64(0.5), np.int64(2)], "c": {"z": True, "y": None}})
    b = dumps({"c": {"y": None, "z": True}, "a": [0.5, 2], "b": 1})
    assert a == b
    assert json.loads(a) == {"a": [0.5, 2], "b": 1, "c": {"y": None, "z": True}}


def test_hash_and_stamp():
    h = config_hash({"x": 1.0, "y": [1, 2]})
    assert h == config_hash({"y": [1, 2], "x": 1.0})
    assert h != config_hash({"x": 1.0000000001, "y": [1, 2]})
    doc = stamp({"pass": True}, {"x": 1.0})
    assert doc["config_hash"] == config_hash({"x": 1.0}) and "version" in doc


def test_csv_floats():
    text = rows_to_csv(["a", "b"], [(0.1, "x")])
    assert text == "a,b\n0.10000000000000001,x\n"
