import math
import random

import numpy as np
import pytest

from cohortsplit.errors import EmptyInput
from cohortsplit.features import (
    BadFeatureRow,
    DimensionMismatch,
    NonFiniteFeature,
    build_features,
    feature_header,
    read_features,
    write_features,
)


def test_header_layout():
    assert feature_header(3) == "scan_id,f0,f1,f2"


def test_build_and_lookup():
    fm = build_features({"b": [1.0, 2.0], "a": [3.0, 4.0]})
    assert fm.scan_ids == ("a", "b")  # sorted
    assert fm.dim == 2
    assert len(fm) == 2
    assert "a" in fm and "z" not in fm
    np.testing.assert_array_equal(fm.vector("a"), [3.0, 4.0])
    sub = fm.submatrix(["b", "a"])
    np.testing.assert_array_equal(sub, [[1.0, 2.0], [3.0, 4.0]])


def test_values_are_read_only():
    fm = build_features({"a": [1.0]})
    with pytest.raises(ValueError):
        fm.values[0, 0] = 9.0


def test_build_rejects_bad_input():
    with pytest.raises(EmptyInput):
        build_features({})
    with pytest.raises(DimensionMismatch) as err:
        build_features({"a": [1.0, 2.0], "b": [1.0]})
    assert err.value.scan_id == "b"
    with pytest.raises(NonFiniteFeature):
        build_features({"a": [1.0, math.nan]})
    with pytest.raises(NonFiniteFeature):
        build_features({"a": [math.inf]})


def test_round_trip_is_lossless():
    # repr() of a float is the shortest string that round-trips, so writing
    # and reading back must reproduce every bit pattern
    rng = random.Random(7)
    for _ in range(20):
        n, d = rng.randint(1, 12), rng.randint(1, 6)
        raw = {
            f"s{i:02d}": [rng.uniform(-1e6, 1e6) for _ in range(d)]
            for i in range(n)
        }
        fm = build_features(raw)
        text = write_features(fm)
        back = read_features(text)
        assert back == fm
        assert write_features(back) == text


def test_read_rejects_malformed_text():
    with pytest.raises(BadFeatureRow):
        read_features("scan_id,f0\na,1.0\na,2.0\n")  # duplicate id
    with pytest.raises(BadFeatureRow) as err:
        read_features("scan_id,f0,f1\na,1.0\n")  # ragged row
    assert err.value.line == 2
    with pytest.raises(BadFeatureRow):
        read_features("scan_id,f0\na,abc\n")
    with pytest.raises(BadFeatureRow):
        read_features("id,f0\na,1.0\n")  # wrong header
    with pytest.raises(EmptyInput):
        read_features("")


def test_submatrix_requires_known_ids():
    fm = build_features({"a": [1.0], "b": [2.0]})
    with pytest.raises(KeyError):
        fm.submatrix(["a", "missing"])
