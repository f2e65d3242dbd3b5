import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kvn import serialize as ser
from kvn.bounds import Interval, agree, as_interval
from kvn.errors import InvalidInput

FLOATS = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(FLOATS, FLOATS), min_size=1, max_size=6))
def test_complex_roundtrip_is_exact(pairs):
    z = np.array([complex(a, b) for a, b in pairs])
    text = ser.dumps({"z": ser.encode_complex(z)})
    back = ser.decode_complex(json.loads(text)["z"], 1)
    assert np.array_equal(back, z)


def test_decoding_accepts_plain_numbers():
    M = ser.decode_matrix([[1, [0, 2]], [3.5, [1, -1]]])
    assert np.array_equal(M, [[1, 2j], [3.5, 1 - 1j]])
    assert ser.decode_matrix([[], []]).shape == (2, 0)


@pytest.mark.parametrize("bad", [[[1, 2], [3]], [[True]], [["a"]], 5])
def test_decoding_rejects(bad):
    with pytest.raises(InvalidInput):
        ser.decode_matrix(bad)


def test_canonical_output():
    a = ser.dumps({"b": 1.0, "a": [np.float64(0.1), np.int64(2)], "c": np.array([1 + 1j])})
    b = ser.dumps({"c": np.array([1 + 1j]), "a": [0.1, 2], "b": 1.0})
    assert a == b
    assert list(json.loads(a)) == ["a", "b", "c"]
    assert "0.10000000000000001" in a
    assert '"x": "inf"' in ser.dumps({"x": float("inf")})


def test_interval_serialization():
    out = json.loads(ser.dumps({"M": Interval(1.0, 2.0, "grid")}))
    assert out["M"] == {"lower": 1.0, "upper": 2.0, "method": "grid"}


def test_interval_logic():
    I = Interval(1.0, 2.0)
    assert I.contains(1.5) and not I.contains(2.5)
    assert I.overlaps(Interval(1.9, 3.0)) and not I.overlaps(3.0)
    assert agree(I, 1.2) and agree(1.0, 1.0 + 1e-9) and not agree(1.0, 1.1)
    assert as_interval(3.0).width == 0
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)
