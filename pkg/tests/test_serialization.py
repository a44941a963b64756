import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manytoone import StandardChannel, check_t8, recommend, sum_rate_mi_k
from manytoone import serialization as ser
from manytoone.optimality import Certificate, GapReport
from manytoone.rates import RateReport


def test_round_sig():
    assert ser.round_sig(math.pi) == 3.14159265359
    assert ser.round_sig(1.23456789012345e-20) == 1.23456789012e-20


def test_nonfinite():
    text = ser.dumps({"a": math.inf, "b": -math.inf, "c": [math.nan]})
    back = ser.loads(text)
    assert back["a"] == math.inf and back["b"] == -math.inf and math.isnan(back["c"][0])


def test_numpy_scalars():
    assert ser.loads(ser.dumps({"x": np.float64(0.1), "n": np.int64(3)})) == {"x": 0.1, "n": 3}


def test_rejects_unknown_types():
    with pytest.raises(TypeError):
        ser.dumps({"x": object()})


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_idempotent(x):
    once = ser.loads(ser.dumps([x]))[0]
    assert ser.loads(ser.dumps([once]))[0] == once
    if x != 0:
        assert abs(once - x) <= 1e-11 * abs(x)


def test_objects_round_trip():
    ch = StandardChannel(4, [2.0, 1.1, 0.3], [1.0, 2.0, 3.0, 0.5])
    report = sum_rate_mi_k(ch, {2, 3}, (2, 3))
    assert ser.dumps(RateReport.from_dict(ser.loads(ser.dumps(report)))) == ser.dumps(report)
    cert, gap = check_t8(StandardChannel(3, [0.9, 0.4], [1, 1, 1]))
    assert ser.dumps(Certificate.from_dict(ser.loads(ser.dumps(cert)))) == ser.dumps(cert)
    assert ser.dumps(GapReport.from_dict(ser.loads(ser.dumps(gap)))) == ser.dumps(gap)
    rec = ser.loads(ser.dumps(recommend(ch, "IC")))
    assert rec["best"]["strategy"]["mode"] == "IC"
