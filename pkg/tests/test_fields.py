import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lichlab.fields import ExpressionError, RadialField


def test_constant_and_expression():
    assert RadialField.coerce(2.5)(3.0) == 2.5
    f = RadialField.coerce("exp(-r**2) + 1")
    assert f(0.0) == pytest.approx(2.0)
    assert f(np.array([1.0]))[0] == pytest.approx(math.exp(-1) + 1)


def test_numeric_string_is_constant():
    assert RadialField.coerce("3").is_constant


@pytest.mark.parametrize("bad", ["__import__('os')", "r.real", "lambda r: r", "foo(r)",
                                 "[r]", "r if r else 1", "open('x')"])
def test_rejects_unsafe_or_unknown(bad):
    with pytest.raises(ExpressionError):
        RadialField.from_expression(bad)


def test_csv_field(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("r,a\n0,1\n1,3\n")
    f = RadialField.from_csv(p)
    assert f(0.5) == pytest.approx(2.0)


def test_tail_limit():
    assert RadialField.coerce("1 + exp(-r)").tail_limit() == pytest.approx(1.0)
    assert RadialField.coerce(4.0).tail_limit() == 4.0


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(-3, 3), st.floats(0.1, 5))
def test_expression_matches_numpy(r, k, s):
    f = RadialField.from_expression(f"{k!r}*tanh(r/{s!r}) + sqrt(r) * cos(pi*r)")
    assert f(r) == pytest.approx(k * math.tanh(r / s) + math.sqrt(r) * math.cos(math.pi * r),
                                 rel=1e-12, abs=1e-12)
