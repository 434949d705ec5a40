import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from volgron.extreal import INF, ExtReal

finite = st.floats(min_value=0.0, max_value=1e12, allow_nan=False)


def test_never_nan_or_negative():
    with pytest.raises(ValueError):
        ExtReal(float("nan"))
    with pytest.raises(ValueError):
        ExtReal(-1.0)


def test_saturating_addition():
    assert INF + 3.0 == INF
    assert 3.0 + INF == INF
    assert ExtReal(1.0) + ExtReal(2.0) == 3.0


def test_zero_times_infinity_is_zero():
    assert INF * 0.0 == ExtReal(0.0)
    assert ExtReal(0.0) * INF == ExtReal(0.0)
    assert INF * 2.0 == INF


def test_roots_of_infinity():
    assert INF.root(2.0) == INF
    assert INF ** (1.0 / 3.0) == INF
    assert ExtReal(8.0).root(3.0) == pytest.approx(2.0)


def test_division_conventions():
    assert ExtReal(1.0) / ExtReal(0.0) == INF
    assert ExtReal(1.0) / INF == ExtReal(0.0)
    with pytest.raises(ZeroDivisionError):
        ExtReal(0.0) / ExtReal(0.0)
    with pytest.raises(ZeroDivisionError):
        INF / INF


@given(finite, finite)
def test_addition_commutes_and_orders(a, b):
    x, y = ExtReal(a), ExtReal(b)
    assert x + y == y + x
    assert x + y >= x
    assert float(x * y) == pytest.approx(a * b, rel=1e-12, abs=1e-300)


@given(finite)
def test_infinity_dominates(a):
    x = ExtReal(a)
    assert x <= INF
    assert x + INF == INF
    if a > 0:
        assert x * INF == INF
