import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from covbounds.errors import DomainError
from covbounds.interval import (Interval, IntervalMatrix, abs_lower, add, div, mul, mul_bounds,
                                recip, scale, sub, sum_of_products)

finite = st.floats(-1e3, 1e3)


@st.composite
def intervals(draw):
    a, b = draw(finite), draw(finite)
    return Interval(min(a, b), max(a, b))


@st.composite
def interval_and_point(draw):
    iv = draw(intervals())
    t = draw(st.floats(0, 1))
    return iv, min(max(iv.lo + t * (iv.hi - iv.lo), iv.lo), iv.hi)


def test_add():
    assert Interval(1, 2) + Interval(3, 4) == Interval(4, 6)


def test_mul_mixed_sign():
    assert Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8)


def test_recip():
    r = recip(Interval(1.5, 2.5))
    assert r.lo == pytest.approx(0.4) and r.hi == pytest.approx(2 / 3)


def test_recip_through_zero():
    with pytest.raises(DomainError):
        Interval(-1, 1).recip()


def test_div_by_zero_interval():
    with pytest.raises(DomainError):
        div(Interval(1, 2), Interval(0, 1))


def test_sub_and_neg():
    assert sub(Interval(1, 2), Interval(3, 5)) == Interval(-4, -1)
    assert -Interval(1, 2) == Interval(-2, -1)


def test_scale_negative():
    assert scale(Interval(1, 2), -2) == Interval(-4, -2)


def test_abs_lower():
    assert abs_lower(Interval(-1, 2)) == 0
    assert abs_lower(Interval(-3, -1)) == 1


def test_invalid_construction():
    with pytest.raises(ValueError):
        Interval(2, 1)
    with pytest.raises(ValueError):
        Interval(math.nan, 1)


def test_unbounded_endpoints_allowed():
    iv = Interval(0.5, math.inf)
    assert not iv.is_bounded and iv.contains(1e300)


def test_zero_times_infinity():
    assert mul_bounds(0.0, 0.0, 1.0, math.inf) == (0.0, 0.0)


def test_sum_of_products_unit_boxes():
    u = Interval(0, 1)
    assert sum_of_products([u, u], [u, u]) == Interval(0, 2)


def test_sum_of_products_symmetric():
    s = Interval(-1, 1)
    assert sum_of_products([s], [s]) == Interval(-1, 1)


def test_sum_of_products_length_mismatch():
    with pytest.raises(ValueError):
        sum_of_products([Interval(0, 1)], [])


def test_sum_of_products_degenerate(rng):
    x, y = rng.standard_normal(7), rng.standard_normal(7)
    r = sum_of_products([Interval.point(v) for v in x], [Interval.point(v) for v in y])
    assert r.lo == pytest.approx(x @ y, rel=1e-14) and r.hi == pytest.approx(x @ y, rel=1e-14)


def test_intersect_and_hull():
    a, b = Interval(0, 2), Interval(1, 3)
    assert a.intersect(b) == Interval(1, 2)
    assert a.hull(b) == Interval(0, 3)
    assert Interval(0, 1).intersect(Interval(2, 3)) is None


def test_interval_matrix():
    m = IntervalMatrix(np.array([[0.0, -1.0]]), np.array([[1.0, 2.0]]))
    assert m[0, 1] == Interval(-1, 2)
    assert m.contains(np.array([[0.5, 0.0]])).all()
    assert not m.excludes_zero().any()
    with pytest.raises(ValueError):
        IntervalMatrix(np.array([1.0]), np.array([0.0]))


@given(interval_and_point(), interval_and_point())
def test_property_inclusion(ax, by):
    (a, x), (b, y) = ax, by
    tol = 1e-9 * (1 + abs(x) + abs(y)) ** 2
    assert add(a, b).contains(x + y, tol)
    assert sub(a, b).contains(x - y, tol)
    assert mul(a, b).contains(x * y, tol)
    if not b.contains_zero:
        assert div(a, b).contains(x / y, tol * (1 + 1 / min(abs(b.lo), abs(b.hi))) ** 2)


@given(intervals(), intervals(), st.floats(0, 5), st.floats(0, 5))
def test_property_widening_never_narrows(a, b, w1, w2):
    wide = Interval(a.lo - w1, a.hi + w2)
    for op in (add, sub, mul):
        inner, outer = op(a, b), op(wide, b)
        assert outer.lo <= inner.lo + 1e-9 * (1 + abs(inner.lo))
        assert outer.hi >= inner.hi - 1e-9 * (1 + abs(inner.hi))


@given(finite, finite)
def test_property_degenerate_is_exact(x, y):
    assert mul(Interval.point(x), Interval.point(y)) == Interval(x * y, x * y)
    assert add(Interval.point(x), Interval.point(y)) == Interval(x + y, x + y)
