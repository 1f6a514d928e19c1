"""Closed-interval arithmetic for propagating the perturbation bounds.

Endpoints are plain floats; no outward rounding is applied.  Infinite
endpoints are allowed (an unbounded reciprocal, for instance), and the
product ``0 * inf`` is taken to be 0, as usual for interval products.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Interval:
    """The closed interval ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"invalid interval: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "Interval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        if isinstance(x, Interval):
            return self.lo - tol <= x.lo and x.hi <= self.hi + tol
        return self.lo - tol <= x <= self.hi + tol

    __contains__ = contains

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def excludes_zero(self) -> bool:
        """True when both endpoints are non-zero and share a sign."""
        return self.lo > 0.0 or self.hi < 0.0

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        other = _coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other):
        other = _coerce(other)
        lo, hi = mul_bounds(self.lo, self.hi, other.lo, other.hi)
        return Interval(float(lo), float(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _coerce(other).recip()

    def __rtruediv__(self, other):
        return _coerce(other) * self.recip()

    def recip(self) -> "Interval":
        if self.contains_zero():
            raise DomainError(f"reciprocal of an interval containing 0: {self}")
        return Interval(1.0 / self.hi, 1.0 / self.lo)

    def scale(self, c: float) -> "Interval":
        return self * Interval.point(c)

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def abs_lower(self) -> float:
        """Smallest ``|x|`` over the interval."""
        return self.abs().lo

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


def _coerce(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def add(a, b) -> Interval:
    return _coerce(a) + _coerce(b)


def sub(a, b) -> Interval:
    return _coerce(a) - _coerce(b)


def mul(a, b) -> Interval:
    return _coerce(a) * _coerce(b)


def div(a, b) -> Interval:
    return _coerce(a) / _coerce(b)


def recip(a) -> Interval:
    return _coerce(a).recip()


def scale(a, c: float) -> Interval:
    return _coerce(a).scale(c)


def abs_lower(a) -> float:
    return _coerce(a).abs_lower()


def _safe_prod(x, y):
    with np.errstate(invalid="ignore"):
        out = np.multiply(x, y)
    return np.where((np.asarray(x) == 0) | (np.asarray(y) == 0), 0.0, out)


def mul_bounds(alo, ahi, blo, bhi):
    """Elementwise interval product on endpoint arrays.

    Returns the min and max of the four endpoint products.
    """
    prods = np.stack(np.broadcast_arrays(
        _safe_prod(alo, blo), _safe_prod(alo, bhi),
        _safe_prod(ahi, blo), _safe_prod(ahi, bhi)))
    return prods.min(axis=0), prods.max(axis=0)


def sum_of_products(a: Sequence[Interval], b: Sequence[Interval]) -> Interval:
    """Enclosure of ``sum_k a_k * b_k``, bounding each term by its endpoint products."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if not a:
        return Interval(0.0, 0.0)
    lo, hi = mul_bounds(np.array([x.lo for x in a]), np.array([x.hi for x in a]),
                        np.array([y.lo for y in b]), np.array([y.hi for y in b]))
    return Interval(math.fsum(lo), math.fsum(hi))


@dataclass
class IntervalMatrix:
    """A matrix of intervals stored as two endpoint arrays."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.lo = np.array(self.lo, dtype=np.float64)
        self.hi = np.array(self.hi, dtype=np.float64)
        if self.lo.shape != self.hi.shape:
            raise ValueError("endpoint arrays differ in shape")
        if np.any(np.isnan(self.lo)) or np.any(np.isnan(self.hi)):
            raise ValueError("interval endpoints must not be NaN")
        if np.any(self.lo > self.hi):
            raise ValueError("some intervals have lo > hi")

    @property
    def shape(self):
        return self.lo.shape

    def __getitem__(self, key) -> Interval:
        return Interval(self.lo[key], self.hi[key])

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    def contains(self, values, tol: float = 0.0) -> np.ndarray:
        values = np.asarray(values)
        return (self.lo - tol <= values) & (values <= self.hi + tol)

    def excludes_zero(self) -> np.ndarray:
        return (self.lo > 0) | (self.hi < 0)

    def unbounded(self) -> np.ndarray:
        return ~(np.isfinite(self.lo) & np.isfinite(self.hi))

    def to_list(self) -> list:
        return [[Interval(l, h) for l, h in zip(rl, rh)] for rl, rh in zip(self.lo, self.hi)]
