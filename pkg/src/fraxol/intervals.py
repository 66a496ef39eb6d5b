"""Closed real intervals with outward rounding.

Endpoints are floats.  Sums and products use error-free transformations, so an
endpoint is nudged by one ulp only when the floating-point result is inexact.
This keeps exact data exact (``0 * x`` stays ``0``) while every enclosure stays
sound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SPLITTER = 134217729.0  # 2**27 + 1, Veltkamp split for binary64
_TINY = 2.0**-960  # below this the product error term may underflow
_HUGE = 2.0**995  # above this the Veltkamp split overflows


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    if not math.isfinite(p):
        return p, 0.0
    if (abs(p) < _TINY and a != 0.0 and b != 0.0) or max(abs(a), abs(b)) > _HUGE:
        # error-free transform unreliable near underflow or overflow; report inexact both ways
        return p, math.nan
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _down(value: float, err: float) -> float:
    return math.nextafter(value, -math.inf) if (err < 0 or err != err) else value


def _up(value: float, err: float) -> float:
    return math.nextafter(value, math.inf) if (err > 0 or err != err) else value


def add_down(a: float, b: float) -> float:
    return _down(*_two_sum(a, b))


def add_up(a: float, b: float) -> float:
    return _up(*_two_sum(a, b))


def mul_down(a: float, b: float) -> float:
    return _down(*_two_prod(a, b))


def mul_up(a: float, b: float) -> float:
    return _up(*_two_prod(a, b))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value: float) -> Interval:
        return cls(float(value), float(value))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def __add__(self, other: Interval) -> Interval:
        other = _coerce(other)
        return Interval(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: Interval) -> Interval:
        return self + (-_coerce(other))

    def __rsub__(self, other: Interval) -> Interval:
        return _coerce(other) + (-self)

    def __mul__(self, other: Interval) -> Interval:
        other = _coerce(other)
        pairs = [(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(mul_down(a, b) for a, b in pairs), max(mul_up(a, b) for a, b in pairs))

    __rmul__ = __mul__

    def exp(self) -> Interval:
        lo = math.exp(self.lo)
        hi = math.exp(self.hi)
        # libm exp is faithful, not correctly rounded
        if self.lo != 0.0:
            lo = math.nextafter(lo, -math.inf)
        if self.hi != 0.0:
            hi = math.nextafter(hi, math.inf)
        return Interval(max(lo, 0.0), hi)

    def __pow__(self, k: int) -> Interval:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        if k == 0:
            return Interval(1.0, 1.0)
        if self.lo >= 0.0:
            return _pow_nonneg(self.lo, self.hi, k)
        if self.hi <= 0.0:
            mag = _pow_nonneg(-self.hi, -self.lo, k)
            return mag if k % 2 == 0 else -mag
        # straddles zero
        if k % 2 == 0:
            return Interval(0.0, _pow_nonneg(0.0, max(-self.lo, self.hi), k).hi)
        return Interval(-_pow_nonneg(0.0, -self.lo, k).hi, _pow_nonneg(0.0, self.hi, k).hi)

    def __repr__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def _pow_nonneg(lo: float, hi: float, k: int) -> Interval:
    plo, phi = 1.0, 1.0
    for _ in range(k):
        plo = mul_down(plo, lo)
        phi = mul_up(phi, hi)
    return Interval(plo, phi)


def _coerce(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.point(value)


def hull(*intervals: Interval) -> Interval:
    return Interval(min(i.lo for i in intervals), max(i.hi for i in intervals))
