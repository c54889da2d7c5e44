"""
Double-double arithmetic on floats and numpy arrays

A value is the unevaluated sum hi + lo of two doubles with |lo| <= ulp(hi)/2,
giving about 32 significant decimal digits. The same code runs on Python
floats and, elementwise, on numpy arrays.
"""
from typing import Union
import logging

import numpy as np

from .errors import ValidationFailure

logger = logging.getLogger(__name__)

Number = Union[float, np.ndarray]

_SPLITTER = 134217729.0  # 2^27 + 1, exact in double


def split(a: Number):
    """Dekker split: a -> (ahi, alo) with each half holding at most 26 bits"""
    c = _SPLITTER * a
    abig = c - a
    ahi = c - abig
    return ahi, a - ahi


def two_sum(a: Number, b: Number):
    """s + err == a + b exactly"""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a: Number, b: Number):
    """two_sum for |a| >= |b|"""
    s = a + b
    return s, b - (s - a)


def two_prod(a: Number, b: Number):
    """p + err == a * b exactly"""
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


class DoubleDouble:
    """hi + lo with hi the value rounded to double"""
    __slots__ = ("hi", "lo")

    def __init__(self, hi: Number, lo: Number = 0.0):
        self.hi = hi
        self.lo = lo

    @classmethod
    def coerce(cls, value) -> "DoubleDouble":
        if isinstance(value, DoubleDouble):
            return value
        if isinstance(value, np.ndarray):
            return cls(value.astype(float), np.zeros_like(value, dtype=float))
        return cls(float(value), 0.0)

    def __add__(self, other) -> "DoubleDouble":
        other = DoubleDouble.coerce(other)
        s, e = two_sum(self.hi, other.hi)
        t, f = two_sum(self.lo, other.lo)
        e = e + t
        s, e = quick_two_sum(s, e)
        e = e + f
        return DoubleDouble(*quick_two_sum(s, e))

    __radd__ = __add__

    def __neg__(self) -> "DoubleDouble":
        return DoubleDouble(-self.hi, -self.lo)

    def __sub__(self, other) -> "DoubleDouble":
        return self + (-DoubleDouble.coerce(other))

    def __rsub__(self, other) -> "DoubleDouble":
        return DoubleDouble.coerce(other) + (-self)

    def __mul__(self, other) -> "DoubleDouble":
        other = DoubleDouble.coerce(other)
        p, e = two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        return DoubleDouble(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DoubleDouble":
        other = DoubleDouble.coerce(other)
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        q1, q2 = quick_two_sum(q1, q2)
        return DoubleDouble(q1, q2) + q3

    def __rtruediv__(self, other) -> "DoubleDouble":
        return DoubleDouble.coerce(other) / self

    def __abs__(self) -> "DoubleDouble":
        negative = self.hi < 0
        if isinstance(negative, np.ndarray):
            return DoubleDouble(np.where(negative, -self.hi, self.hi), np.where(negative, -self.lo, self.lo))
        return -self if negative else self

    def __lt__(self, other) -> bool:
        other = DoubleDouble.coerce(other)
        return self.hi < other.hi or (self.hi == other.hi and self.lo < other.lo)

    def __le__(self, other) -> bool:
        other = DoubleDouble.coerce(other)
        return self.hi < other.hi or (self.hi == other.hi and self.lo <= other.lo)

    def sqrt(self) -> "DoubleDouble":
        """Square root by one Newton correction of the double estimate"""
        root = np.sqrt(self.hi)
        if isinstance(root, np.ndarray):
            safe = np.where(root > 0, root, 1.0)
            square = DoubleDouble(*two_prod(safe, safe))
            correction = (self - square).hi / (2.0 * safe)
            correction = np.where(root > 0, correction, 0.0)
            return DoubleDouble(*quick_two_sum(root, correction))
        root = float(root)
        if root == 0.0:
            return DoubleDouble(0.0, 0.0)
        square = DoubleDouble(*two_prod(root, root))
        return DoubleDouble(*quick_two_sum(root, (self - square).hi / (2.0 * root)))

    def scale(self, factor: Number) -> "DoubleDouble":
        """Multiply by an exact power of two"""
        return DoubleDouble(self.hi * factor, self.lo * factor)

    def to_float(self) -> Number:
        return self.hi + self.lo

    def __getitem__(self, index) -> "DoubleDouble":
        return DoubleDouble(self.hi[index], self.lo[index])

    def __len__(self) -> int:
        return len(self.hi)

    def __repr__(self):
        return f"DoubleDouble(hi={self.hi!r}, lo={self.lo!r})"


def dd_sum(values: DoubleDouble) -> DoubleDouble:
    """Sum of the entries of an array-valued DoubleDouble"""
    total = DoubleDouble(0.0, 0.0)
    for hi, lo in zip(np.asarray(values.hi, dtype=float), np.asarray(values.lo, dtype=float)):
        total = total + DoubleDouble(float(hi), float(lo))
    return total


def from_fraction(numerator: float, denominator: float) -> DoubleDouble:
    return DoubleDouble.coerce(numerator) / denominator


def self_test():
    """
    Check that the platform's float arithmetic gives exact error-free transforms

    Raises:
        ValidationFailure when a transform loses its exactness
    """
    a = 1.0 + 2.0 ** -30
    p, err = two_prod(a, a)
    if p != 1.0 + 2.0 ** -29 or err != 2.0 ** -60:
        raise ValidationFailure("double-double product is not exact on this platform")
    s, err = two_sum(1.0, 2.0 ** -80)
    if s != 1.0 or err != 2.0 ** -80:
        raise ValidationFailure("double-double sum is not exact on this platform")
    third = DoubleDouble(1.0) / 3.0
    back = third * 3.0 - 1.0
    if abs(back.to_float()) > 1e-31:
        raise ValidationFailure("double-double division lost precision")
    logger.info("double-double self test passed")
