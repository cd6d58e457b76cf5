"""Gaussian rationals and scalar helpers shared by the float and exact modes."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union


class GaussianRational:
    """Complex number with rational real and imaginary parts.

    Mixing with ``int`` or ``Fraction`` stays exact. Mixing with ``float`` or
    ``complex`` falls back to Python complex.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, Rational):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other if isinstance(other, (float, complex)) else NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other if isinstance(other, (float, complex)) else NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self) if isinstance(other, (float, complex)) else NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other if isinstance(other, (float, complex)) else NotImplemented
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other if isinstance(other, (float, complex)) else NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self) if isinstance(other, (float, complex)) else NotImplemented
        return o * self.reciprocal()

    def reciprocal(self) -> "GaussianRational":
        n = self.abs2()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __pow__(self, k):
        if not isinstance(k, int):
            return complex(self) ** k
        if k < 0:
            return self.reciprocal() ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        # exact when the value is real, float otherwise
        if self.im == 0:
            return abs(self.re)
        if self.re == 0:
            return abs(self.im)
        return math.hypot(self.re, self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


Scalar = Union[int, float, complex, Fraction, GaussianRational]

GI = GaussianRational(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, Rational))


def to_exact(x) -> GaussianRational:
    """Convert an int, Fraction, or Gaussian rational to GaussianRational.

    Floats are refused: silently rationalizing binary floats defeats exact mode.
    """
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, Rational):
        return GaussianRational(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def re_im(x) -> tuple:
    if isinstance(x, GaussianRational):
        return x.re, x.im
    if isinstance(x, complex):
        return x.real, x.imag
    return x, 0


def parse_part(v, exact: bool):
    """Parse one real part from JSON (number or 'p/q' string)."""
    if exact:
        if isinstance(v, float):
            # decimal repr of a JSON float is what the user wrote
            return Fraction(repr(v))
        return Fraction(v)
    if isinstance(v, str):
        return float(Fraction(v))
    return float(v)


def parse_scalar(obj, exact: bool = False):
    """Parse {"re":..,"im":..}, a bare number, or a [re, im] pair."""
    if isinstance(obj, dict):
        re_, im_ = obj.get("re", 0), obj.get("im", 0)
    elif isinstance(obj, (list, tuple)):
        re_, im_ = obj
    else:
        re_, im_ = obj, 0
    if exact:
        return GaussianRational(parse_part(re_, True), parse_part(im_, True))
    return complex(parse_part(re_, False), parse_part(im_, False))


def _dump_part(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else int(v.numerator)
    if isinstance(v, int):
        return v
    return float(v)


def dump_scalar(x) -> dict:
    re_, im_ = re_im(x)
    return {"re": _dump_part(re_), "im": _dump_part(im_)}


def magnitude(x) -> float:
    return float(abs(x))
