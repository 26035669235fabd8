"""Exact Gaussian-rational scalars and the two coefficient backends.

The rational backend uses :class:`GaussQ` (real and imaginary parts are
``gmpy2.mpq``); the float backend uses Python ``complex``.  Polynomial code
only relies on ``+ - *``, ``conjugate()`` and ``==``, so it runs unchanged on
either backend.
"""
from __future__ import annotations

from fractions import Fraction
import numbers

from gmpy2 import mpq

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)


def _as_mpq(x) -> mpq:
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        # exact binary value of the float
        return mpq(Fraction(x))
    return mpq(x)


class GaussQ:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO_Q) else _as_mpq(re)
        self.im = im if type(im) is type(_ZERO_Q) else _as_mpq(im)

    @classmethod
    def coerce(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, complex):
            return cls(x.real, x.imag)
        if isinstance(x, str):
            return parse_scalar(x)
        return cls(x, 0)

    # arithmetic -------------------------------------------------------
    def __add__(self, o):
        if type(o) is not GaussQ:
            if isinstance(o, complex):
                return complex(self) + o
            o = GaussQ.coerce(o)
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        if type(o) is not GaussQ:
            if isinstance(o, complex):
                return complex(self) - o
            o = GaussQ.coerce(o)
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        if isinstance(o, complex):
            return o - complex(self)
        return GaussQ.coerce(o) - self

    def __mul__(self, o):
        if type(o) is not GaussQ:
            if isinstance(o, complex):
                return complex(self) * o
            o = GaussQ.coerce(o)
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussQ(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __truediv__(self, o):
        if type(o) is not GaussQ:
            if isinstance(o, complex):
                return complex(self) / o
            o = GaussQ.coerce(o)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        a, b, c, d = self.re, self.im, o.re, o.im
        return GaussQ((a * c + b * d) / den, (b * c - a * d) / den)

    def __rtruediv__(self, o):
        if isinstance(o, complex):
            return o / complex(self)
        return GaussQ.coerce(o) / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussQ(1) / self ** (-k)
        out = GaussQ(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def abs2(self):
        return self.re * self.re + self.im * self.im

    # comparisons ------------------------------------------------------
    def __eq__(self, o):
        if type(o) is GaussQ:
            return self.re == o.re and self.im == o.im
        if isinstance(o, complex):
            return complex(self) == o
        if isinstance(o, (numbers.Rational, int)) or type(o) is type(_ZERO_Q):
            return self.im == 0 and self.re == o
        if isinstance(o, float):
            return self.im == 0 and float(self.re) == o
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im != 0:
            raise TypeError("GaussQ with nonzero imaginary part is not real")
        return float(self.re)

    def __repr__(self):
        return f"GaussQ({format_rational(self.re)!r}, {format_rational(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return format_rational(self.re)
        if self.re == 0:
            return f"{format_rational(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"({format_rational(self.re)}{sign}{format_rational(abs(self.im))}i)"


_ZERO_Q = mpq(0)
ZERO = GaussQ(0, 0)
ONE = GaussQ(1, 0)
I = GaussQ(0, 1)


def format_rational(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str) -> GaussQ:
    """Parse ``"p/q"``, ``"a+bi"`` style strings into a :class:`GaussQ`."""
    s = text.strip().replace(" ", "").replace("j", "i")
    if not s:
        raise ValueError("empty scalar")
    if not s.endswith("i"):
        return GaussQ(mpq(s.lstrip("+")), 0)
    body = s[:-1]
    # split at the last sign that is not the leading one
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE/":
            re_part, im_part = body[:pos], body[pos:]
            break
    else:
        re_part, im_part = "0", body
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return GaussQ(mpq(re_part.lstrip("+") or "0"), mpq(im_part.lstrip("+")))


def to_backend(c, backend: str):
    if backend == RATIONAL:
        return GaussQ.coerce(c)
    if backend == FLOAT:
        return complex(c)
    raise ValueError(f"unknown backend {backend!r}")


def backend_of(c) -> str:
    return FLOAT if isinstance(c, (complex, float)) else RATIONAL


def rational_from_float(x: float, max_den: int = 10**12) -> mpq:
    return mpq(Fraction(x).limit_denominator(max_den))
