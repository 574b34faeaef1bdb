"""Exact Gaussian-rational scalars used by the operator algebra.

All symbolic computations in this package run over Q(i) with exact
big-integer fractions, so a nonzero residual in any identity check is a
real defect rather than rounding noise.  gmpy2's mpq is used when
available (noticeably faster on deep products); plain fractions.Fraction
otherwise.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as _Q

_Q0 = _Q(0)
_Q1 = _Q(1)


def rational(num, den=1):
    """Exact rational from ints or a 'p/q' string."""
    if isinstance(num, str):
        if "/" in num:
            p, q = num.split("/")
            return _Q(int(p), int(q))
        return _Q(int(num))
    return _Q(num, den)


def _fmt(q) -> str:
    num, den = q.numerator, q.denominator
    return f"{num}/{den}" if den != 1 else f"{num}"


class GaussianRational:
    """Immutable element of Q(i), stored as an exact (re, im) pair."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", re if type(re) is type(_Q0) else rational(re))
        object.__setattr__(self, "im", im if type(im) is type(_Q0) else rational(im))

    def __setattr__(self, *a):
        raise AttributeError("GaussianRational is immutable")

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if type(other) is int:  # hot path in the rewriting kernel
            return GaussianRational(self.re * other, self.im * other)
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0 and d == 0:
            return GaussianRational(a * c, _Q0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((a * c + b * d) / n, (b * c - a * d) / n)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    # -- predicates ---------------------------------------------------
    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    # -- conversions --------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return _fmt(self.re)
        if not self.re:
            return f"{_fmt(self.im)}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({_fmt(self.re)} {sign} {_fmt(abs(self.im))}*i)"

    def to_json(self) -> dict:
        return {"re": _fmt(self.re), "im": _fmt(self.im)}

    @classmethod
    def from_json(cls, d: dict) -> "GaussianRational":
        return cls(rational(d.get("re", "0")), rational(d.get("im", "0")))


def _coerce(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int) or type(x) is type(_Q0):
        return GaussianRational(x, 0)
    raise TypeError(f"cannot coerce {type(x).__name__} into Q(i)")


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
IMAG = GaussianRational(0, 1)
