"""Exact scalars: rationals (``fractions.Fraction``) and Gaussian rationals.

Every matrix entry in the package is a :class:`GaussianRational`.  Parameters
such as ``a``, ``b``, ``c`` are rationals or Gaussian rationals so that all
identity checks are decided exactly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import DegenerateScalar, ParseError

Rational = Fraction

__all__ = [
    "Rational",
    "GaussianRational",
    "GR",
    "ZERO",
    "ONE",
    "I_UNIT",
    "as_gr",
    "as_rational",
    "gr_arith",
    "pochhammer",
    "factorial",
    "parse_scalar",
    "format_scalar",
]


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and exact strings to ``Fraction``; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, GaussianRational):
        if x.im:
            raise ValueError(f"{x} is not real")
        return x.re
    if isinstance(x, str):
        g = parse_scalar(x)
        if g.im:
            raise ValueError(f"{x!r} is not real")
        return g.re
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class GaussianRational:
    """Immutable ``re + im*i`` with ``Fraction`` parts.

    Fractions are always stored reduced with positive denominator, so the
    canonical-form invariant comes for free.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_rational(re))
        object.__setattr__(self, "im", as_rational(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "GaussianRational":
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if not self.im and not o.im:
            return GaussianRational._raw(self.re * o.re, Fraction(0))
        return GaussianRational._raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        if not self.im:
            if not self.re:
                raise DegenerateScalar("division by zero")
            return GaussianRational._raw(1 / self.re, Fraction(0))
        d = self.norm()
        return GaussianRational._raw(self.re / d, -self.im / d)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        if not o.im:
            if not o.re:
                raise DegenerateScalar("division by zero")
            return GaussianRational._raw(self.re / o.re, self.im / o.re)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GR({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def to_complex(self) -> complex:
        """Lossy conversion, for presentation only."""
        return complex(float(self.re), float(self.im))


GR = GaussianRational
ZERO = GaussianRational._raw(Fraction(0), Fraction(0))
ONE = GaussianRational._raw(Fraction(1), Fraction(0))
I_UNIT = GaussianRational._raw(Fraction(0), Fraction(1))


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)) or isinstance(x, _RationalABC):
        return GaussianRational._raw(as_rational(x), Fraction(0))
    return NotImplemented


def as_gr(x) -> GaussianRational:
    """Coerce an exact number or scalar string to a :class:`GaussianRational`."""
    if isinstance(x, str):
        return parse_scalar(x)
    o = _coerce(x)
    if o is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to GaussianRational")
    return o


def gr_arith(x, y, op: str) -> GaussianRational:
    x, y = as_gr(x), as_gr(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def pochhammer(x, n: int):
    """Rising factorial ``x (x+1) ... (x+n-1)``; 1 for ``n == 0``.

    Works for ``Fraction`` and ``GaussianRational`` arguments alike.
    """
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    if isinstance(x, GaussianRational):
        result = ONE
    else:
        x = as_rational(x)
        result = Fraction(1)
    for k in range(n):
        result = result * (x + k)
    return result


def factorial(n: int) -> int:
    return math.factorial(n)


# -- text encoding ---------------------------------------------------------

_NUM = r"\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<isign>[+-])?(?P<im>{_NUM})?\*?i)?$"
)


def _frac(token: str, text: str, col: int, line: int | None) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {token!r} in {text!r}", line, col) from None
    return value


def parse_scalar(text: str, *, line: int | None = None, column: int | None = None) -> GaussianRational:
    """Parse ``"p/q"`` or ``"p/q+r/s*i"`` (whitespace ignored).

    Forms such as ``"i"``, ``"-2*i"``, ``"1-i"`` are accepted as well.
    """
    compact = "".join(text.split())
    if not compact:
        raise ParseError("empty scalar", line, column)
    m = _SCALAR_RE.match(compact)
    if m is None or (m.group("re") is None and "i" not in compact):
        # locate the first offending character for the diagnostic
        bad = _first_bad_column(compact)
        col = (column or 1) + bad if column is not None else bad + 1
        raise ParseError(f"malformed scalar {text.strip()!r}", line, col)
    re_tok = m.group("re")
    has_i = compact.endswith("i")
    if has_i and re_tok is not None and m.group("isign") is None:
        # "3i" / "3*i": the whole number is the imaginary part
        if m.group("im") is None:
            im_val = _frac(re_tok, text, column or 1, line)
            return GaussianRational._raw(Fraction(0), im_val)
        raise ParseError(f"malformed scalar {text.strip()!r}", line, column)
    re_val = _frac(re_tok, text, column or 1, line) if re_tok else Fraction(0)
    im_val = Fraction(0)
    if has_i:
        mag = _frac(m.group("im"), text, column or 1, line) if m.group("im") else Fraction(1)
        im_val = -mag if m.group("isign") == "-" else mag
    return GaussianRational._raw(re_val, im_val)


def _first_bad_column(s: str) -> int:
    """Zero-based index of the first character that breaks the scalar grammar."""
    for k in range(len(s), 0, -1):
        prefix = s[:k]
        # a prefix is viable if appending digits could complete it
        for tail in ("", "1", "1*i", "/1", "i"):
            if _SCALAR_RE.match(prefix + tail):
                return k if k < len(s) else len(s) - 1
    return 0


def format_scalar(x) -> str:
    """Canonical text form: ``"p/q"`` for reals, ``"p/q+r/s*i"`` otherwise."""
    x = as_gr(x)
    if not x.im:
        return str(x.re)
    sign = "-" if x.im < 0 else "+"
    return f"{x.re}{sign}{abs(x.im)}*i"
