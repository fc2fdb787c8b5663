"""Plain fixed-point numbers and extended-precision reference functions.

A value with format ``(ell, k)`` is an integer ``raw`` in the signed
``ell``-bit range standing for ``raw / 2**k``.  Encoding and
multiplication round toward minus infinity.

>>> fmt = FxFormat()
>>> encode(0.1, fmt).raw
429496729
>>> float(encode(2.0, fmt) * encode(3.0, fmt))
6.0
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import mpmath

from .errors import ConfigError, DomainError, RangeError


@dataclass(frozen=True)
class FxFormat:
    """Bit layout: ``ell`` total bits, ``k`` of them after the radix point."""

    ell: int = 56
    k: int = 32

    def __post_init__(self):
        if not (0 < self.k < self.ell) or self.ell % 2 or self.k % 2:
            raise ConfigError(f"invalid fixed-point format ell={self.ell}, k={self.k}")

    @property
    def int_bits(self) -> int:
        return self.ell - self.k

    @property
    def raw_min(self) -> int:
        return -(1 << (self.ell - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.ell - 1)) - 1

    @property
    def ulp(self) -> Fraction:
        return Fraction(1, 1 << self.k)

    def check(self, raw: int) -> int:
        if not self.raw_min <= raw <= self.raw_max:
            raise RangeError(f"raw value {raw} outside the {self.ell}-bit signed range")
        return raw

    @classmethod
    def parse(cls, text: str) -> "FxFormat":
        """Parse ``"ell,k"``."""
        try:
            ell, k = (int(t) for t in text.split(","))
        except ValueError:
            raise ConfigError(f"format must look like 'ell,k', got {text!r}") from None
        return cls(ell, k)

    def __str__(self):
        return f"{self.ell},{self.k}"


DEFAULT_FORMAT = FxFormat()


def _floor_scaled(r, k: int) -> int:
    """floor(r * 2**k) for int, Fraction, float, str or mpf input, exactly."""
    if isinstance(r, (int, Rational)):
        return int((Fraction(r) * (1 << k)).__floor__())
    if isinstance(r, float):
        return int((Fraction(r) * (1 << k)).__floor__())
    if isinstance(r, str):
        return int((Fraction(r) * (1 << k)).__floor__())
    with mpmath.workprec(max(256, 4 * k)):
        return int(mpmath.floor(mpmath.mpf(r) * mpmath.mpf(2) ** k))


def _round_scaled(r, k: int) -> int:
    """Nearest integer to r * 2**k (ties toward +inf)."""
    if isinstance(r, (int, Rational, float, str)):
        return int((Fraction(r) * (1 << k) + Fraction(1, 2)).__floor__())
    with mpmath.workprec(max(256, 4 * k)):
        return int(mpmath.floor(mpmath.mpf(r) * mpmath.mpf(2) ** k + mpmath.mpf(0.5)))


@dataclass(frozen=True)
class FxValue:
    raw: int
    fmt: FxFormat = DEFAULT_FORMAT

    def __post_init__(self):
        self.fmt.check(self.raw)

    @classmethod
    def from_raw(cls, raw: int, fmt: FxFormat = DEFAULT_FORMAT) -> "FxValue":
        return cls(int(raw), fmt)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, 1 << self.fmt.k)

    def __float__(self):
        return self.raw / (1 << self.fmt.k)

    def _same(self, other: "FxValue"):
        if not isinstance(other, FxValue):
            return NotImplemented
        if other.fmt != self.fmt:
            raise ConfigError("fixed-point operands have different formats")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return FxValue(self.raw + other.raw, self.fmt)

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return FxValue(self.raw - other.raw, self.fmt)

    def __neg__(self):
        return FxValue(-self.raw, self.fmt)

    def __mul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return fx_mul(self, other)

    def __repr__(self):
        return f"FxValue({float(self)!r}, raw={self.raw})"


def encode(r, fmt: FxFormat = DEFAULT_FORMAT) -> FxValue:
    """``raw = floor(r * 2**k)``; raises RangeError when ``|r|`` is too large."""
    bound = 1 << (fmt.ell - fmt.k - 1)
    if isinstance(r, float) and r != r:
        raise RangeError("cannot encode NaN")
    if not -bound <= _as_fraction_or_mpf(r) < bound:
        raise RangeError(f"{r!r} outside (-2^{fmt.ell - fmt.k - 1}, 2^{fmt.ell - fmt.k - 1})")
    return FxValue(_floor_scaled(r, fmt.k), fmt)


def _as_fraction_or_mpf(r):
    if isinstance(r, (int, Rational, float, str)):
        return Fraction(r)
    return mpmath.mpf(r)


def decode(v: FxValue) -> float:
    return float(v)


def fx_mul(a: FxValue, b: FxValue) -> FxValue:
    """``floor(a.raw * b.raw / 2**k)``."""
    if a.fmt != b.fmt:
        raise ConfigError("fixed-point operands have different formats")
    return FxValue((a.raw * b.raw) >> a.fmt.k, a.fmt)


def floor_div_pow2(x: int, m: int) -> int:
    """Floor of ``x / 2**m`` for Python ints of any sign."""
    return x >> m


# ---------------------------------------------------------------------------
# extended-precision oracles

REF_FUNCS = ("sin", "cos", "arctan", "sqrt", "div")


def ref_real(fn: str, *args, prec: int | None = None, fmt: FxFormat = DEFAULT_FORMAT):
    """The exact function value as an mpmath number at ``>= 4*ell`` bits.

    ``sin``/``cos`` take degrees, ``arctan`` returns radians.  Arguments may
    be FxValue, int, float, Fraction or decimal strings.
    """
    prec = prec or max(4 * fmt.ell, 128)
    with mpmath.workprec(prec):
        xs = [_to_mpf(a) for a in args]
        if fn == "sin":
            return +mpmath.sin(mpmath.radians(xs[0]))
        if fn == "cos":
            return +mpmath.cos(mpmath.radians(xs[0]))
        if fn == "arctan":
            return +mpmath.atan(xs[0])
        if fn == "sqrt":
            if xs[0] < 0:
                raise DomainError("sqrt of a negative number")
            return +mpmath.sqrt(xs[0])
        if fn == "div":
            if xs[1] == 0:
                raise DomainError("division by zero")
            return xs[0] / xs[1]
    raise ConfigError(f"unknown reference function {fn!r}")


def ref_eval(fn: str, *args, fmt: FxFormat = DEFAULT_FORMAT) -> FxValue:
    """Reference value in ``fmt``: extended precision, rounded to nearest once."""
    with mpmath.workprec(max(4 * fmt.ell, 128)):
        raw = _round_scaled(ref_real(fn, *args, fmt=fmt), fmt.k)
    return FxValue(fmt.check(raw), fmt)


def _to_mpf(a):
    if isinstance(a, FxValue):
        return mpmath.mpf(a.raw) / mpmath.mpf(2) ** a.fmt.k
    if isinstance(a, Fraction):
        return mpmath.mpf(a.numerator) / a.denominator
    return mpmath.mpf(a)


def const_raw(r, k: int) -> int:
    """Nearest raw encoding of a real constant with ``k`` fractional bits."""
    return _round_scaled(r, k)
