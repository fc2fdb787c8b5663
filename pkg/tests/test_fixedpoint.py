from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oblivfp.errors import ConfigError, DomainError, RangeError
from oblivfp.fixedpoint import DEFAULT_FORMAT, FxFormat, decode, encode, fx_mul, ref_eval

K = DEFAULT_FORMAT.k


def test_encode_examples():
    assert encode(0).raw == 0
    assert encode(1.5).raw == 3 << 31
    assert encode(Fraction(1, 10)).raw == 429496729
    assert encode(-0.5).raw == -(1 << 31)


def test_encode_range():
    with pytest.raises(RangeError):
        encode(1 << 23)
    with pytest.raises(RangeError):
        encode(float("nan"))
    assert encode(-(1 << 23)).raw == -(1 << 55)


def test_format_parse():
    assert FxFormat.parse("40,20") == FxFormat(40, 20)
    with pytest.raises(ConfigError):
        FxFormat.parse("56")
    with pytest.raises(ConfigError):
        FxFormat(32, 40)


def test_fx_mul_examples():
    assert fx_mul(encode(2), encode(3)).raw == encode(6).raw
    x = encode(Fraction(7, 3))
    assert fx_mul(encode(1), x).raw == x.raw
    p = fx_mul(encode(Fraction(3, 10)), encode(Fraction(3, 10)))
    delta = Fraction(9, 100) - Fraction(p.raw, 1 << K)
    assert 0 < delta < Fraction(1, 1 << 31)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=-1000, max_value=1000))
def test_roundtrip(r):
    assert abs(Fraction(encode(r).raw, 1 << K) - r) <= Fraction(1, 1 << K)
    assert abs(decode(encode(r)) - float(r)) <= 2.0 ** -K + 1e-12 * abs(float(r))


@settings(max_examples=100, deadline=None)
@given(st.integers(-(1 << 34), 1 << 34), st.integers(-(1 << 34), 1 << 34),
       st.integers(-(1 << 34), 1 << 34))
def test_mul_ring_laws(a, b, c):
    A, B, C = (encode(Fraction(v, 1 << 28)) for v in (a, b, c))
    assert fx_mul(A, B).raw == fx_mul(B, A).raw
    assert abs(fx_mul(fx_mul(A, B), C).raw - fx_mul(A, fx_mul(B, C)).raw) <= \
        2 + (abs(A.raw) + abs(C.raw)) // (1 << K)


def test_ref_eval_examples():
    assert ref_eval("sin", 30).raw == 1 << 31
    assert abs(ref_eval("arctan", 1).raw - int(mpmath.pi / 4 * 2 ** K)) <= 1
    assert abs(float(ref_eval("sqrt", 2)) - 1.4142135623730951) < 2 ** -31


def test_ref_eval_domain():
    with pytest.raises(DomainError):
        ref_eval("sqrt", -1)
    with pytest.raises(DomainError):
        ref_eval("div", 1, 0)


def test_pythagorean_identity_all_degrees():
    for a in range(360):
        s = Fraction(ref_eval("sin", a).raw, 1 << K)
        c = Fraction(ref_eval("cos", a).raw, 1 << K)
        assert abs(s * s + c * c - 1) <= Fraction(4, 1 << K)
