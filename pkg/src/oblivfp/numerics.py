"""Secure sine, cosine, arctangent, normalization, square root and selection.

All functions take SArrays and run unchanged in either engine.  Angles
for sine and cosine are in degrees; arctangent returns radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import blocks as B
from .engine import SArray, bit_lt_public, cat
from .errors import AbortError, ConfigError
from .fixedpoint import const_raw
from .tables import load_tables

SQRT_INIT = (-0.8099868542, 1.787727479)     # b0' = alpha * a' + beta on [1/2, 1)
INV90_EXTRA = 7                              # guard bits for the 1/90 scaling
SELECT_PROB_BITS = 16


def default_precision(k: int) -> int:
    """Smallest shipped table precision covering ``k`` fractional bits."""
    for p in (16, 32, 64):
        if p >= k:
            return p
    return 64


def _poly_sum(E, coeffs, pows, frac):
    """sum_i coeffs[i] * pows[i-1] (+ coeffs[0]) with a single truncation at the end."""
    k = frac
    raw = [const_raw(c, k) for c in coeffs]
    acc = E.const_raw(raw[0] << k, 2 * k) if raw[0] else None
    for c, p in zip(raw[1:], pows):
        if c == 0:
            continue
        term = (p * c).with_frac(2 * k)
        acc = term if acc is None else acc + term
    return E.trunc(acc, k)


def _fold_to_unit(E, a2: SArray) -> SArray:
    """x = a2 / 90 at k fractional bits, for a2 in [0, 90]."""
    k = E.fmt.k
    c = E.const_raw(const_raw(mpmath.mpf(1) / 90, k + INV90_EXTRA), 0)
    prod = (a2 * c).with_frac(a2.frac + k + INV90_EXTRA)
    return E.trunc(prod, a2.frac + INV90_EXTRA, bits=k + a2.frac + 10)


def _trig(a: SArray, fn: str, precision: int | None) -> SArray:
    E = a.E
    k, f = E.fmt.k, a.frac
    if f not in (0, k):
        raise ConfigError("angle must be an integer or a k-bit fixed-point value")
    precision = precision or default_precision(k)
    poly = load_tables().get(fn, precision)
    bits = f + 10
    c180 = E.const(180, f)
    with E.label("s_" + fn):
        if fn == "sin":
            s = B.s_lt(c180, a, bits)                      # a > 180: negate
            a1 = a - s * c180
        else:
            s0 = B.s_lt(c180, a, bits)                     # a > 180: reflect to 360 - a
            a1 = a + E.mul(s0, E.const(360, f) - a * 2)
        s2 = B.s_lt(E.const(90, f), a1, bits)              # a1 > 90: reflect to 180 - a1
        a2 = a1 + E.mul(s2, c180 - a1 * 2)
        x = _fold_to_unit(E, a2)
        if fn == "sin":
            w, xs = E.mul_many([(x, x), (1 - s * 2, x)])
            w = E.rescale(w, k)
        else:
            w = E.fxmul(x, x, frac=k)
        pows = B.s_premul(w, poly.degree) if poly.degree else []
        p = _poly_sum(E, poly.coefficients, pows, k)
        if fn == "sin":
            return E.fxmul(xs, p, frac=k)
        return E.mul(1 - s2 * 2, p)


def s_sin(a: SArray, precision: int | None = None) -> SArray:
    """Sine of ``a`` degrees, 0 <= a < 360; ``a`` may be an integer or fixed-point."""
    return _trig(a, "sin", precision)


def s_cos(a: SArray, precision: int | None = None) -> SArray:
    """Cosine of ``a`` degrees, 0 <= a < 360; ``a`` may be an integer or fixed-point."""
    return _trig(a, "cos", precision)


def s_arctan(a: SArray, precision: int | None = None) -> SArray:
    """Arctangent in radians, folded onto [0, 1] by symmetry and reciprocal."""
    E = a.E
    ell, k = E.fmt.ell, E.fmt.k
    a = a.upscale(k)
    precision = precision or default_precision(k)
    poly = load_tables().get("arctan", precision)
    one = E.const(1, k)
    with E.label("s_arctan"):
        s = E.ltz(a, ell)
        sgn = 1 - s * 2
        x = E.mul(sgn, a)
        c = B.s_lt(one, x, ell + 1)                       # x > 1
        xc = one + E.mul(c, x - one)                       # max(x, 1): keeps 1/x in range
        y = x + E.mul(c, B.s_div(one, xc) - x)
        pows = B.s_premul(y, poly.degree)
        z = _poly_sum(E, poly.coefficients, pows, k)
        z = z + E.mul(c, E.const(mpmath.pi / 2, k) - z * 2)
        return E.mul(sgn, z)


def _norm_tables(fmt):
    """Per MSB position i: exponent w, 2^-floor(w/2) and the odd-w factor."""
    ws = B.msb_exponents(fmt)
    pw = [mpmath.mpf(2) ** (-(w // 2)) for w in ws]
    return ws, pw


def s_norm(a: SArray):
    """``(a', pow, c)`` with ``a = a' * 2^w``, a' in [1/2, 1), pow = 2^-floor(w/2), c = w mod 2.

    ``a'`` keeps every bit of ``a`` (it has ell-1 fractional bits); ``pow``
    has k fractional bits and ``c`` is an integer bit.  Requires a > 0;
    for a = 0 all three outputs are 0.
    """
    E = a.E
    k = E.fmt.k
    a = a.upscale(k)
    with E.label("s_norm"):
        ap, y = B.norm_parts(a)
        ws, pw = _norm_tables(E.fmt)
        pow_ = B._onehot_sum(y, [const_raw(v, k) for v in pw], k)
        c = B._onehot_sum(y, [w % 2 for w in ws], 0)
    return ap, pow_, c


def s_sqrt(a: SArray, xi: int | None = None) -> SArray:
    """Square root of ``a >= 0``: Goldschmidt iterations finished by one Newton step.

    The initial guess is the linear fit ``alpha a' + beta`` to 1/sqrt on
    the normalized mantissa, scaled by 2^-floor(w/2) and by 1/sqrt(2) for
    odd exponents.
    """
    E = a.E
    ell, k = E.fmt.ell, E.fmt.k
    xi = xi or math.ceil(math.log2(ell / 5.4))
    a = a.upscale(k)
    alpha, beta = SQRT_INIT
    with E.label("s_sqrt"):
        ap, y = B.norm_parts(a)
        ws, pw = _norm_tables(E.fmt)
        inv_rt2 = 1 / mpmath.sqrt(2)
        # pow * (c ? 1/sqrt2 : 1) is linear in the one-hot MSB vector
        scale = B._onehot_sum(y, [const_raw(p * (inv_rt2 if w % 2 else 1), k)
                                  for p, w in zip(pw, ws)], k)
        b0p = E.rescale(ap * E.const_raw(const_raw(alpha, k), k), k, bits=ell + k + 1)
        b0p = b0p + E.const(beta, k)
        b0 = E.fxmul(scale, b0p, frac=k)
        g = E.fxmul(a, b0, frac=k)
        h = b0.with_frac(k + 1)                             # b0 / 2, exactly
        for it in range(xi - 1):
            r = E.const(1.5, k) - E.fxmul(g, h, frac=k)
            if it < xi - 2:
                g, h = E.fxmul_many([(g, r), (h, r)], frac=k)
            else:
                h = E.fxmul(h, r, frac=k)
        yv = h * 2 if h.frac == k else h.with_frac(k)      # y = 2h ~ 1/sqrt(a)
        u = E.fxmul(E.fxmul(a, yv, frac=k), yv, frac=k)         # (a y) y keeps relative precision
        r = E.const(1.5, k) - u.with_frac(k + 1)
        yv = E.fxmul(yv, r, frac=k)
        return E.fxmul(a, yv, frac=k)


# -------------------------------------------------------------------- select

@dataclass(frozen=True)
class SelectParams:
    """Sampling constants for :func:`s_select`."""

    c1: float = 2
    c2: float = 2
    c_hat: int = 10
    retry_limit: int = 16

    def __post_init__(self):
        if min(self.c1, self.c2, self.c_hat) <= 0 or self.retry_limit < 1:
            raise ConfigError("select constants must be positive")


def _sample_flags(E, m: int, prob: float):
    """Independent shared bits, each 1 with probability ``prob`` (16-bit resolution)."""
    L = SELECT_PROB_BITS
    thr = min(1 << L, max(0, round(prob * (1 << L))))
    if thr == 0:
        return E.zeros((m,))
    if thr == 1 << L:
        return E.ones((m,))
    rb = E.rand_bits((m, L))
    return 1 - bit_lt_public(E, np.full(m, thr - 1, dtype=np.int64), rb)


def s_select(keys: SArray, f: int, params: SelectParams | None = None,
             bits: int | None = None, trace: list | None = None) -> SArray:
    """The f-th smallest key (1-based, duplicates counted) by sampling.

    ``bits`` bounds the signed bit length of the keys.  Only the counts
    t1, r_x and t2 are opened; a run whose counts fall outside the safe
    ranges is repeated with fresh randomness, at most
    ``params.retry_limit`` times, after which :class:`AbortError` is raised.
    ``trace`` (a list) receives one dict of opened counts per attempt.
    """
    params = params or SelectParams()
    E = keys.E
    m = keys.shape[0]
    if not 1 <= f <= m:
        raise ConfigError(f"rank {f} outside 1..{m}")
    bits = bits or E.fmt.ell
    cb = bits + 1
    n = math.sqrt(m)
    with E.label("s_select"):
        for attempt in range(params.retry_limit):
            rec = {"attempt": attempt}
            if trace is not None:
                trace.append(rec)
            sel = _sample_flags(E, m, params.c1 / n)
            t1 = int(E.open(sel.sum(), kind="reveal"))
            rec["t1"] = t1
            if t1 > 2 * params.c1 * n or t1 < params.c1 * n / 2:
                rec["abort"] = "t1"
                continue
            (picked,) = B.s_compact(sel, [keys])
            sample, _ = B.s_sort(picked[0:t1], bits=cb)
            kpos = math.floor(f * t1 / m + 0.5)
            lo_i, hi_i = kpos - params.c_hat, kpos + 3 * params.c_hat
            if lo_i < 1:
                x, _, _ = B.s_minmax(keys, mode="min", bits=cb)
            else:
                x = sample[lo_i - 1]
            if hi_i > t1:
                y, _, _ = B.s_minmax(keys, mode="max", bits=cb)
            else:
                y = sample[hi_i - 1]
            # g_i = [a_i < x], h_i = [y < a_i]; keep x <= a_i <= y
            both = B.s_lt(cat([keys, y.reshape(1).broadcast_to((m,))]),
                          cat([x.reshape(1).broadcast_to((m,)), keys]), cb)
            g, h = both[0:m], both[m:2 * m]
            inside = E.mul(1 - g, 1 - h)
            counts = E.open(cat([g.sum().reshape(1), inside.sum().reshape(1)]), kind="reveal")
            r_x, t2 = int(counts[0]), int(counts[1])
            rec.update(r_x=r_x, t2=t2)
            if t2 > 4 * params.c_hat * params.c2 * n or not 1 <= f - r_x <= t2:
                rec["abort"] = "t2"
                continue
            (d,) = B.s_compact(inside, [keys])
            d_sorted, _ = B.s_sort(d[0:t2], bits=cb)
            rec["abort"] = None
            return d_sorted[f - r_x - 1]
    raise AbortError(f"select aborted {params.retry_limit} times")


__all__ = ["s_sin", "s_cos", "s_arctan", "s_norm", "s_sqrt", "s_select", "SelectParams",
           "SQRT_INIT", "default_precision"]
