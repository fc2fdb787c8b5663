"""Arithmetic in GF(p) for the Mersenne prime p = 2**127 - 1.

Elements live in uint64 arrays whose last axis has length 2: ``[lo, hi]``
with ``value = lo + hi * 2**64`` and ``hi < 2**63``.  That layout makes
``arr.tobytes()`` the 16-byte little-endian wire encoding on little-endian
hosts.  Kernels are compiled with numba; everything else is thin numpy glue.

>>> a = from_int(-3); b = from_int(5)
>>> to_int(mul(a, b))
-15
>>> to_int(add(a, b)), to_int(sub(a, b))
(2, -8)
"""

from __future__ import annotations

import numpy as np
from numba import njit

P = (1 << 127) - 1
HALF = P >> 1

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_M63 = np.uint64(0x7FFFFFFFFFFFFFFF)
_M32 = np.uint64(0xFFFFFFFF)
_S1 = np.uint64(1)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S63 = np.uint64(63)
_Z = np.uint64(0)


# --------------------------------------------------------------------------
# scalar kernels

@njit(inline="always")
def _canon(lo, hi):
    # lo + hi*2^64 <= 2^128 - 1 with hi possibly >= 2^63; fold twice.
    top = hi >> _S63
    hi = hi & _M63
    lo2 = lo + top
    c = _S1 if lo2 < lo else _Z
    hi = hi + c
    top = hi >> _S63
    hi = hi & _M63
    lo3 = lo2 + top
    c = _S1 if lo3 < lo2 else _Z
    hi = hi + c
    if hi == _M63 and lo3 == _M64:
        return _Z, _Z
    return lo3, hi


@njit(inline="always")
def _add(a0, a1, b0, b1):
    lo = a0 + b0
    c = _S1 if lo < a0 else _Z
    return _canon(lo, a1 + b1 + c)


@njit(inline="always")
def _neg(a0, a1):
    if a0 == _Z and a1 == _Z:
        return _Z, _Z
    return _M64 - a0, _M63 - a1


@njit(inline="always")
def _mul(a0, a1, b0, b1):
    x = (a0 & _M32, a0 >> _S32, a1 & _M32, a1 >> _S32)
    y = (b0 & _M32, b0 >> _S32, b1 & _M32, b1 >> _S32)
    t00 = x[0] * y[0]
    t01 = x[0] * y[1]
    t02 = x[0] * y[2]
    t03 = x[0] * y[3]
    t10 = x[1] * y[0]
    t11 = x[1] * y[1]
    t12 = x[1] * y[2]
    t13 = x[1] * y[3]
    t20 = x[2] * y[0]
    t21 = x[2] * y[1]
    t22 = x[2] * y[2]
    t23 = x[2] * y[3]
    t30 = x[3] * y[0]
    t31 = x[3] * y[1]
    t32 = x[3] * y[2]
    t33 = x[3] * y[3]
    c0 = (t00 & _M32)
    c1 = (t01 & _M32) + (t00 >> _S32) + (t10 & _M32)
    c2 = (t02 & _M32) + (t01 >> _S32) + (t11 & _M32) + (t10 >> _S32) + (t20 & _M32)
    c3 = (t03 & _M32) + (t02 >> _S32) + (t12 & _M32) + (t11 >> _S32) + (t21 & _M32) + (t20 >> _S32) + (t30 & _M32)
    c4 = (t03 >> _S32) + (t13 & _M32) + (t12 >> _S32) + (t22 & _M32) + (t21 >> _S32) + (t31 & _M32) + (t30 >> _S32)
    c5 = (t13 >> _S32) + (t23 & _M32) + (t22 >> _S32) + (t32 & _M32) + (t31 >> _S32)
    c6 = (t23 >> _S32) + (t33 & _M32) + (t32 >> _S32)
    c7 = (t33 >> _S32)
    l0 = c0 & _M32
    c1 += c0 >> _S32
    l1 = c1 & _M32
    c2 += c1 >> _S32
    l2 = c2 & _M32
    c3 += c2 >> _S32
    l3 = c3 & _M32
    c4 += c3 >> _S32
    l4 = c4 & _M32
    c5 += c4 >> _S32
    l5 = c5 & _M32
    c6 += c5 >> _S32
    l6 = c6 & _M32
    c7 += c6 >> _S32
    l7 = c7 & _M32
    w0 = l0 | (l1 << _S32)
    w1 = l2 | (l3 << _S32)
    w2 = l4 | (l5 << _S32)
    w3 = l6 | (l7 << _S32)
    # value = low127 + 2^127 * high and 2^127 == 1 (mod p)
    h0 = (w1 >> _S63) | (w2 << _S1)
    h1 = (w2 >> _S63) | (w3 << _S1)
    lo = w0 + h0
    c = _S1 if lo < w0 else _Z
    return _canon(lo, (w1 & _M63) + h1 + c)


# --------------------------------------------------------------------------
# array kernels over flattened (N, 2) views

@njit(cache=True, nogil=True)
def _k_add(a, b, out):
    for i in range(out.shape[0]):
        out[i, 0], out[i, 1] = _add(a[i, 0], a[i, 1], b[i, 0], b[i, 1])


@njit(cache=True, nogil=True)
def _k_sub(a, b, out):
    for i in range(out.shape[0]):
        n0, n1 = _neg(b[i, 0], b[i, 1])
        out[i, 0], out[i, 1] = _add(a[i, 0], a[i, 1], n0, n1)


@njit(cache=True, nogil=True)
def _k_neg(a, out):
    for i in range(out.shape[0]):
        out[i, 0], out[i, 1] = _neg(a[i, 0], a[i, 1])


@njit(cache=True, nogil=True)
def _k_mul(a, b, out):
    for i in range(out.shape[0]):
        out[i, 0], out[i, 1] = _mul(a[i, 0], a[i, 1], b[i, 0], b[i, 1])


@njit(cache=True, nogil=True)
def _k_dot(coef, stack, out):
    # out[i] = sum_j coef[j] * stack[j, i]
    for i in range(out.shape[0]):
        s0 = _Z
        s1 = _Z
        for j in range(stack.shape[0]):
            m0, m1 = _mul(coef[j, 0], coef[j, 1], stack[j, i, 0], stack[j, i, 1])
            s0, s1 = _add(s0, s1, m0, m1)
        out[i, 0] = s0
        out[i, 1] = s1


@njit(cache=True, nogil=True)
def _k_cumsum(stack, out):
    # exclusive prefix sums along the first axis of (J, N, 2)
    for i in range(stack.shape[1]):
        s0 = _Z
        s1 = _Z
        for j in range(stack.shape[0]):
            out[j, i, 0] = s0
            out[j, i, 1] = s1
            s0, s1 = _add(s0, s1, stack[j, i, 0], stack[j, i, 1])


@njit(cache=True, nogil=True)
def _k_from_i64(x, out):
    for i in range(x.shape[0]):
        v = x[i]
        if v >= 0:
            out[i, 0] = np.uint64(v)
            out[i, 1] = _Z
        else:
            # |v| < 2^63 except for int64 min, handled through uint64 wraparound
            m = np.uint64(-(v + 1)) + _S1
            out[i, 0] = _M64 - m
            out[i, 1] = _M63


@njit(cache=True, nogil=True)
def _k_to_i64(a, out):
    """Signed lift; returns False if some value does not fit in int64."""
    ok = True
    for i in range(a.shape[0]):
        lo = a[i, 0]
        hi = a[i, 1]
        if hi == _Z and lo <= _M63:
            out[i] = np.int64(lo)
        elif hi == _M63 and lo >= (_M64 - _M63):
            # value - p = -(p - value)
            m = _M64 - lo
            out[i] = -np.int64(m)
        else:
            ok = False
            out[i] = 0
    return ok


@njit(cache=True, nogil=True)
def _k_pow(a, e_bits, out):
    # e_bits: exponent bits, most significant first
    for i in range(out.shape[0]):
        r0 = _S1
        r1 = _Z
        b0 = a[i, 0]
        b1 = a[i, 1]
        for t in range(e_bits.shape[0]):
            r0, r1 = _mul(r0, r1, r0, r1)
            if e_bits[t]:
                r0, r1 = _mul(r0, r1, b0, b1)
        out[i, 0] = r0
        out[i, 1] = r1


@njit(cache=True, nogil=True)
def _k_inv_batch(a, e_bits, out):
    # Montgomery's trick: one exponentiation for the whole batch.
    n = a.shape[0]
    acc0 = _S1
    acc1 = _Z
    for i in range(n):
        out[i, 0] = acc0
        out[i, 1] = acc1
        if not (a[i, 0] == _Z and a[i, 1] == _Z):
            acc0, acc1 = _mul(acc0, acc1, a[i, 0], a[i, 1])
    r0 = _S1
    r1 = _Z
    for t in range(e_bits.shape[0]):
        r0, r1 = _mul(r0, r1, r0, r1)
        if e_bits[t]:
            r0, r1 = _mul(r0, r1, acc0, acc1)
    for i in range(n - 1, -1, -1):
        if a[i, 0] == _Z and a[i, 1] == _Z:
            out[i, 0] = _Z
            out[i, 1] = _Z
            continue
        p0 = out[i, 0]
        p1 = out[i, 1]
        out[i, 0], out[i, 1] = _mul(r0, r1, p0, p1)
        r0, r1 = _mul(r0, r1, a[i, 0], a[i, 1])


@njit(cache=True, nogil=True)
def _k_low_bits(a, m, out):
    # a mod 2^m for m <= 126 is not needed in general; callers use m <= 63
    mask = (_S1 << np.uint64(m)) - _S1 if m < 64 else _M64
    for i in range(a.shape[0]):
        out[i] = a[i, 0] & mask


# --------------------------------------------------------------------------
# numpy-facing API

def empty(shape) -> np.ndarray:
    return np.empty(tuple(shape) + (2,), dtype=np.uint64)


def zeros(shape) -> np.ndarray:
    return np.zeros(tuple(shape) + (2,), dtype=np.uint64)


def shape_of(a: np.ndarray) -> tuple:
    return a.shape[:-1]


def _flat(a):
    return np.ascontiguousarray(a).reshape(-1, 2)


def _bcast2(a, b):
    if a.shape == b.shape:
        return a, b
    shp = np.broadcast_shapes(a.shape, b.shape)
    if a.shape != shp:
        a = np.array(np.broadcast_to(a, shp))
    if b.shape != shp:
        b = np.array(np.broadcast_to(b, shp))
    return a, b


def _binary(kernel, a, b):
    a, b = _bcast2(a, b)
    out = empty(a.shape[:-1])
    kernel(_flat(a), _flat(b), out.reshape(-1, 2))
    return out


def add(a, b):
    return _binary(_k_add, a, b)


def sub(a, b):
    return _binary(_k_sub, a, b)


def mul(a, b):
    return _binary(_k_mul, a, b)


def neg(a):
    out = empty(a.shape[:-1])
    _k_neg(_flat(a), out.reshape(-1, 2))
    return out


def dot(coef, stack):
    """``sum_j coef[j] * stack[j]`` for field vectors ``coef`` (J,2) and ``stack`` (J,...,2)."""
    coef = _flat(coef)
    J = coef.shape[0]
    inner = stack.shape[1:-1]
    out = empty(inner)
    _k_dot(coef, np.ascontiguousarray(stack).reshape(J, -1, 2), out.reshape(-1, 2))
    return out


def cumsum_exclusive(stack):
    """``out[j] = sum_{i<j} stack[i]`` along the first axis."""
    stack = np.ascontiguousarray(stack)
    J = stack.shape[0]
    out = np.empty_like(stack)
    _k_cumsum(stack.reshape(J, -1, 2), out.reshape(J, -1, 2))
    return out


def pow_(a, e: int):
    bits = np.array([int(c) for c in bin(e)[2:]], dtype=np.uint8)
    out = empty(a.shape[:-1])
    _k_pow(_flat(a), bits, out.reshape(-1, 2))
    return out


_INV_BITS = np.array([int(c) for c in bin(P - 2)[2:]], dtype=np.uint8)


def inv(a):
    """Multiplicative inverses (batched, one exponentiation); zero maps to zero."""
    out = empty(a.shape[:-1])
    _k_inv_batch(_flat(a), _INV_BITS, out.reshape(-1, 2))
    return out


def sqrt(a):
    """A square root of each quadratic residue (p = 3 mod 4)."""
    return pow_(a, (P + 1) // 4)


def from_int(x) -> np.ndarray:
    """Embed integers (Python ints or integer arrays, any sign) into the field."""
    arr = np.asarray(x)
    if arr.dtype.kind in "iu" and (arr.dtype.itemsize < 8 or arr.dtype.kind == "i"):
        flat = np.ascontiguousarray(arr, dtype=np.int64).reshape(-1)
        out = empty(arr.shape)
        _k_from_i64(flat, out.reshape(-1, 2))
        return out
    flat = arr.reshape(-1)
    out = empty(arr.shape)
    o = out.reshape(-1, 2)
    for i, v in enumerate(flat.tolist()):
        v = int(v) % P
        o[i, 0] = v & 0xFFFFFFFFFFFFFFFF
        o[i, 1] = v >> 64
    return out


def to_uint(a) -> np.ndarray:
    """Canonical representatives in [0, p) as a Python-int object array."""
    f = _flat(a)
    vals = [int(lo) | (int(hi) << 64) for lo, hi in f.tolist()]
    out = np.empty(len(vals), dtype=object)
    out[:] = vals
    return out.reshape(a.shape[:-1])


def to_int(a):
    """Signed lift to (-p/2, p/2].  Returns int64 when it fits, else objects.

    Scalars (shape ``(2,)``) come back as a Python int.
    """
    scalar = a.ndim == 1
    f = _flat(a)
    out = np.empty(f.shape[0], dtype=np.int64)
    if _k_to_i64(f, out):
        res = out.reshape(a.shape[:-1])
    else:
        u = to_uint(a).reshape(-1)
        res = np.array([v - P if v > HALF else v for v in u], dtype=object).reshape(a.shape[:-1])
    if scalar:
        return int(res[()])
    return res


def low_bits(a, m: int) -> np.ndarray:
    """``value mod 2**m`` of canonical elements as uint64 (m <= 64)."""
    if m > 64:
        raise ValueError("low_bits supports m <= 64")
    f = _flat(a)
    out = np.empty(f.shape[0], dtype=np.uint64)
    _k_low_bits(f, m, out)
    return out.reshape(a.shape[:-1])


def random(rng, shape) -> np.ndarray:
    """Uniform field elements from ``rng.words`` (p folds to 0; bias 2**-127)."""
    shape = tuple(shape)
    raw = rng.words(2 * int(np.prod(shape, dtype=np.int64))).reshape(shape + (2,))
    raw[..., 1] &= _M63
    # fold p to 0
    hit = (raw[..., 1] == _M63) & (raw[..., 0] == _M64)
    raw[hit] = 0
    return raw


def random_bounded(rng, shape, bits: int) -> np.ndarray:
    """Uniform integers in [0, 2**bits) embedded in the field (bits <= 126)."""
    shape = tuple(shape)
    raw = rng.words(2 * int(np.prod(shape, dtype=np.int64))).reshape(shape + (2,))
    if bits <= 64:
        raw[..., 1] = 0
        if bits < 64:
            raw[..., 0] &= np.uint64((1 << bits) - 1)
    else:
        raw[..., 1] &= np.uint64((1 << (bits - 64)) - 1)
    return raw


def const(v: int) -> np.ndarray:
    """A single field element as a (2,) array."""
    return from_int(np.array(int(v) % P, dtype=object))


def encode_bytes(a) -> bytes:
    return np.ascontiguousarray(a, dtype="<u8").tobytes()


def decode_bytes(buf, shape) -> np.ndarray:
    return np.frombuffer(buf, dtype="<u8").astype(np.uint64).reshape(tuple(shape) + (2,))
