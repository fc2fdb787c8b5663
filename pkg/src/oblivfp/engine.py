"""Values and the two execution engines behind them.

Protocol code is written once against :class:`SArray` and an engine:

* :class:`SecureEngine` keeps Shamir shares inside a party context and
  runs the masked-opening sub-protocols (truncation, comparison, bit
  decomposition) over the network;
* :class:`PlainEngine` keeps exact Python integers and evaluates the same
  primitives directly.  With floor truncation it is bit-compatible with
  the secure engine in exact-truncation mode, which makes it the oracle.

An ``SArray`` stores raw integers with ``frac`` fractional bits; ``frac``
is 0 for integers and ``k`` for ordinary fixed-point numbers.  Public
constants are SArrays with ``public=True``; mixing them with secret
values never costs interaction.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from fractions import Fraction
from numbers import Integral, Real

import numpy as np

from . import field as F
from .errors import ConfigError, RangeError
from .fixedpoint import DEFAULT_FORMAT, FxFormat, const_raw
from .prg import XofRng


def _is_int_like(x) -> bool:
    if isinstance(x, (bool, Integral)):
        return True
    if isinstance(x, np.ndarray):
        if x.dtype.kind in "iub":
            return True
        return x.dtype == object and (x.size == 0 or isinstance(x.flat[0], Integral))
    return False


def _obj(x) -> np.ndarray:
    """Python-int object array from ints/int arrays."""
    a = np.asarray(x)
    if a.dtype == object:
        return a
    out = np.empty(a.shape, dtype=object)
    out[...] = a.tolist() if a.ndim else int(a)
    return out


class SArray:
    """A (possibly secret) array of fixed-point or integer values."""

    __slots__ = ("E", "v", "frac", "public")
    __array_priority__ = 1000

    def __init__(self, E: "Engine", v, frac: int = 0, public: bool = False):
        self.E, self.v, self.frac, self.public = E, v, frac, public

    # ------------------------------------------------------------------ shape
    @property
    def shape(self) -> tuple:
        return self.E._shape(self.v)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    def __len__(self):
        return self.shape[0]

    def _new(self, v, frac=None, public=None):
        return SArray(self.E, v, self.frac if frac is None else frac,
                      self.public if public is None else public)

    def __getitem__(self, key):
        return self._new(self.E._take(self.v, key))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return self._new(self.E._reshape(self.v, shape))

    def flatten(self):
        return self.reshape(-1)

    def moveaxis(self, src, dst):
        nd = self.ndim
        return self._new(self.E._moveaxis(self.v, src % nd, dst % nd))

    def broadcast_to(self, shape):
        return self._new(self.E._broadcast(self.v, tuple(shape)))

    def sum(self, axis=0):
        return self._new(self.E._sum(self.v, axis % self.ndim))

    def cumsum_exclusive(self):
        """Running sums along axis 0, excluding the current element (linear)."""
        return self._new(self.E._cumsum_ex(self.v))

    def with_frac(self, frac: int):
        """Reinterpret the raw integers with a different scale (no arithmetic)."""
        return self._new(self.v, frac=frac)

    def upscale(self, frac: int):
        """Same value, more fractional bits (exact, free)."""
        if frac < self.frac:
            raise ValueError("upscale cannot drop bits; use a truncation")
        if frac == self.frac:
            return self
        return self._new(self.E._scale(self.v, 1 << (frac - self.frac)), frac=frac)

    # ------------------------------------------------------------ arithmetic
    def _coerce(self, other):
        if isinstance(other, SArray):
            if other.E is not self.E:
                raise ConfigError("operands belong to different engines")
            return other
        return self.E.const(other, self.frac)

    def _aligned(self, other):
        o = self._coerce(other)
        f = max(self.frac, o.frac)
        return self.upscale(f), o.upscale(f)

    def __add__(self, other):
        a, b = self._aligned(other)
        return SArray(self.E, self.E._add(a.v, b.v), a.frac, a.public and b.public)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._aligned(other)
        return SArray(self.E, self.E._sub(a.v, b.v), a.frac, a.public and b.public)

    def __rsub__(self, other):
        a, b = self._aligned(other)
        return SArray(self.E, self.E._sub(b.v, a.v), a.frac, a.public and b.public)

    def __neg__(self):
        return self._new(self.E._neg(self.v))

    def __mul__(self, other):
        if isinstance(other, SArray):
            return self.E.mul(self, other)
        if _is_int_like(other):
            return self._new(self.E._scale(self.v, other))
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        kind = "public" if self.public else "secret"
        return f"SArray({kind}, shape={self.shape}, frac={self.frac}, engine={type(self.E).__name__})"


def cat(arrays, axis: int = 0) -> SArray:
    """Concatenate along ``axis``; fractions are aligned upward."""
    arrays = list(arrays)
    E = arrays[0].E
    f = max(a.frac for a in arrays)
    arrays = [a.upscale(f) for a in arrays]
    nd = arrays[0].ndim
    return SArray(E, E._cat([a.v for a in arrays], axis % nd), f, all(a.public for a in arrays))


def stack(arrays, axis: int = 0) -> SArray:
    arrays = list(arrays)
    E = arrays[0].E
    f = max(a.frac for a in arrays)
    arrays = [a.upscale(f) for a in arrays]
    nd = arrays[0].ndim + 1
    return SArray(E, E._stack([a.v for a in arrays], axis % nd), f, all(a.public for a in arrays))


# ============================================================================
# engine interface

class Engine:
    """Shared logic; subclasses supply storage and the interactive primitives."""

    fmt: FxFormat

    # constants -----------------------------------------------------------
    def const(self, value, frac: int = 0) -> SArray:
        """Public constant: ints are exact, reals are rounded to nearest."""
        if isinstance(value, SArray):
            return value
        if _is_int_like(value):
            raw = _obj(value)
            if frac:
                raw = raw * (1 << frac)
            return SArray(self, self._lift(raw), frac, True)
        arr = np.asarray(value, dtype=object)
        raw = np.empty(arr.shape, dtype=object)
        for idx, v in np.ndenumerate(arr):
            if not isinstance(v, (Real, Fraction, str)) and not hasattr(v, "_mpf_"):
                raise TypeError(f"cannot encode {v!r}")
            raw[idx] = const_raw(v, frac)
        return SArray(self, self._lift(raw), frac, True)

    def const_raw(self, raw, frac: int = 0) -> SArray:
        return SArray(self, self._lift(_obj(raw)), frac, True)

    def zeros(self, shape, frac: int = 0) -> SArray:
        return self.const_raw(np.zeros(shape, dtype=np.int64), frac)

    def ones(self, shape, frac: int = 0) -> SArray:
        return self.const(np.ones(shape, dtype=np.int64), frac)

    def label(self, name: str):
        return nullcontext()

    # derived primitives ---------------------------------------------------
    def mul_many(self, pairs):
        return [self.mul(a, b) for a, b in pairs]

    def fxmul(self, a: SArray, b: SArray, frac: int | None = None, bits: int | None = None):
        """Product rescaled to ``frac`` fractional bits (default: the larger input)."""
        p = self.mul(a, b)
        return self.rescale(p, max(a.frac, b.frac) if frac is None else frac, bits)

    def fxmul_many(self, pairs, frac: int | None = None):
        prods = self.mul_many(pairs)
        targets = [max(a.frac, b.frac) if frac is None else frac for a, b in pairs]
        return self.rescale_many(prods, targets)

    def rescale(self, x: SArray, frac: int, bits: int | None = None, exact=None) -> SArray:
        if x.frac == frac:
            return x
        if x.frac < frac:
            return x.upscale(frac)
        return self.trunc(x, x.frac - frac, bits=bits, exact=exact)

    def rescale_many(self, xs, fracs, exact=None):
        """Truncate several arrays in one batch (same round structure as one)."""
        todo = [(i, x, f) for i, (x, f) in enumerate(zip(xs, fracs)) if x.frac > f]
        out = [x.upscale(f) if x.frac <= f else None for x, f in zip(xs, fracs)]
        groups = {}
        for i, x, f in todo:
            groups.setdefault((x.frac - f, x.public), []).append(i)
        for (m, _), idxs in groups.items():
            flat = cat([xs[i].flatten() for i in idxs])
            res = self.trunc(flat, m, exact=exact)
            pos = 0
            for i in idxs:
                n = xs[i].size
                out[i] = res[pos:pos + n].reshape(xs[i].shape)
                pos += n
        return out

    def default_bits(self, m: int) -> int:
        """Input bound for truncating an ordinary product by ``m`` bits."""
        return self.fmt.ell + m


# ============================================================================
# plaintext engine

class PlainEngine(Engine):
    """Exact integer evaluation with floor truncation; the protocol oracle."""

    def __init__(self, fmt: FxFormat = DEFAULT_FORMAT, seed=0, check_ranges: bool = True,
                 kappa: int = 48):
        self.fmt = fmt
        self.rng = XofRng(f"plain/{seed}")
        self.check_ranges = check_ranges
        self.kappa = kappa
        self.pid = 1
        self.openings = []

    # storage
    def _shape(self, v):
        return v.shape

    def _take(self, v, key):
        r = v[key]
        return r if isinstance(r, np.ndarray) else _obj(r)

    def _cat(self, vs, axis):
        return np.concatenate(vs, axis=axis)

    def _stack(self, vs, axis):
        return np.stack(vs, axis=axis)

    def _reshape(self, v, shape):
        return v.reshape(shape)

    def _moveaxis(self, v, s, d):
        return np.moveaxis(v, s, d)

    def _broadcast(self, v, shape):
        return np.broadcast_to(v, shape)

    def _sum(self, v, axis):
        if v.shape[axis] == 0:
            return _obj(np.zeros(v.shape[:axis] + v.shape[axis + 1:], dtype=np.int64))
        return _obj(np.sum(v, axis=axis))

    def _cumsum_ex(self, v):
        out = np.empty(v.shape, dtype=object)
        if v.shape[0]:
            out[0] = 0
            out[1:] = np.cumsum(v, axis=0)[:-1]
        return out

    def _add(self, a, b):
        return _obj(np.add(a, b))

    def _sub(self, a, b):
        return _obj(np.subtract(a, b))

    def _neg(self, a):
        return _obj(np.negative(a))

    def _scale(self, a, c):
        return _obj(np.multiply(a, _obj(c)))

    def _lift(self, raw):
        return _obj(raw)

    # helpers
    def _check(self, v, lo, hi, what):
        if self.check_ranges and v.size:
            mn, mx = min(v.flat), max(v.flat)
            if mn < lo or mx >= hi:
                raise RangeError(f"{what}: value outside [{lo}, {hi}) (min {mn}, max {mx})")

    # primitives
    def mul(self, a: SArray, b: SArray) -> SArray:
        return SArray(self, _obj(np.multiply(a.v, b.v)), a.frac + b.frac, a.public and b.public)

    def open(self, a: SArray, kind: str = "reveal") -> np.ndarray:
        if kind == "reveal":
            self.openings.append((kind, a.size))
        return a.v.copy()

    def trunc(self, x: SArray, m: int, bits: int | None = None, exact=None) -> SArray:
        if m == 0:
            return x
        bits = bits or self.default_bits(m)
        self._check(x.v, -(1 << (bits - 1)), 1 << (bits - 1), f"truncation input ({bits} bits)")
        return SArray(self, _obj(np.right_shift(x.v, m)), x.frac - m, x.public)

    def ltz(self, x: SArray, bits: int | None = None) -> SArray:
        bits = bits or self.fmt.ell
        self._check(x.v, -(1 << (bits - 1)), 1 << (bits - 1), f"comparison input ({bits} bits)")
        return SArray(self, _obj((x.v < 0).astype(np.int64)), 0, x.public)

    def eqz(self, x: SArray, bits: int | None = None) -> SArray:
        bits = bits or self.fmt.ell
        self._check(x.v, -(1 << (bits - 1)), 1 << (bits - 1), f"equality input ({bits} bits)")
        return SArray(self, _obj((x.v == 0).astype(np.int64)), 0, x.public)

    def bitdec(self, x: SArray, bits: int) -> SArray:
        self._check(x.v, 0, 1 << bits, f"bit decomposition input ({bits} bits)")
        out = np.empty(x.shape + (bits,), dtype=object)
        for i in range(bits):
            out[..., i] = np.bitwise_and(np.right_shift(x.v, i), 1)
        return SArray(self, out, 0, x.public)

    def rand_bits(self, shape) -> SArray:
        n = int(np.prod(shape, dtype=np.int64))
        w = self.rng.words(n) & np.uint64(1)
        return SArray(self, _obj(w.astype(np.int64).reshape(shape)), 0, False)

    def input(self, owner: int, shape, raw=None, frac: int = 0) -> SArray:
        return SArray(self, _obj(np.asarray(raw).reshape(shape)), frac, False)


# ============================================================================
# secure engine

class SecureEngine(Engine):
    """Shamir-shared evaluation inside a :class:`~oblivfp.runtime.PartyContext`."""

    def __init__(self, ctx, fmt: FxFormat | None = None, kappa: int | None = None):
        self.ctx = ctx
        self.fmt = fmt or ctx.fmt
        self.kappa = kappa if kappa is not None else ctx.cfg.kappa
        self.pid = ctx.pid
        self.min_kappa = self.kappa
        self._inv2 = F.const(pow(2, F.P - 2, F.P))
        self._inv_pow2 = {}

    def label(self, name: str):
        return self.ctx.label(name)

    # storage
    def _shape(self, v):
        return v.shape[:-1]

    def _take(self, v, key):
        if isinstance(key, tuple) and any(k is Ellipsis for k in key):
            raise IndexError("Ellipsis indexing is not supported on shared arrays")
        if key is Ellipsis:
            raise IndexError("Ellipsis indexing is not supported on shared arrays")
        return v[key]

    def _cat(self, vs, axis):
        return np.concatenate(vs, axis=axis)

    def _stack(self, vs, axis):
        return np.stack(vs, axis=axis)

    def _reshape(self, v, shape):
        return np.ascontiguousarray(v).reshape(tuple(shape) + (2,))

    def _moveaxis(self, v, s, d):
        return np.moveaxis(v, s, d)

    def _broadcast(self, v, shape):
        return np.array(np.broadcast_to(v, tuple(shape) + (2,)))

    def _sum(self, v, axis):
        moved = np.moveaxis(v, axis, 0)
        if moved.shape[0] == 0:
            return F.zeros(moved.shape[1:-1])
        ones = F.from_int(np.ones(moved.shape[0], dtype=np.int64))
        return F.dot(ones, moved)

    def _cumsum_ex(self, v):
        return F.cumsum_exclusive(v)

    def _add(self, a, b):
        return F.add(a, b)

    def _sub(self, a, b):
        return F.sub(a, b)

    def _neg(self, a):
        return F.neg(a)

    def _scale(self, a, c):
        return F.mul(a, self._lift(c))

    def _lift(self, raw):
        raw = np.asarray(raw)
        if raw.dtype == object:
            try:
                raw = raw.astype(np.int64)
            except OverflowError:
                return F.from_int(raw)
        elif raw.dtype == np.uint64 or raw.dtype == bool:
            raw = raw.astype(object) if raw.dtype == np.uint64 else raw.astype(np.int64)
        return F.from_int(raw)

    # helpers
    def _public_ints(self, x: SArray) -> np.ndarray:
        return F.to_int(x.v) if x.v.ndim > 1 else np.array(F.to_int(x.v), dtype=object)

    def _kappa_eff(self, bits: int) -> int:
        k = min(self.kappa, 126 - bits - self.ctx.prss_slack_bits - 1)
        if k < 8:
            raise ConfigError(f"a {bits}-bit masked opening does not fit the field")
        self.min_kappa = min(self.min_kappa, k)
        return k

    def _pow2_inv(self, m: int):
        if m not in self._inv_pow2:
            self._inv_pow2[m] = F.const(pow(1 << m, F.P - 2, F.P))
        return self._inv_pow2[m]

    @staticmethod
    def _low(c: np.ndarray, m: int) -> np.ndarray:
        """``c mod 2**m`` of opened field arrays as Python ints (object array)."""
        if m <= 62:
            return _obj(F.low_bits(c, m).astype(np.int64))
        u = F.to_uint(c)
        return _obj(np.vectorize(lambda z: z % (1 << m), otypes=[object])(u)) if u.size else u

    @staticmethod
    def _bits_of(c: np.ndarray, m: int) -> np.ndarray:
        """Bit matrix (..., m) of nonnegative Python ints, LSB first, as int64."""
        flat = np.asarray(c).reshape(-1)         # 0-d object arrays would decay to scalars
        out = np.empty(flat.shape + (m,), dtype=np.int64)
        for i in range(m):
            out[:, i] = np.asarray(np.bitwise_and(np.right_shift(flat, i), 1), dtype=np.int64)
        return out.reshape(np.shape(c) + (m,))

    def _weighted_bits(self, rb: SArray) -> SArray:
        m = rb.shape[-1]
        w = _obj(np.array([1 << i for i in range(m)], dtype=object))
        return (rb * w.reshape((1,) * (rb.ndim - 1) + (m,))).sum(axis=-1)

    # primitives
    def mul(self, a: SArray, b: SArray) -> SArray:
        return self.mul_many([(a, b)])[0]

    def mul_many(self, pairs):
        out = [None] * len(pairs)
        secret = []
        for i, (a, b) in enumerate(pairs):
            if a.public or b.public:
                out[i] = SArray(self, F.mul(a.v, b.v), a.frac + b.frac, a.public and b.public)
            else:
                av, bv = F._bcast2(a.v, b.v)
                secret.append((i, av, bv))
        if secret:
            with self.ctx.label("mul"):
                res, _ = self.ctx.interact(mults=[(av, bv) for _, av, bv in secret])
            for (i, _, _), r in zip(secret, res):
                a, b = pairs[i]
                out[i] = SArray(self, r, a.frac + b.frac, False)
        return out

    def open(self, a: SArray, kind: str = "reveal") -> np.ndarray:
        if a.public:
            return self._public_ints(a)
        _, [o] = self.ctx.interact(opens=[(a.v, kind)])
        return F.to_int(o) if o.ndim > 1 else np.array(F.to_int(o), dtype=object)

    def rand_bits(self, shape) -> SArray:
        """Uniform shared bits: open r*r and divide r by a square root of it."""
        shape = tuple(shape)
        n = int(np.prod(shape, dtype=np.int64))
        with self.ctx.label("rand_bits"):
            r = self.ctx.prss_field((n,))
            [s], _ = self.ctx.interact(mults=[(r, r)])
            _, [sv] = self.ctx.interact(opens=[(s, "masked")])
            zero = (sv[:, 0] == 0) & (sv[:, 1] == 0)
            if zero.any():  # probability ~ n / 2^127
                again = self.rand_bits((int(zero.sum()),))
                out = F.empty((n,))
                ok = ~zero
                ir = F.inv(F.sqrt(sv[ok]))
                out[ok] = F.mul(F.add(F.mul(r[ok], ir), F.const(1)), self._inv2)
                out[zero] = again.v
                return SArray(self, out.reshape(shape + (2,)), 0, False)
            ir = F.inv(F.sqrt(sv))
            b = F.mul(F.add(F.mul(r, ir), F.const(1)), self._inv2)
        return SArray(self, b.reshape(shape + (2,)), 0, False)

    def _mask_open(self, x: SArray, m: int, bits: int, offset: int, label: str):
        """Open ``x + offset + r' + 2^m r''``; returns (c mod 2^m, r' bits, r')."""
        kap = self._kappa_eff(bits)
        shape = x.shape
        rb = self.rand_bits(shape + (m,))
        r1 = self._weighted_bits(rb)
        hi_bits = max(1, bits + kap - m)
        r2 = F.mul(self.ctx.prss_int(shape, hi_bits), F.const(1 << m))
        masked = F.add(F.add(x.v, r1.v), r2)
        masked = F.add(masked, F.const(offset))
        _, [c] = self.ctx.interact(opens=[(masked, "masked")])
        return self._low(c, m), rb, r1

    def trunc(self, x: SArray, m: int, bits: int | None = None, exact=None) -> SArray:
        """floor(x / 2^m) (exact) or floor + Bernoulli(fraction) (probabilistic)."""
        if m == 0:
            return x
        bits = bits or self.default_bits(m)
        if exact is None:
            exact = self.ctx.trunc_exact
        if x.public:
            raw = _obj(self._public_ints(x))
            return SArray(self, F.from_int(_obj(np.right_shift(raw, m))), x.frac - m, True)
        if m >= bits:
            raise ConfigError("truncation by at least the input width")
        with self.ctx.label("trunc" if exact else "truncpr"):
            c_low, rb, r1 = self._mask_open(x, m, bits, 1 << (bits - 1), "trunc")
            xmod = self.const_raw(c_low) - r1
            if exact:
                u = bit_lt_public(self, c_low, rb)
                xmod = xmod + u * (1 << m)
            y = SArray(self, F.mul((x.with_frac(0) - xmod).v, self._pow2_inv(m)), x.frac - m, False)
        return y

    def ltz(self, x: SArray, bits: int | None = None) -> SArray:
        bits = bits or self.fmt.ell
        if x.public:
            return SArray(self, F.from_int((self._public_ints(x) < 0).astype(np.int64)), 0, True)
        with self.ctx.label("ltz"):
            y = self.trunc(x.with_frac(0), bits - 1, bits=bits, exact=True)
        return -y.with_frac(0)

    def eqz(self, x: SArray, bits: int | None = None) -> SArray:
        bits = bits or self.fmt.ell
        if x.public:
            return SArray(self, F.from_int((self._public_ints(x) == 0).astype(np.int64)), 0, True)
        with self.ctx.label("eqz"):
            c_low, rb, _ = self._mask_open(x.with_frac(0), bits, bits + 1, 1 << bits, "eqz")
            cb = self._bits_of(c_low, bits)
            # bit i agrees: c_i ? r_i : 1 - r_i
            agree = rb * (2 * cb - 1) + self.const_raw(1 - cb)
            z = product_tree(self, agree)
        return z

    def bitdec(self, x: SArray, bits: int) -> SArray:
        """Bits (LSB first) of ``x`` in ``[0, 2^bits)``: masked opening plus ripple borrow."""
        if x.public:
            raw = _obj(self._public_ints(x))
            return self.const_raw(self._bits_of(raw, bits))
        with self.ctx.label("bitdec"):
            c_low, rb, _ = self._mask_open(x.with_frac(0), bits, bits + 1, 0, "bitdec")
            cb = self._bits_of(c_low, bits)
            outs = []
            c0 = self.const_raw(cb[..., 0])
            r0 = _last(rb, 0)
            outs.append(xor_pub(r0, c0))
            borrow = r0 * self.const_raw(1 - cb[..., 0])
            for i in range(1, bits):
                ri = _last(rb, i)
                ci = self.const_raw(cb[..., i])
                rbp = self.mul(ri, borrow)
                t = ri + borrow - rbp * 2
                outs.append(xor_pub(t, ci))
                if i < bits - 1:
                    borrow = rbp + (ri + borrow - rbp * 2) * self.const_raw(1 - cb[..., i])
            res = stack(outs, axis=-1)
        return res

    def input(self, owner: int, shape, raw=None, frac: int = 0) -> SArray:
        vals = F.from_int(_obj(np.asarray(raw).reshape(shape))) if self.pid == owner else None
        v = self.ctx.input(owner, tuple(shape), vals)
        return SArray(self, v, frac, False)


# ============================================================================
# generic bit helpers (work in either engine)

def _last(x: SArray, i: int) -> SArray:
    """``x[..., i]`` without Ellipsis."""
    idx = (slice(None),) * (x.ndim - 1) + (i,)
    return x[idx]


def xor_pub(x: SArray, c: SArray) -> SArray:
    """XOR of a shared bit with a public bit (linear: the product is local)."""
    return x + c - x * c * 2


def or_many(E: Engine, pairs):
    """Elementwise OR of bit pairs, all in one round."""
    prods = E.mul_many(pairs)
    return [a + b - p for (a, b), p in zip(pairs, prods)]


def prefix_or_msb(E: Engine, bits: SArray) -> SArray:
    """f[..., i] = OR of bits[..., j] for j >= i (Sklansky, log m rounds)."""
    m = bits.shape[-1]
    cols = [_last(bits, i) for i in range(m)][::-1]   # index 0 is the MSB
    step = 1
    while step < m:
        targets, anchors = [], []
        for start in range(0, m, 2 * step):
            anchor = start + step - 1
            if anchor >= m:
                continue
            for j in range(start + step, min(start + 2 * step, m)):
                targets.append(j)
                anchors.append(anchor)
        if targets:
            a = stack([cols[j] for j in targets], axis=-1)
            b = stack([cols[j] for j in anchors], axis=-1)
            (r,) = or_many(E, [(a, b)])
            for n, j in enumerate(targets):
                cols[j] = _last(r, n)
        step *= 2
    return stack(cols[::-1], axis=-1)


def bit_lt_public(E: Engine, c, rbits: SArray) -> SArray:
    """[c < r] for public integers ``c`` and shared bits of ``r`` (LSB first)."""
    m = rbits.shape[-1]
    cb = SecureEngine._bits_of(_obj(np.asarray(c)), m)
    cpub = E.const_raw(cb)
    e = rbits + cpub - rbits * (cpub * 2)
    f = prefix_or_msb(E, e)
    zero = E.zeros(f.shape[:-1] + (1,))
    g = f - cat([f[(slice(None),) * (f.ndim - 1) + (slice(1, None),)], zero], axis=-1)
    return (g * _obj(1 - cb)).sum(axis=-1)


def product_tree(E: Engine, x: SArray) -> SArray:
    """Product over the last axis in ceil(log2 m) rounds."""
    while x.shape[-1] > 1:
        m = x.shape[-1]
        h = m // 2
        lead = (slice(None),) * (x.ndim - 1)
        a = x[lead + (slice(0, 2 * h, 2),)]
        b = x[lead + (slice(1, 2 * h, 2),)]
        p = E.mul(a, b)
        if m % 2:
            p = cat([p, x[lead + (slice(m - 1, m),)]], axis=-1)
        x = p
    return _last(x, 0)
