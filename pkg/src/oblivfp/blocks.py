"""Building blocks over shared integers and fixed-point values.

Every function takes SArrays (see :mod:`oblivfp.engine`) and works in both
engines.  Independent work inside one call is batched so that it costs
one round; callers get more parallelism by stacking their inputs.

Conventions: integers have ``frac == 0``, fixed-point values ``frac == k``;
comparison ``bits`` is a bound on the bit length of the compared
difference (smaller is cheaper); indices are 0-based.
"""

from __future__ import annotations

import math

import numpy as np

from .engine import SArray, cat, prefix_or_msb, stack
from .errors import ConfigError

GOLDSCHMIDT_INIT = (2.9142, 2)     # 1/b ~ 2.9142 - 2b on [1/2, 1)


def _bcast(c: SArray, x: SArray) -> SArray:
    """Reshape ``c`` so it broadcasts against ``x`` along x's trailing axes."""
    extra = x.ndim - c.ndim
    return c if extra <= 0 else c.reshape(c.shape + (1,) * extra)


def _lead(x: SArray, sl) -> SArray:
    """``x[sl]`` on axis 0 for any rank."""
    return x[sl]


# ------------------------------------------------------------------ arithmetic

def s_add(a: SArray, b: SArray) -> SArray:
    return a + b


def s_sub(a: SArray, b: SArray) -> SArray:
    return a - b


def s_mul_int(a: SArray, b: SArray) -> SArray:
    if a.frac or b.frac:
        raise ConfigError("s_mul_int expects integer operands")
    return a.E.mul(a, b)


def s_mul_fx(a: SArray, b: SArray) -> SArray:
    """Product truncated back to ``k`` fractional bits (one multiplication + one truncation)."""
    E = a.E
    with E.label("s_mul_fx"):
        return E.fxmul(a, b, frac=E.fmt.k)


def s_int2fp(a: SArray) -> SArray:
    return a.upscale(a.E.fmt.k)


def s_fp2int(a: SArray) -> SArray:
    """Floor toward minus infinity (always exact, whatever the truncation mode)."""
    E = a.E
    with E.label("s_fp2int"):
        return E.trunc(a, a.frac, bits=E.fmt.ell, exact=True)


# ----------------------------------------------------------------- comparison

def _cmp_bits(E, a: SArray, b, bits):
    return bits or E.fmt.ell + 1


def s_lt(a: SArray, b, bits: int | None = None) -> SArray:
    """Shared bit [a < b]; ``bits`` bounds the bit length of ``a - b``."""
    d = a - b
    E = d.E
    with E.label("s_lt"):
        return E.ltz(d, _cmp_bits(E, a, b, bits))


def s_eq(a: SArray, b, bits: int | None = None) -> SArray:
    d = a - b
    E = d.E
    with E.label("s_eq"):
        return E.eqz(d, _cmp_bits(E, a, b, bits))


def s_ifthen(c: SArray, x, y) -> SArray:
    """``c ? x : y`` as ``c * (x - y) + y``; free when x and y are both public."""
    if not isinstance(x, SArray):
        x = y.E.const(x, y.frac) if isinstance(y, SArray) else c.E.const(x, 0)
    if not isinstance(y, SArray):
        y = x.E.const(y, x.frac)
    diff = x - y
    return c.E.mul(_bcast(c, diff), diff) + y


def ifthen_many(c: SArray, pairs):
    """Several oblivious selections under one condition, in one round."""
    E = c.E
    diffs = [x - y for x, y in pairs]
    prods = E.mul_many([(_bcast(c, d), d) for d in diffs])
    return [p + y for p, (_, y) in zip(prods, pairs)]


def s_and(a: SArray, b: SArray) -> SArray:
    return a.E.mul(a, b)


def s_or(a: SArray, b: SArray) -> SArray:
    return a + b - a.E.mul(a, b)


def s_not(a: SArray) -> SArray:
    return 1 - a


# --------------------------------------------------------------- prefix ops

def s_premul(a: SArray, m: int) -> list:
    """Powers ``[a, a^2, ..., a^m]`` using m-1 multiplications in ceil(log2 m) levels."""
    E = a.E
    if m < 1:
        raise ConfigError("premul needs m >= 1")
    pows = {1: a}
    have = 1
    with E.label("s_premul"):
        while have < m:
            idx = [i for i in range(1, have + 1) if i + have <= m]
            res = E.fxmul_many([(pows[i], pows[have]) for i in idx], frac=a.frac)
            for i, r in zip(idx, res):
                pows[i + have] = r
            have *= 2
    return [pows[i] for i in range(1, m + 1)]


def s_prefix_mul(xs: SArray) -> SArray:
    """Prefix products along axis 0 of distinct values (Sklansky, log m levels)."""
    E = xs.E
    m = xs.shape[0]
    cols = [xs[i] for i in range(m)]
    step = 1
    with E.label("s_premul"):
        while step < m:
            tgt, anc = [], []
            for start in range(0, m, 2 * step):
                a = start + step - 1
                if a >= m:
                    continue
                for j in range(start + step, min(start + 2 * step, m)):
                    tgt.append(j)
                    anc.append(a)
            if tgt:
                prod = E.fxmul(stack([cols[j] for j in tgt]), stack([cols[j] for j in anc]),
                               frac=xs.frac)
                for n, j in enumerate(tgt):
                    cols[j] = prod[n]
            step *= 2
    return stack(cols)


# ------------------------------------------------------------------ min / max

def s_minmax(keys: SArray, payloads=(), mode: str = "min", bits: int | None = None):
    """Tournament over axis 0.  Returns ``(key, index, payloads)``; ties keep the lower index.

    ``keys`` may carry extra batch axes; payload arrays share the leading
    axis (and batch axes) with the keys.
    """
    if mode not in ("min", "max"):
        raise ConfigError("mode must be 'min' or 'max'")
    E = keys.E
    m = keys.shape[0]
    if m < 1:
        raise ConfigError("minmax of an empty sequence")
    idx = E.const(np.arange(m).reshape((m,) + (1,) * (keys.ndim - 1))).broadcast_to(keys.shape)
    recs = [keys, idx] + list(payloads)
    with E.label("s_minmax"):
        while m > 1:
            h = m // 2
            L = [r[0:2 * h:2] for r in recs]
            R = [r[1:2 * h:2] for r in recs]
            if mode == "min":
                c = s_lt(R[0], L[0], bits)
            else:
                c = s_lt(L[0], R[0], bits)
            new = ifthen_many(c, list(zip(R, L)))
            if m % 2:
                new = [cat([n, r[m - 1:m]]) for n, r in zip(new, recs)]
            recs = new
            m = recs[0].shape[0]
    out = [r[0] for r in recs]
    return out[0], out[1], out[2:]


# ----------------------------------------------------------------- compaction

def s_compact(flags: SArray, payloads):
    """Stable oblivious compaction: flagged rows move to the front, others become zero.

    ``flags`` has shape (m,); each payload has leading axis m.  Returns a
    list of arrays in the same order as ``payloads``.
    """
    E = flags.E
    m = flags.shape[0]
    payloads = list(payloads)
    with E.label("s_compact"):
        zeroed = E.mul_many([(_bcast(flags, p), p) for p in payloads]
                            + [(flags, E.const(np.arange(m)) - flags.cumsum_exclusive())])
        z = zeroed[-1]
        cur = zeroed[:-1]
        L = max(0, math.ceil(math.log2(m))) if m > 1 else 0
        if L == 0:
            return cur
        zb = E.bitdec(z, L)                    # shift amount, LSB first
        rest = [zb[:, j] for j in range(1, L)]
        for lev in range(L):
            s = 1 << lev
            b = zb[:, lev] if lev == 0 else rest.pop(0)
            moving = cur + rest
            P = E.mul_many([(_bcast(b, x), x) for x in moving])
            new = []
            for x, p in zip(moving, P):
                shifted = cat([p[s:], E.zeros((min(s, m),) + p.shape[1:], p.frac)]) if s < m \
                    else E.zeros(p.shape, p.frac)
                new.append(x - p + shifted)
            cur = new[:len(cur)]
            rest = new[len(cur):]
    return cur


# -------------------------------------------------------------------- sorting

def oddeven_merge_layers(n: int):
    """Comparator layers of Batcher's odd-even merge sort for n = 2^t inputs."""
    layers = []
    p = 1
    while p < n:
        k = p
        while k >= 1:
            layer = []
            for j in range(k % p, n - k, 2 * k):
                for i in range(min(k, n - j - k)):
                    if (i + j) // (2 * p) == (i + j + k) // (2 * p):
                        layer.append((i + j, i + j + k))
            if layer:
                layers.append(layer)
            k //= 2
        p *= 2
    return layers


def s_sort(keys: SArray, payloads=(), bits: int | None = None):
    """Sort rows by key (nondecreasing) with Batcher's network; payload rows follow.

    The input is padded to a power of two with +infinity sentinels whose
    positions are tracked publicly, so comparisons against them are free.
    """
    E = keys.E
    m = keys.shape[0]
    recs = [keys] + list(payloads)
    size = 1 << max(0, math.ceil(math.log2(max(m, 1))))
    if size > m:
        recs = [cat([r, E.zeros((size - m,) + r.shape[1:], r.frac)]) for r in recs]
    sent = np.array([False] * m + [True] * (size - m))
    with E.label("s_sort"):
        for layer in oddeven_merge_layers(size):
            perm = np.arange(size)
            I, J = [], []
            for i, j in layer:
                if sent[j]:
                    continue                       # sentinel stays on top
                if sent[i]:
                    perm[i], perm[j] = j, i        # publicly known swap
                    sent[i], sent[j] = False, True
                    continue
                I.append(i)
                J.append(j)
            if (perm != np.arange(size)).any():
                recs = [r[perm] for r in recs]
            if not I:
                continue
            I, J = np.array(I), np.array(J)
            ki, kj = recs[0][I], recs[0][J]
            c = s_lt(kj, ki, bits)
            diffs = E.mul_many([(_bcast(c, r[J] - r[I]), r[J] - r[I]) for r in recs])
            new = []
            amap = np.arange(size)
            amap[I] = size + np.arange(len(I))
            amap[J] = size + len(I) + np.arange(len(J))
            for r, d in zip(recs, diffs):
                new.append(cat([r, r[I] + d, r[J] - d])[amap])
            recs = new
    if sent[:m].any():
        raise AssertionError("sentinel left the padding region")
    out = [r[0:m] for r in recs]
    return out[0], out[1:]


# --------------------------------------------------------------------- lookup

def s_lookup(array, index: SArray, bits: int | None = None):
    """``array[index]`` for a shared 0-based index; ``array`` rows may be public or shared.

    ``array`` is an SArray (or a list of them) with leading axis m.
    """
    arrays = array if isinstance(array, (list, tuple)) else [array]
    E = index.E
    m = arrays[0].shape[0]
    bits = bits or max(2, math.ceil(math.log2(m + 1)) + 1)
    with E.label("s_lookup"):
        j = E.const(np.arange(m).reshape((m,) + (1,) * index.ndim))
        eq = E.eqz(index.reshape((1,) + index.shape) - j, bits)      # (m, *index.shape)
        outs = []
        pairs = []
        for a in arrays:
            a_b = a.reshape(a.shape[:1] + (1,) * index.ndim + a.shape[1:]) if index.ndim else a
            pairs.append((_bcast(eq, a_b), a_b))
        prods = E.mul_many(pairs)
        for p in prods:
            outs.append(p.sum(axis=0))
    return outs if isinstance(array, (list, tuple)) else outs[0]


# ------------------------------------------------------- normalization, division

def norm_onehot(a: SArray) -> SArray:
    """One-hot vector of the most significant set bit of ``a >= 0`` (raw bits 0..ell-2)."""
    E = a.E
    nb = E.fmt.ell - 1
    bd = E.bitdec(a.with_frac(0), nb)
    f = prefix_or_msb(E, bd)
    lead = (slice(None),) * (f.ndim - 1)
    nxt = cat([f[lead + (slice(1, None),)], E.zeros(f.shape[:-1] + (1,))], axis=-1)
    return f - nxt


def _onehot_sum(y: SArray, coeffs, frac: int) -> SArray:
    """Public linear combination sum_i y_i * coeffs[i] with the result read at ``frac``."""
    c = np.empty(len(coeffs), dtype=object)
    c[:] = [int(v) for v in coeffs]
    return (y * c.reshape((1,) * (y.ndim - 1) + (len(coeffs),))).sum(axis=-1).with_frac(frac)


def norm_parts(a: SArray):
    """``(a', y)`` with ``a = a' * 2^w``, ``a'`` in [1/2, 1) at ell-1 fractional bits."""
    E = a.E
    ell, k = E.fmt.ell, E.fmt.k
    y = norm_onehot(a)
    nb = ell - 1
    P = _onehot_sum(y, [1 << (ell - 2 - i) for i in range(nb)], 0)
    ap = E.mul(a.with_frac(0), P).with_frac(ell - 1)
    return ap, y


def msb_exponents(fmt):
    """w for each possible most significant bit position i: a in [2^w/2, 2^w)."""
    return [i + 1 - fmt.k for i in range(fmt.ell - 1)]


def s_div(a: SArray, b: SArray, xi: int | None = None) -> SArray:
    """Fixed-point quotient ``a / b`` for ``b != 0``.

    The divisor's magnitude is normalized to [1/2, 1); Goldschmidt's
    iteration (xi = ceil(log2(ell / 3.5)) rounds) gives its reciprocal, and
    one residual step ``q += (a - q b) / b`` computed at 2k fractional bits
    removes the relative error left by the k-bit reciprocal.
    """
    E = a.E
    fmt = E.fmt
    ell, k = fmt.ell, fmt.k
    xi = xi or math.ceil(math.log2(ell / 3.5))
    a = a.upscale(k) if a.frac < k else a
    b = b.upscale(k) if b.frac < k else b
    with E.label("s_div"):
        s = E.ltz(b, ell)
        sgn = 1 - 2 * s
        babs = E.mul(sgn, b)
        bprime, y = norm_parts(babs)
        ws = msb_exponents(fmt)
        scale = _onehot_sum(y, [1 << (k - w) for w in ws], k)          # 2^-w
        bk = E.trunc(bprime, ell - 1 - k, bits=ell)
        c0, c1 = GOLDSCHMIDT_INIT
        yv = E.const(c0, k) - bk * c1
        x = 1 - E.fxmul(bk, yv, frac=k)
        for it in range(xi):
            if it < xi - 1:
                yv, x = E.fxmul_many([(yv, 1 + x), (x, x)], frac=k)
            else:
                yv = E.fxmul(yv, 1 + x, frac=k)
        rcp = E.fxmul(yv, scale, frac=k)
        q0 = E.fxmul(a, rcp, frac=k)
        e2k = a.upscale(2 * k) - E.mul(q0, babs)
        corr = E.trunc(E.mul(e2k, rcp), 2 * k, bits=ell + k + 2)
        q = q0 + corr
        return E.mul(sgn, q)
