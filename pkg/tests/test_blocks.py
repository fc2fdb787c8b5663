import numpy as np
import pytest

from oblivfp import blocks as B
from oblivfp.execute import run_secure
from oblivfp.fixedpoint import DEFAULT_FORMAT, encode

from conftest import K, ONE, both, fx


def _pair(a, b, frac=0):
    a, b = np.asarray(a, dtype=object), np.asarray(b, dtype=object)

    def inputs(E):
        return E.input(1, a.shape, a, frac=frac), E.input(2, b.shape, b, frac=frac)
    return inputs


def _check(fn, a, b, frac=0, exact=True):
    inputs = _pair(a, b, frac)
    plain, sec, _ = both(lambda E: fn(*inputs(E)), exact=exact)
    return plain, sec


def test_add_sub_examples():
    p, s = _check(lambda a, b: B.s_add(a, b), [2, 7], [3, -7])
    assert s.tolist() == p.tolist() == [5, 0]
    p, s = _check(lambda a, b: B.s_sub(a, b), [9, 4], [9, 6])
    assert s.tolist() == [0, -2]


def test_mul_int_examples():
    p, s = _check(lambda a, b: B.s_mul_int(a, b), [3, 0, -6], [4, 12345, 7])
    assert s.tolist() == [12, 0, -42]


def test_mul_fx_examples():
    a = [encode(v).raw for v in (2.0, 1.0, 0.3)]
    b = [encode(v).raw for v in (3.0, 0.7, 0.3)]
    p, s = _check(lambda x, y: B.s_mul_fx(x, y), a, b, frac=K)
    assert s.tolist() == p.tolist()
    assert s[0] == encode(6).raw
    assert abs(s[1] - b[1]) <= 1
    assert abs(fx(s[2]) - 0.09) < 2 ** -31
    _, sp = _check(lambda x, y: B.s_mul_fx(x, y), a, b, frac=K, exact=False)
    assert sp[0] == encode(6).raw
    assert all(abs(int(u) - int(v)) <= 1 for u, v in zip(sp, p))


def test_lt_eq_examples():
    p, s = _check(lambda a, b: B.s_lt(a, b), [3, 5, -1], [5, 5, -2])
    assert s.tolist() == [1, 0, 0]
    p, s = _check(lambda a, b: B.s_eq(a, b), [3, 5, -1], [5, 5, -2])
    assert s.tolist() == [0, 1, 0]


def test_lt_eq_exhaustive_small():
    v = np.arange(-16, 16)
    a, b = np.repeat(v, len(v)), np.tile(v, len(v))
    _, lt = _check(lambda x, y: B.s_lt(x, y, bits=6), a, b)
    _, eq = _check(lambda x, y: B.s_eq(x, y, bits=6), a, b)
    assert lt.tolist() == (a < b).astype(int).tolist()
    assert eq.tolist() == (a == b).astype(int).tolist()


def test_int2fp_fp2int():
    p, s = _check(lambda a, b: B.s_int2fp(a), [3, -2], [0, 0])
    assert s.tolist() == [3 * ONE, -2 * ONE]
    raw = [encode(v).raw for v in (3.75, -1.25, 0.0, -3.0)]
    p, s = _check(lambda a, b: B.s_fp2int(a), raw, [0] * 4, frac=K)
    assert s.tolist() == p.tolist() == [3, -2, 0, -3]


def test_ifthen():
    def prog(E):
        c = E.input(1, (2,), np.array([1, 0], dtype=object))
        x = E.input(2, (2,), np.array([10, 20], dtype=object))
        return B.s_ifthen(c, x, E.const([7, 8]))
    p, s, _ = both(prog)
    assert s.tolist() == [10, 8]


def test_premul():
    def prog(E):
        return [B.s_premul(E.input(1, (), encode(v).raw, frac=K), m)
                for v, m in ((2, 3), (1, 5), (0.5, 4))]
    p, s, _ = both(prog)
    assert [[fx(x).item() for x in row] for row in s] == [[2, 4, 8], [1] * 5,
                                                          [0.5, 0.25, 0.125, 0.0625]]


def test_minmax():
    def prog(E):
        x = E.input(1, (3,), np.array([5, 1, 9], dtype=object))
        y = E.input(1, (2,), np.array([2, 2], dtype=object))
        one = E.input(1, (1,), np.array([4], dtype=object))
        k1, i1, _ = B.s_minmax(x, bits=6)
        k2, i2, _ = B.s_minmax(y, bits=6)
        k3, i3, _ = B.s_minmax(one, mode="max", bits=6)
        return [k1, i1, k2, i2, k3, i3]
    p, s, _ = both(prog)
    assert [int(v) for v in s] == [1, 1, 2, 0, 4, 0]


def test_compact():
    def prog(E):
        f = E.input(1, (3,), np.array([1, 0, 1], dtype=object))
        x = E.input(2, (3,), np.array([11, 22, 33], dtype=object))
        z = E.input(1, (3,), np.array([0, 0, 0], dtype=object))
        return B.s_compact(f, [x])[0], B.s_compact(z, [x])[0]
    p, s, _ = both(prog)
    assert s[0].tolist() == [11, 33, 0] and s[1].tolist() == [0, 0, 0]


def test_compact_random(rng):
    flags = rng.integers(0, 2, 37)
    vals = rng.integers(-1000, 1000, (37, 2))

    def prog(E):
        f = E.input(1, (37,), flags.astype(object))
        x = E.input(2, (37, 2), vals.astype(object))
        return B.s_compact(f, [x])[0]
    p, s, _ = both(prog)
    kept = vals[flags == 1]
    want = np.zeros_like(vals)
    want[:len(kept)] = kept
    assert s.tolist() == p.tolist() == want.tolist()


def test_sort():
    def prog(E):
        a = E.input(1, (3,), np.array([3, 1, 2], dtype=object))
        b = E.input(1, (4,), np.array([1, 2, 3, 4], dtype=object))
        return B.s_sort(a, bits=6)[0], B.s_sort(b, bits=6)[0]
    p, s, _ = both(prog)
    assert s[0].tolist() == [1, 2, 3] and s[1].tolist() == [1, 2, 3, 4]


def test_sort_permutations_with_payload(rng):
    perms = np.stack([rng.permutation(10) for _ in range(100)])

    def prog(E):
        keys = E.input(1, (10, 100), perms.T.astype(object))
        pay = E.input(2, (10, 100), (perms.T * 7).astype(object))
        k, (pl,) = B.s_sort(keys, [pay], bits=6)
        return k, pl
    p, s, _ = both(prog)
    assert s[0].tolist() == np.tile(np.arange(10)[:, None], 100).tolist()
    assert s[1].tolist() == (np.tile(np.arange(10)[:, None], 100) * 7).tolist()


def test_lookup():
    def prog(E):
        arr = E.input(1, (3,), np.array([10, 20, 30], dtype=object))
        one = E.input(1, (1,), np.array([99], dtype=object))
        i = E.input(2, (), 1)
        z = E.input(2, (), 0)
        idx = E.input(2, (8,), np.arange(8).astype(object))
        table = E.input(1, (8,), (np.arange(8) ** 2).astype(object))
        return B.s_lookup(arr, i), B.s_lookup(one, z), B.s_lookup(table, idx)
    p, s, _ = both(prog)
    assert s[0] == 20 and s[1] == 99 and s[2].tolist() == [v * v for v in range(8)]


def test_div_examples():
    a = [encode(v).raw for v in (1.0, 7.0, 1.0, -5.5)]
    b = [encode(v).raw for v in (2.0, 7.0, 3.0, 2.0)]
    p, s = _check(lambda x, y: B.s_div(x, y), a, b, frac=K)
    assert s.tolist() == p.tolist()
    got = fx(s)
    assert abs(got[0] - 0.5) < 2 ** -30 and abs(got[1] - 1) < 2 ** -30
    assert abs(got[2] - 1 / 3) < 2 ** -30 and abs(got[3] + 2.75) < 2 ** -29


def _transcript_shape(h):
    return [[(tag, dst, size) for tag, _, dst, size in t] for t in h.transcripts]


@pytest.mark.parametrize("block", ["lt", "sort", "compact", "lookup", "div"])
def test_transcript_independent_of_inputs(block):
    def make(vals, seed):
        def prog(E):
            x = E.input(1, (8,), vals.astype(object), frac=K if block == "div" else 0)
            if block == "lt":
                return B.s_lt(x, E.const(0), bits=20)
            if block == "sort":
                return B.s_sort(x, bits=20)[0]
            if block == "compact":
                return B.s_compact(B.s_lt(x, E.const(0), bits=20), [x])[0]
            if block == "lookup":
                return B.s_lookup(E.const(np.arange(8) * 3), B.s_lt(x[0], E.const(0), bits=20))
            return B.s_div(E.const(1.0, K), x)
        return run_secure(prog, seed=seed, trunc_exact=False)[1]
    r = np.random.default_rng(2)
    a = r.integers(1, 1 << 17, 8) * r.choice([-1, 1], 8)
    b = r.integers(1, 1 << 17, 8)
    if block == "div":
        a, b = np.abs(a) << 10, b << 5
    assert _transcript_shape(make(a, 1)) == _transcript_shape(make(b, 2))
