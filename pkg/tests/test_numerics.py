import math

import numpy as np
import pytest

from oblivfp import numerics as N
from oblivfp.errors import AbortError, ConfigError
from oblivfp.execute import run_plain, run_secure
from oblivfp.fixedpoint import DEFAULT_FORMAT, encode, ref_eval

from conftest import K, both, fx

TOL = 2.0 ** -24


def _fxin(E, vals, owner=1):
    raw = np.array([encode(v).raw for v in vals], dtype=object)
    return E.input(owner, raw.shape, raw, frac=K)


def test_sin_cos_examples():
    def prog(E):
        a = _fxin(E, [0, 30, 60, 47, 213, 359.5])
        return N.s_sin(a), N.s_cos(a)
    p, s, _ = both(prog, exact=False)
    sin, cos = fx(s[0]), fx(s[1])
    assert abs(sin[0]) < TOL and abs(cos[0] - 1) < TOL
    assert abs(sin[1] - 0.5) < TOL and abs(cos[2] - 0.5) < TOL
    for i, d in enumerate([0, 30, 60, 47, 213, 359.5]):
        assert abs(sin[i] - math.sin(math.radians(d))) < TOL
        assert abs(cos[i] - math.cos(math.radians(d))) < TOL
    assert np.all(sin ** 2 + cos ** 2 <= 1 + 2.0 ** (-K + 6))


def test_integer_degree_input():
    def prog(E):
        return N.s_sin(E.input(1, (3,), np.array([90, 180, 270], dtype=object)))
    p, s, _ = both(prog)
    assert s.tolist() == p.tolist()
    assert np.allclose(fx(s), [1, 0, -1], atol=TOL)


def test_arctan_examples():
    def prog(E):
        return N.s_arctan(_fxin(E, [0, 1, -2.5, 1000, -0.001]))
    p, s, _ = both(prog)
    assert s.tolist() == p.tolist()
    got = fx(s)
    for g, x in zip(got, [0, 1, -2.5, 1000, -0.001]):
        assert abs(g - math.atan(x)) < TOL
    assert abs(got[2] + 1.19028995) < 1e-7


def test_norm_examples():
    def prog(E):
        return N.s_norm(_fxin(E, [0.75, 2.0, 0.375]))
    p, s, _ = both(prog)
    ap, pw, c = s
    ell = DEFAULT_FORMAT.ell
    assert [float(v) / 2 ** (ell - 1) for v in ap] == [0.75, 0.5, 0.75]
    assert fx(pw).tolist() == [1, 0.5, 2]
    assert [int(v) for v in c] == [0, 0, 1]


def test_sqrt_examples():
    def prog(E):
        return N.s_sqrt(_fxin(E, [1, 0.25, 2, 0, 1000]))
    p, s, _ = both(prog)
    assert s.tolist() == p.tolist()
    got = fx(s)
    assert abs(got[0] - 1) < TOL and abs(got[1] - 0.5) < TOL and got[3] == 0
    assert abs(got[2] - math.sqrt(2)) < 1.5 * TOL
    assert abs(got[4] / math.sqrt(1000) - 1) < TOL


def test_select_examples():
    keys = np.array([5, 1, 9, 3, 7], dtype=object)

    def prog(E):
        k = E.input(1, (5,), keys)
        return N.s_select(k, 1, bits=8), N.s_select(k, 3, bits=8)
    p, s, _ = both(prog)
    assert [int(v) for v in s] == [1, 5]


def test_select_large_matches_sort(rng):
    keys = rng.integers(-(1 << 20), 1 << 20, 1024)
    trace = []

    def prog(E):
        return N.s_select(E.input(1, (1024,), keys.astype(object)), 512, bits=22, trace=trace)
    out, h = run_secure(prog, seed=3, trunc_exact=False)
    assert out == sorted(keys.tolist())[511]
    reveals = [o for o in h.openings[0] if o.kind == "reveal"]
    opened = sum(o.count for o in reveals)
    assert all("s_select" in o.label for o in reveals)
    attempts = trace[:len(trace) // 3]         # every party appends its own records
    per_attempt = [1 if r.get("abort") == "t1" else 3 for r in attempts]
    assert opened == sum(per_attempt)


def test_select_rank_validation():
    with pytest.raises(ConfigError):
        run_plain(lambda E: N.s_select(E.const([1, 2, 3]), 4))


def test_select_retry_limit():
    params = N.SelectParams(retry_limit=1, c1=0.01)
    with pytest.raises(AbortError):
        run_plain(lambda E: N.s_select(E.input(1, (64,), np.arange(64).astype(object)), 5,
                                       params, bits=8))


def test_ref_oracle_agreement_sin_fraction():
    def prog(E):
        return N.s_sin(_fxin(E, [47]))
    p, _ = run_plain(prog)
    assert abs(int(p[0]) - ref_eval("sin", 47).raw) < 2 ** (K - 24)
