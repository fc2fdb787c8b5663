import math
from fractions import Fraction

import numpy as np
import pytest

from oblivfp.errors import ConfigError, DomainError
from oblivfp.execute import run_plain
from oblivfp.fingerprint import protocols as P
from oblivfp.fingerprint.reference import (closest_points_reference, greedy_match,
                                           optimal_motion_float)
from oblivfp.fingerprint.types import MatchThresholds

from conftest import K, ONE, both, fx


def _minutiae(E, owner, pts):
    arr = np.asarray(pts, dtype=object).T.copy()
    v = E.input(owner, arr.shape, arr)
    return v[0], v[1], v[2]


def _match(T, S, thr, **kw):
    def prog(E):
        return P.s_match(_minutiae(E, 1, T), _minutiae(E, 2, S), thr, **kw)
    p, s, h = both(prog)
    assert p == s
    return int(s)


def test_match_examples():
    assert _match([(0, 0, 10)], [(3, 4, 15)], MatchThresholds(26, 10)) == 1
    assert _match([(0, 0, 10)], [(3, 4, 15)], MatchThresholds(25, 10)) == 0
    assert _match([(0, 0, 0), (10, 0, 0)], [(1, 0, 0), (2, 0, 0)], MatchThresholds(9, 5)) == 1


def test_match_angle_wraparound():
    assert _match([(0, 0, 358)], [(0, 0, 2)], MatchThresholds(9, 5)) == 1
    assert _match([(0, 0, 358)], [(0, 0, 3)], MatchThresholds(9, 5)) == 0


def test_match_random_against_greedy(rng):
    thr = MatchThresholds(40, 20)
    for _ in range(5):
        T = [(int(a), int(b), int(c)) for a, b, c in zip(rng.integers(0, 20, 6),
                                                         rng.integers(0, 20, 6),
                                                         rng.integers(0, 360, 6))]
        S = [(x + int(d), y + int(e), (t + int(f)) % 360) for (x, y, t), d, e, f in
             zip(T[:5], rng.integers(-4, 5, 5), rng.integers(-4, 5, 5), rng.integers(-25, 26, 5))]
        assert _match(T, S, thr) == greedy_match(T, S, thr)


def test_match_trace_uses_each_probe_once(rng):
    T = [(0, 0, 0), (1, 0, 0), (2, 0, 0), (50, 50, 90)]
    S = [(1, 1, 2), (0, 1, 359), (51, 50, 92)]
    trace = []
    out, _ = run_plain(lambda E: P.s_match(_minutiae(E, 1, T), _minutiae(E, 2, S),
                                           MatchThresholds(9, 5), trace=trace))
    used = np.zeros(len(S), dtype=int)
    for u, onehot in trace:
        used += np.asarray(onehot.v, dtype=int)
        assert int(u.v) == int(np.asarray(onehot.v).sum())
    assert used.max() <= 1 and int(out) == used.sum() == 3


def test_match_rounds_scale_with_m_log_n():
    thr = MatchThresholds()
    rounds = {}
    for m in (2, 4, 8):
        T = [(10 * i, 0, 0) for i in range(m)]
        _, _, h = both(lambda E: P.s_match(_minutiae(E, 1, T), _minutiae(E, 2, T), thr))
        rounds[m] = h.contexts[0].report().rounds
    per = {m: r / (m * max(1, math.log2(m))) for m, r in rounds.items()}
    assert max(per.values()) / min(per.values()) < 3


def _hc_in(E, owner, pts):
    raw = np.array([[int(Fraction(v) * ONE) for v in p] for p in pts], dtype=object)
    return E.input(owner, raw.shape, raw, frac=K)


def _closest(T, S, alpha, beta=1):
    def prog(E):
        return P.s_closest_points(_hc_in(E, 1, T), _hc_in(E, 2, S), alpha, beta)
    p, s, _ = both(prog)
    assert [x.tolist() for x in p] == [x.tolist() for x in s]
    return fx(s[0]), fx(s[1])


def test_closest_points_identity():
    T = [(0, 0, 1), (10, 5, 0.5), (-7, 3, 2)]
    d, tt = _closest(T, T, alpha=100)
    assert np.allclose(d, 0, atol=1e-6)
    assert np.allclose(tt, np.array(T, dtype=float))


def test_closest_points_crossing_is_greedy():
    T = [(0, 0, 0), (10, 0, 0)]
    S = [(6, 0, 0), (11, 0, 0)]
    d, tt = _closest(T, S, alpha=100)
    assert tt[:, 0].tolist() == [10, 0]           # s0 grabs t1 first, s1 takes what is left
    assert np.allclose(d, [4, 11], atol=1e-6)
    rd, rp = closest_points_reference(np.array(T, float), np.array(S, float), 100, 1)
    assert rp.tolist() == [1, 0]


def test_closest_points_small_alpha_uses_second_pass():
    T = [(0, 0, 0), (10, 0, 1), (30, 0, 0)]
    S = [(2, 0, 0), (13, 0, 0.5)]
    d, tt = _closest(T, S, alpha=1)
    rd, rp = closest_points_reference(np.array(T, float), np.array(S, float), 1, 1)
    assert np.allclose(d, rd, atol=1e-6)
    assert tt[:, 0].tolist() == [float(T[j][0]) for j in rp]


def test_closest_points_needs_enough_gallery_points():
    with pytest.raises(ConfigError):
        run_plain(lambda E: P.s_closest_points(_hc_in(E, 1, [(0, 0, 0)]),
                                               _hc_in(E, 2, [(0, 0, 0), (1, 1, 0)]), 5, 1))


def _motion(t, s, strict=False):
    def prog(E):
        return P.s_optimal_motion(_hc_in(E, 1, t), _hc_in(E, 2, s), strict=strict)
    p, sec, _ = both(prog)
    assert [x.tolist() for x in p] == [x.tolist() for x in sec]
    return fx(sec[0]), fx(sec[1])


PTS = [(10, 0, 1), (0, 12, 0.5), (-8, -3, 2), (5, 9, 0)]


def test_optimal_motion_identity():
    R, v = _motion(PTS, PTS)
    assert np.abs(R - np.eye(3)).max() < 1e-6 and np.abs(v).max() < 1e-6


def test_optimal_motion_translation():
    d = np.array([3.5, -2, 0.25])
    moved = [tuple(np.array(p) + d) for p in PTS]
    R, v = _motion(moved, PTS)
    assert np.abs(R - np.eye(3)).max() < 1e-6
    assert np.abs(v - d).max() < 1e-6


def test_optimal_motion_matches_float_oracle(rng):
    ax = rng.normal(size=3)
    ax /= np.linalg.norm(ax)
    th = 0.1
    Kx = np.array([[0, -ax[2], ax[1]], [ax[2], 0, -ax[0]], [-ax[1], ax[0], 0]])
    Rt = np.eye(3) + math.sin(th) * Kx + (1 - math.cos(th)) * Kx @ Kx
    s = [tuple(float(Fraction(round(v * 256), 256)) for v in rng.uniform(-10, 10, 3))
         for _ in range(4)]
    t = [tuple(float(Fraction(round(v * 256), 256)) for v in Rt @ np.array(p)) for p in s]
    R, v = _motion(t, s)
    Rf, vf = optimal_motion_float(np.array(t), np.array(s))
    assert np.abs(R - Rf).max() < 1e-2
    assert np.abs(v - vf).max() < 1e-2


def test_optimal_motion_strict_zero_norm():
    pts = [(1, 1, 1), (1, 1, 1), (1, 1, 1)]
    with pytest.raises(DomainError):
        run_plain(lambda E: P.s_optimal_motion(_hc_in(E, 1, pts), _hc_in(E, 2, pts),
                                               strict=True))


def test_spectral_reachable_shifts_and_tables():
    assert P.reachable_shifts() == set(range(-17, 19))
    assert P.COARSE_SHIFTS == (-13, -4, 5, 14)
    assert P.SCORES_PER_RUN == 8
