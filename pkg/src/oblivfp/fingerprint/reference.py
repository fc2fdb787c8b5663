"""Direct plaintext interpreters, independent of the engine code.

They loop over the textbook algorithms with Python integers.  Only the
sine/cosine values are shared with the pipelines (taken from the
plaintext engine), so agreement checks the oblivious restructuring:
batched reference pairs, masked distances, one-hot bookkeeping, private
lookups.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..engine import PlainEngine
from ..fixedpoint import DEFAULT_FORMAT, FxFormat
from ..numerics import s_cos, s_sin
from .types import MatchThresholds, RotationTable, SHIFT_MIN, SpectralTemplate


@lru_cache(maxsize=8)
def trig_table(fmt: FxFormat = DEFAULT_FORMAT, precision: int | None = None):
    """Raw sin and cos of every integer degree as the pipelines compute them."""
    E = PlainEngine(fmt)
    deg = E.const(np.arange(360))
    return (tuple(int(v) for v in s_sin(deg, precision).v),
            tuple(int(v) for v in s_cos(deg, precision).v))


def greedy_match(T, S, thr: MatchThresholds) -> int:
    """Pair each t_i with the closest unused s_j passing both thresholds."""
    used = [False] * len(S)
    count = 0
    for x, y, th in T:
        best, best_d = None, None
        for j, (x2, y2, th2) in enumerate(S):
            if used[j]:
                continue
            d = (x - x2) ** 2 + (y - y2) ** 2
            a = abs(th - th2)
            if d < thr.lam2 and (a < thr.lam_theta or 360 - a < thr.lam_theta):
                if best_d is None or d < best_d:
                    best, best_d = j, d
        if best is not None:
            used[best] = True
            count += 1
    return count


def geom_trans_reference(T, S, thr: MatchThresholds, fmt: FxFormat = DEFAULT_FORMAT,
                         precision: int | None = None) -> dict:
    """Enumerate every reference pair and keep the first best count."""
    k = fmt.k
    sin_t, cos_t = trig_table(fmt, precision)
    T = [(p.x, p.y, p.theta) for p in T.minutiae]
    S = [(p.x, p.y, p.theta) for p in S.minutiae]
    best = None
    for xi, yi, ti in T:
        for xj, yj, tj in S:
            dth = tj - ti
            phi = dth % 360
            c, s = cos_t[phi], sin_t[phi]
            dx = c * xj + s * yj - (xi << k)
            dy = c * yj - s * xj - (yi << k)
            moved = [((c * x + s * y - dx) >> k, (c * y - s * x - dy) >> k, (th - phi) % 360)
                     for x, y, th in S]
            C = greedy_match(T, moved, thr)
            if best is None or C > best["C_max"]:
                best = {"C_max": C, "dx": dx, "dy": dy, "dtheta": dth}
    return best


def _spectral_cells(T: SpectralTemplate, S: SpectralTemplate, k: int):
    Ta, Tb = T.raw()[0], T.raw()[1]
    Sa, Sb = S.raw()[0], S.raw()[1]
    M, Nc = T.dims
    X = [0] * Nc
    Y = [0] * Nc
    for i in range(M):
        for j in range(Nc):
            a, b, a2, b2 = int(Ta[i, j]), int(Tb[i, j]), int(Sa[i, j]), int(Sb[i, j])
            if j == 0:
                x, y = a * a2, -a * b2
            else:
                x, y = 2 * (a * a2 + b * b2), 2 * (a2 * b - a * b2)
            X[j] += x >> k
            Y[j] += y >> k
    return X, Y


def spectral_scores(T: SpectralTemplate, S: SpectralTemplate, fmt: FxFormat = DEFAULT_FORMAT):
    """Raw score for every shift -17..18 (floor truncation, as the pipeline computes it)."""
    k = fmt.k
    Z = RotationTable.build(T.dims[1], T.N, fmt)
    X, Y = _spectral_cells(T, S, k)
    out = {}
    for alpha in range(SHIFT_MIN, SHIFT_MIN + 36):
        zc, zs = Z.row(alpha)
        out[alpha] = sum(int(c) * x + int(s) * y for c, s, x, y in zip(zc, zs, X, Y)) >> k
    return out


def spectral_search_reference(T: SpectralTemplate, S: SpectralTemplate,
                              fmt: FxFormat = DEFAULT_FORMAT) -> dict:
    """Coarse grid of four shifts, then +-3, then +-1; first maximum wins ties."""
    sc = spectral_scores(T, S, fmt)
    evaluated = []

    def pick(cands):
        evaluated.extend(a for a in cands if a not in evaluated)
        best = cands[0]
        for a in cands[1:]:
            if sc[a] > sc[best]:
                best = a
        return best

    a = pick([-13, -4, 5, 14])
    a = pick([a - 3, a, a + 3])
    a = pick([a - 1, a, a + 1])
    return {"C_max": sc[a], "alpha_max": a, "evaluated": evaluated}


def optimal_motion_float(t: np.ndarray, s: np.ndarray, eps: float = 2.0 ** -28):
    """The quaternion composition in floating point (centred points, s -> t)."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    tb, sb = t.mean(axis=0), s.mean(axis=0)
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for ti, si in zip(t - tb, s - sb):
        nt, ns = np.linalg.norm(ti), np.linalg.norm(si)
        ut = ti / nt if nt >= eps else ti
        us = si / ns if ns >= eps else si
        kk = float(ut @ us)
        cr = np.cross(us, ut)
        cn = np.linalg.norm(cr)
        if cn < eps:
            qi = np.array([1.0, 0.0, 0.0, 0.0])
        else:
            qi = np.concatenate([[math.sqrt(max(0.0, (1 + kk) / 2))],
                                 math.sqrt(max(0.0, (1 - kk) / 2)) * cr / cn])
        q = _qmul(q, qi)
    R = _qrot(q)
    return R, tb - R @ sb


def _qmul(a, b):
    w1, x1, y1, z1 = a
    w2, x2, y2, z2 = b
    return np.array([w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                     w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                     w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                     w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2])


def _qrot(q):
    a, b, c, d = q
    return np.array([[a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
                     [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
                     [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d]])


def closest_points_reference(t: np.ndarray, s: np.ndarray, alpha: float, beta: float):
    """Two-pass greedy pairing in floating point; returns (distances, partner indices)."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    d = np.hypot(t[None, :, 0] - s[:, None, 0], t[None, :, 1] - s[:, None, 1]) \
        + beta * np.abs(t[None, :, 2] - s[:, None, 2])
    free = np.ones(len(t), dtype=bool)
    dist = np.full(len(s), np.inf)
    part = np.full(len(s), -1)
    for bounded in (True, False):
        for i in range(len(s)):
            if part[i] >= 0:
                continue
            cand = np.where(free, d[i], np.inf)
            j = int(np.argmin(cand))
            if not bounded or cand[j] < alpha:
                free[j] = False
                dist[i], part[i] = cand[j], j
    return dist, part


__all__ = ["trig_table", "greedy_match", "geom_trans_reference", "spectral_scores",
           "spectral_search_reference", "optimal_motion_float", "closest_points_reference"]
