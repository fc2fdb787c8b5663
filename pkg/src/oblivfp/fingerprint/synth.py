"""Reproducible synthetic templates, optionally with a planted transform.

Every generator takes an integer seed and returns the same templates for
the same arguments.  Planted variants also return a ``truth`` dict
describing the transform that produced the probe.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import ConfigError
from .types import HCTemplate, HighCurvaturePoint, Minutia, MinutiaeTemplate, SpectralTemplate

HC_GRID = 8            # high curvature coordinates are multiples of 2^-8


def _rng(seed, tag):
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, sum(map(ord, tag))])


def _spread_points(rng, count, extent, min_sep):
    """``count`` integer points in [0, extent)^2 at least ``min_sep`` apart."""
    pts = []
    for _ in range(200 * count):
        p = rng.integers(0, extent, size=2)
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) >= min_sep for q in pts):
            pts.append((int(p[0]), int(p[1])))
            if len(pts) == count:
                return pts
    raise ConfigError(f"cannot place {count} points {min_sep} apart in a {extent} box")


def gen_minutiae(m: int, seed: int = 0, extent: int = 256, min_sep: int = 12) -> MinutiaeTemplate:
    if m < 1:
        raise ConfigError("need m >= 1")
    rng = _rng(seed, "minutiae")
    pts = _spread_points(rng, m, extent, min_sep)
    th = rng.integers(0, 360, size=m)
    return MinutiaeTemplate([Minutia(x, y, int(t)) for (x, y), t in zip(pts, th)])


def rotate_minutiae(tpl: MinutiaeTemplate, angle: int, center=(0, 0), shift=(0, 0)):
    """Rotate by ``angle`` degrees about ``center`` then translate; coordinates round to nearest."""
    c, s = math.cos(math.radians(angle)), math.sin(math.radians(angle))
    out = []
    for p in tpl.minutiae:
        dx, dy = p.x - center[0], p.y - center[1]
        x = center[0] + c * dx - s * dy + shift[0]
        y = center[1] + s * dx + c * dy + shift[1]
        out.append(Minutia(int(round(x)), int(round(y)), (p.theta + angle) % 360))
    return MinutiaeTemplate(out)


def planted_minutiae(m: int, n: int | None = None, seed: int = 0, kind: str = "rotate",
                     extent: int = 256, noise: int = 1):
    """Gallery T and probe S.

    ``kind``: ``identity``, ``translate`` (shift only), ``rotate`` (rotation
    about a reference minutia plus a shift) or ``perturb`` (rotation, shift,
    coordinate/orientation jitter of up to ``noise`` and ``n - m`` spurious
    minutiae).  Returns ``(T, S, truth)``.
    """
    n = m if n is None else n
    T = gen_minutiae(m, seed, extent)
    rng = _rng(seed, "plant/" + kind)
    truth = {"kind": kind, "angle": 0, "shift": (0, 0), "center": (0, 0)}
    if kind == "identity":
        S = T
    elif kind == "translate":
        sh = tuple(int(v) for v in rng.integers(-20, 21, size=2))
        truth["shift"] = sh
        S = rotate_minutiae(T, 0, shift=sh)
    elif kind in ("rotate", "perturb"):
        ang = int(rng.integers(-10, 11))
        ref = T.minutiae[int(rng.integers(0, m))]
        sh = tuple(int(v) for v in rng.integers(-20, 21, size=2))
        truth.update(angle=ang, shift=sh, center=(ref.x, ref.y))
        S = rotate_minutiae(T, ang, center=(ref.x, ref.y), shift=sh)
        if kind == "perturb":
            mins = []
            for p in S.minutiae:
                j = rng.integers(-noise, noise + 1, size=3)
                mins.append(Minutia(p.x + int(j[0]), p.y + int(j[1]), (p.theta + int(j[2])) % 360))
            S = MinutiaeTemplate(mins)
    else:
        raise ConfigError(f"unknown planted kind {kind!r}")
    mins = list(S.minutiae[:n])
    if n > m:
        mins += list(gen_minutiae(n - m, seed + 7919, extent).minutiae)
    return T, MinutiaeTemplate(mins), truth


def _dyadic(v: float) -> Fraction:
    return Fraction(round(v * (1 << HC_GRID)), 1 << HC_GRID)


def gen_hc(m: int, m_hat: int, seed: int = 0, extent: int = 200) -> HCTemplate:
    """Minutiae plus ``m_hat`` high curvature points on a 2^-8 grid."""
    rng = _rng(seed, "hc")
    mins = gen_minutiae(m, seed, extent).minutiae
    pts = _spread_points(rng, m_hat, extent, 10)
    ws = rng.integers(0, 2 << HC_GRID, size=m_hat, endpoint=True)
    hc = [HighCurvaturePoint(_dyadic(x + rng.random()), _dyadic(y + rng.random()),
                             Fraction(int(w), 1 << HC_GRID)) for (x, y), w in zip(pts, ws)]
    return HCTemplate(mins, hc)


def planted_hc(m: int, m_hat: int, seed: int = 0, kind: str = "perturb", noise: float = 1.0):
    """Gallery and probe with high curvature points.

    ``identity`` copies the gallery; ``translate`` shifts every point;
    ``perturb`` applies a small rotation about the centre plus a shift and
    jitters coordinates and curvatures.
    """
    T = gen_hc(m, m_hat, seed)
    rng = _rng(seed, "planthc/" + kind)
    truth = {"kind": kind, "angle": 0, "shift": (0, 0)}
    if kind == "identity":
        return T, T, truth
    if kind == "translate":
        sh = tuple(int(v) for v in rng.integers(-6, 7, size=2))
        ang = 0
    elif kind == "perturb":
        sh = tuple(int(v) for v in rng.integers(-6, 7, size=2))
        ang = int(rng.integers(-4, 5))
    else:
        raise ConfigError(f"unknown planted kind {kind!r}")
    truth.update(angle=ang, shift=sh)
    cx = sum(p.x for p in T.minutiae) / len(T.minutiae)
    cy = sum(p.y for p in T.minutiae) / len(T.minutiae)
    c, s = math.cos(math.radians(ang)), math.sin(math.radians(ang))
    jit = noise if kind == "perturb" else 0.0

    def move(x, y):
        dx, dy = float(x) - float(cx), float(y) - float(cy)
        return float(cx) + c * dx - s * dy + sh[0], float(cy) + s * dx + c * dy + sh[1]

    mins = []
    for p in T.minutiae:
        x, y = move(p.x, p.y)
        mins.append(Minutia(int(round(x)), int(round(y)), (p.theta + ang) % 360))
    pts = []
    for p in T.points:
        x, y = move(p.x, p.y)
        x += jit * (rng.random() - 0.5)
        y += jit * (rng.random() - 0.5)
        w = min(2.0, max(0.0, float(p.w) + jit * 0.05 * (rng.random() - 0.5)))
        pts.append(HighCurvaturePoint(_dyadic(x), _dyadic(y), _dyadic(w)))
    return T, HCTemplate(mins, pts), truth


def _spectral_parts(rng, M, Nc, k, scale=0.7):
    mag = rng.uniform(0, scale, size=(M, Nc))
    ph = rng.uniform(0, 2 * math.pi, size=(M, Nc))
    a = mag * np.cos(ph)
    b = mag * np.sin(ph)
    b[:, 0] = 0.0                      # the first column is real
    return a, b


def _to_dyadic(arr, k):
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Fraction(int(round(v * (1 << k))), 1 << k)
    return out


def gen_spectral(M: int, Nc: int, N: int | None = None, seed: int = 0, k: int = 32,
                 scale: float = 0.7) -> SpectralTemplate:
    """Random complex features with magnitude below ``scale`` on a 2^-k grid."""
    N = N or 2 * Nc
    rng = _rng(seed, "spectral")
    a, b = _spectral_parts(rng, M, Nc, k, scale)
    return SpectralTemplate(_to_dyadic(a, k), _to_dyadic(b, k), N)


def shift_spectral(tpl: SpectralTemplate, alpha: int, k: int = 32) -> SpectralTemplate:
    """Column j multiplied by exp(+2 pi i j alpha / N): scores of the pair peak at ``alpha``."""
    M, Nc = tpl.dims
    a = np.array(tpl.a, dtype=float)
    b = np.array(tpl.b, dtype=float)
    j = np.arange(1, Nc + 1)
    ph = 2 * math.pi * j * alpha / tpl.N
    c, s = np.cos(ph), np.sin(ph)
    return SpectralTemplate(_to_dyadic(a * c - b * s, k), _to_dyadic(a * s + b * c, k), tpl.N)


def planted_spectral(M: int, Nc: int, alpha: int, seed: int = 0, N: int | None = None,
                     k: int = 32):
    """Template pair whose correlation has a single peak at shift ``alpha``.

    The default width N = 75 N' keeps every score within the searched
    range on the rising side of that peak.
    """
    N = N or 75 * Nc
    T = gen_spectral(M, Nc, N, seed, k)
    return T, shift_spectral(T, alpha, k), {"alpha": alpha, "N": N}


__all__ = ["gen_minutiae", "planted_minutiae", "rotate_minutiae", "gen_hc", "planted_hc",
           "gen_spectral", "shift_spectral", "planted_spectral", "HC_GRID"]
