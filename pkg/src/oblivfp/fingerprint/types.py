"""Templates, parameters and result records for the fingerprint pipelines.

Coordinates and values are exact: integers for minutiae, ``Fraction``
for fixed-point quantities (so a template file roundtrips losslessly and
encodes to the same raw integers in every format that can hold it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from ..errors import ConfigError
from ..fixedpoint import DEFAULT_FORMAT, FxFormat, _floor_scaled, const_raw


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class Minutia:
    x: int
    y: int
    theta: int

    def __post_init__(self):
        for name in ("x", "y", "theta"):
            if not isinstance(getattr(self, name), (int, np.integer)):
                raise ConfigError(f"minutia {name} must be an integer")
        if not 0 <= self.theta < 360:
            raise ConfigError(f"orientation {self.theta} outside [0, 360)")


@dataclass(frozen=True)
class HighCurvaturePoint:
    x: Fraction
    y: Fraction
    w: Fraction

    def __post_init__(self):
        for name in ("x", "y", "w"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if not 0 <= self.w <= 2:
            raise ConfigError(f"curvature {self.w} outside [0, 2]")


@dataclass(frozen=True)
class MatchThresholds:
    """Squared distance bound and orientation bound (degrees); both strict."""

    lam2: int = 9
    lam_theta: int = 5

    def __post_init__(self):
        if self.lam2 <= 0 or self.lam_theta <= 0:
            raise ConfigError("match thresholds must be positive")


@dataclass(frozen=True)
class MinutiaeTemplate:
    minutiae: tuple

    def __post_init__(self):
        object.__setattr__(self, "minutiae", tuple(self.minutiae))
        if not self.minutiae:
            raise ConfigError("a template needs at least one minutia")

    def __len__(self):
        return len(self.minutiae)

    def array(self) -> np.ndarray:
        """(m, 3) int64 array of x, y, theta."""
        return np.array([[p.x, p.y, p.theta] for p in self.minutiae], dtype=np.int64)


@dataclass(frozen=True)
class HCTemplate:
    """Minutiae plus high curvature points."""

    minutiae: tuple
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "minutiae", tuple(self.minutiae))
        object.__setattr__(self, "points", tuple(self.points))
        if not self.minutiae or not self.points:
            raise ConfigError("a template needs minutiae and high curvature points")

    def minutiae_array(self) -> np.ndarray:
        return MinutiaeTemplate(self.minutiae).array()

    def points_raw(self, fmt: FxFormat = DEFAULT_FORMAT) -> np.ndarray:
        """(n, 3) object array of raw fixed-point x, y, w."""
        out = np.empty((len(self.points), 3), dtype=object)
        for i, p in enumerate(self.points):
            out[i] = [fmt.check(_floor_scaled(v, fmt.k)) for v in (p.x, p.y, p.w)]
        return out


@dataclass(frozen=True)
class SpectralTemplate:
    """M' x N' complex features (real parts ``a``, imaginary parts ``b``) and width N."""

    a: np.ndarray
    b: np.ndarray
    N: int

    def __post_init__(self):
        a = np.asarray(self.a, dtype=object)
        b = np.asarray(self.b, dtype=object)
        if a.ndim != 2 or a.shape != b.shape or min(a.shape) < 1:
            raise ConfigError("spectral parts must be equal-shaped non-empty matrices")
        a = np.vectorize(_frac, otypes=[object])(a)
        b = np.vectorize(_frac, otypes=[object])(b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.N < 2 * a.shape[1]:
            raise ConfigError(f"N={self.N} must be at least 2N'={2 * a.shape[1]}")

    @property
    def dims(self) -> tuple:
        return self.a.shape

    def raw(self, fmt: FxFormat = DEFAULT_FORMAT):
        enc = np.vectorize(lambda v: fmt.check(_floor_scaled(v, fmt.k)), otypes=[object])
        return enc(self.a), enc(self.b)

    def __eq__(self, other):
        return (isinstance(other, SpectralTemplate) and self.N == other.N
                and self.a.shape == other.a.shape
                and bool((self.a == other.a).all()) and bool((self.b == other.b).all()))


SHIFT_MIN, SHIFT_MAX = -17, 18


@dataclass(frozen=True)
class RotationTable:
    """Public coefficients z[alpha, j] = (cos, sin)(-2 pi j alpha / N) as raws."""

    n_cols: int
    N: int
    k: int
    cos: np.ndarray
    sin: np.ndarray

    @classmethod
    def build(cls, n_cols: int, N: int, fmt: FxFormat = DEFAULT_FORMAT) -> "RotationTable":
        alphas = range(SHIFT_MIN, SHIFT_MAX + 1)
        c = np.empty((len(alphas), n_cols), dtype=object)
        s = np.empty((len(alphas), n_cols), dtype=object)
        with mpmath.workprec(4 * fmt.ell):
            for r, al in enumerate(alphas):
                for j in range(1, n_cols + 1):
                    ang = -2 * mpmath.pi * j * al / N
                    c[r, j - 1] = const_raw(mpmath.cos(ang), fmt.k)
                    s[r, j - 1] = const_raw(mpmath.sin(ang), fmt.k)
        return cls(n_cols, N, fmt.k, c, s)

    def row(self, alpha: int):
        r = alpha - SHIFT_MIN
        if not 0 <= r < self.cos.shape[0]:
            raise ConfigError(f"shift {alpha} outside [{SHIFT_MIN}, {SHIFT_MAX}]")
        return self.cos[r], self.sin[r]


@dataclass(frozen=True)
class HighCurvatureParams:
    """f pairs kept per iteration, gamma iterations, curvature weight beta, box sizes."""

    f: int
    gamma: int = 2
    beta: Fraction = Fraction(64)
    boxes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "beta", _frac(self.beta))
        object.__setattr__(self, "boxes", tuple(_frac(b) for b in self.boxes))
        if self.f < 1 or self.gamma < 1:
            raise ConfigError("need f >= 1 and gamma >= 1")
        if len(self.boxes) != self.gamma:
            raise ConfigError(f"expected {self.gamma} bounding boxes, got {len(self.boxes)}")
        if any(b2 > b1 for b1, b2 in zip(self.boxes, self.boxes[1:])):
            raise ConfigError("bounding boxes must be nonincreasing")

    @classmethod
    def with_default_boxes(cls, f: int, gamma: int, points, beta=64) -> "HighCurvatureParams":
        """Boxes start at 4x the median nearest-neighbour distance and halve each iteration."""
        pts = [(float(p.x), float(p.y)) for p in points]
        nn = []
        for i, (x, y) in enumerate(pts):
            d = [math.hypot(x - u, y - v) for j, (u, v) in enumerate(pts) if j != i]
            if d:
                nn.append(min(d))
        med = sorted(nn)[len(nn) // 2] if nn else 1.0
        start = Fraction(max(1, round(4 * med)))
        return cls(f, gamma, beta, tuple(start / (1 << i) for i in range(gamma)))


@dataclass
class MotionTransform:
    """Rigid motion p -> R p + v (floats, decoded from fixed point)."""

    R: np.ndarray
    v: np.ndarray

    def apply(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.R.T + self.v


@dataclass
class PipelineResult:
    """Outputs of one pipeline run, decoded, plus optional costs."""

    protocol: str
    values: dict
    costs: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


__all__ = ["Minutia", "HighCurvaturePoint", "MatchThresholds", "MinutiaeTemplate", "HCTemplate",
           "SpectralTemplate", "RotationTable", "HighCurvatureParams", "MotionTransform",
           "PipelineResult", "SHIFT_MIN", "SHIFT_MAX"]
