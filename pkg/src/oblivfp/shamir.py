"""Shamir (n, t) secret sharing over GF(2**127 - 1).

Scalar API (``share``/``reconstruct``) works on :class:`Share` records;
the array helpers underneath are what the runtime uses, where a party's
share of an array is a field array of the same shape.

>>> cfg = ShamirConfig(5, 2)
>>> shares = share(42, cfg, XofRng(7))
>>> reconstruct(shares[1:4])
42
>>> reconstruct([Share(s.party_id, 2 * s.value) for s in shares[:3]])
84
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from . import field as F
from .errors import ConfigError, OblivError
from .prg import XofRng

P = F.P


@dataclass(frozen=True)
class ShamirConfig:
    n: int = 3
    t: int = 1
    p: int = P
    kappa: int = 48

    def __post_init__(self):
        if self.n < 3:
            raise ConfigError(f"need at least 3 parties, got n={self.n}")
        if not (1 <= self.t and 2 * self.t < self.n):
            raise ConfigError(f"threshold must satisfy 1 <= t < n/2, got n={self.n}, t={self.t}")
        if self.p != P:
            raise ConfigError("only p = 2^127 - 1 is supported")
        if self.n > 255:
            raise ConfigError("party ids must fit in one byte")
        if not 1 <= self.kappa <= 80:
            raise ConfigError("kappa must be in [1, 80]")

    @property
    def n_prss_keys(self) -> int:
        return comb(self.n, self.t)


class ArityError(OblivError, ValueError):
    """Too few (or duplicate) shares for reconstruction."""


@dataclass(frozen=True)
class Share:
    party_id: int
    value: int
    degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % P)

    def wire(self) -> bytes:
        """16-byte little-endian value followed by a 1-byte degree tag."""
        return self.value.to_bytes(16, "little") + bytes([self.degree or 0])

    @classmethod
    def from_wire(cls, party_id: int, buf: bytes) -> "Share":
        if len(buf) != 17:
            raise ValueError("share encoding is 17 bytes")
        return cls(party_id, int.from_bytes(buf[:16], "little"), buf[16])


def _poly_eval(coefs, x):
    acc = 0
    for c in reversed(coefs):
        acc = (acc * x + c) % P
    return acc


def share(x: int, cfg: ShamirConfig, rng: XofRng) -> list[Share]:
    """Degree-t shares of ``x`` (signed ints are embedded mod p)."""
    coefs = [int(x) % P] + [rng.getrandbits(127) % P for _ in range(cfg.t)]
    return [Share(i, _poly_eval(coefs, i), cfg.t) for i in range(1, cfg.n + 1)]


@lru_cache(maxsize=None)
def lagrange_at_zero(ids: tuple) -> tuple:
    """Coefficients ``c_i`` with ``f(0) = sum c_i f(i)`` for the given points."""
    out = []
    for i in ids:
        num, den = 1, 1
        for j in ids:
            if j != i:
                num = num * j % P
                den = den * (j - i) % P
        out.append(num * pow(den, P - 2, P) % P)
    return tuple(out)


def reconstruct(shares, degree: int | None = None) -> int:
    """Lagrange interpolation at zero; result is the signed lift."""
    shares = list(shares)
    ids = tuple(s.party_id for s in shares)
    if len(set(ids)) != len(ids):
        raise ArityError("duplicate party ids")
    need = (degree if degree is not None else shares[0].degree or 0) + 1
    if len(shares) < need or not shares:
        raise ArityError(f"need at least {need} shares, got {len(shares)}")
    lam = lagrange_at_zero(ids)
    v = sum(c * s.value for c, s in zip(lam, shares)) % P
    return v - P if v > P // 2 else v


# ---------------------------------------------------------------------------
# array helpers

@lru_cache(maxsize=None)
def _powers_table(n: int, t: int) -> np.ndarray:
    """Field array (n, t) with entry (j, d) = (j+1)**(d+1)."""
    return F.from_int(np.array([[pow(j, d, P) for d in range(1, t + 1)] for j in range(1, n + 1)], dtype=object))


def share_array(x: np.ndarray, n: int, t: int, rng: XofRng) -> np.ndarray:
    """Shares of every element of field array ``x``: result shape (n, *shape, 2)."""
    shape = F.shape_of(x)
    coefs = F.random(rng, (t,) + shape)
    pw = _powers_table(n, t)
    out = F.empty((n,) + shape)
    for j in range(n):
        acc = x
        for d in range(t):
            acc = F.add(acc, F.mul(coefs[d], pw[j, d]))
        out[j] = acc
    return out


def lagrange_field(ids: tuple) -> np.ndarray:
    return F.from_int(np.array(lagrange_at_zero(tuple(ids)), dtype=object))


def reconstruct_array(stack: np.ndarray, ids) -> np.ndarray:
    """Interpolate at zero from a stack of share arrays, shape (len(ids), *shape, 2)."""
    return F.dot(lagrange_field(tuple(ids)), stack)


@lru_cache(maxsize=None)
def prss_subsets(n: int, t: int) -> tuple:
    """Sets of ``n - t`` parties; each holds one replicated PRSS key."""
    return tuple(tuple(a) for a in combinations(range(1, n + 1), n - t))


@lru_cache(maxsize=None)
def prss_weight(subset: tuple, party: int, n: int) -> int:
    """f_A(party) for the degree-t polynomial with f_A(0)=1 and f_A(j)=0 off A."""
    num, den = 1, 1
    for j in range(1, n + 1):
        if j not in subset:
            num = num * (j - party) % P
            den = den * j % P
    return num * pow(den, P - 2, P) % P
