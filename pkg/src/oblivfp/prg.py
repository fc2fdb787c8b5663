"""Deterministic byte streams from SHAKE-256, used for all protocol randomness.

A stream is addressed by a key; successive draws consume successive
counter blocks, so two holders of the same key that make the same calls
observe the same values.

>>> a, b = XofRng(b"k"), XofRng(b"k")
>>> bool((a.words(4) == b.words(4)).all())
True
"""

from __future__ import annotations

import hashlib
import os
import struct

import numpy as np


class XofRng:
    """Counter-mode SHAKE-256 generator."""

    __slots__ = ("key", "_ctr")

    def __init__(self, key: bytes | int | str | None = None):
        if key is None:
            key = os.urandom(32)
        elif isinstance(key, int):
            key = key.to_bytes(max(1, (key.bit_length() + 8) // 8), "little", signed=True)
        elif isinstance(key, str):
            key = key.encode()
        self.key = bytes(key)
        self._ctr = 0

    def bytes(self, n: int) -> bytes:
        h = hashlib.shake_256(self.key + struct.pack("<Q", self._ctr))
        self._ctr += 1
        return h.digest(n)

    def words(self, n: int) -> np.ndarray:
        """``n`` uniform uint64 values."""
        if n == 0:
            return np.zeros(0, dtype=np.uint64)
        return np.frombuffer(self.bytes(8 * n), dtype="<u8").astype(np.uint64)

    def below(self, bound: int, n: int) -> np.ndarray:
        """``n`` uniform integers in ``[0, bound)`` for ``bound <= 2**63`` (rejection)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        bits = max(1, (bound - 1).bit_length())
        mask = np.uint64((1 << bits) - 1)
        out = np.empty(0, dtype=np.int64)
        while out.size < n:
            w = self.words(2 * (n - out.size) + 8) & mask
            w = w[w < np.uint64(bound)].astype(np.int64)
            out = np.concatenate([out, w])
        return out[:n]

    def child(self, label) -> "XofRng":
        """Independent stream derived from this key and ``label``."""
        return XofRng(hashlib.sha256(self.key + b"/" + str(label).encode()).digest())

    def getrandbits(self, k: int) -> int:
        return int.from_bytes(self.bytes((k + 7) // 8), "little") & ((1 << k) - 1)
