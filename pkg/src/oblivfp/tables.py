"""Polynomial coefficient tables for sine, cosine and arctangent.

The tables live in ``data/approx_tables.json`` as decimal strings, keyed
by target precision in bits.  ``tools/gen_tables.py`` regenerates them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import mpmath

from .errors import ConfigError
from .fixedpoint import const_raw

TABLE_FORMAT = "oblivfp-approx-tables"
TABLE_VERSION = 1
PRECISIONS = (16, 32, 64)


@dataclass(frozen=True)
class Poly:
    """One approximation: ``coefficients[i]`` multiplies the i-th power of the variable."""

    fn: str
    precision: int
    degree: int
    coefficients: tuple

    def mp(self) -> list:
        return [mpmath.mpf(c) for c in self.coefficients]

    def encoded(self, k: int) -> list:
        """Coefficients as fixed-point raws with ``k`` fractional bits (nearest)."""
        return [const_raw(c, k) for c in self.coefficients]

    def eval_mp(self, x) -> mpmath.mpf:
        """The approximation at ``x`` (degrees/90 for sin/cos, plain x for arctan)."""
        x = mpmath.mpf(x)
        if self.fn == "arctan":
            return mpmath.polyval(self.mp()[::-1], x)
        p = mpmath.polyval(self.mp()[::-1], x * x)
        return x * p if self.fn == "sin" else p


@dataclass(frozen=True)
class ApproxTables:
    """All shipped approximations, indexed by function and precision."""

    entries: dict

    def get(self, fn: str, precision: int) -> Poly:
        try:
            return self.entries[fn][precision]
        except KeyError:
            raise ConfigError(f"no {fn} table for precision {precision}") from None

    def bound_log2(self, fn: str, precision: int) -> float:
        """Required approximation bound: 2^-precision, or 4^(-5/8 (N+1)) for arctan."""
        if fn == "arctan":
            return -1.25 * (self.get(fn, precision).degree + 1)
        return -float(precision)


def parse_tables(doc: dict) -> ApproxTables:
    if doc.get("format") != TABLE_FORMAT or doc.get("version") != TABLE_VERSION:
        raise ConfigError("unrecognised coefficient table file")
    entries = {}
    for fn in ("sin", "cos", "arctan"):
        entries[fn] = {}
        for prec, e in doc[fn].items():
            coeffs = tuple(e["coefficients"])
            deg = int(e["degree"])
            if len(coeffs) != deg + 1:
                raise ConfigError(f"{fn}/{prec}: {len(coeffs)} coefficients for degree {deg}")
            entries[fn][int(prec)] = Poly(fn, int(prec), deg, coeffs)
    return ApproxTables(entries)


@lru_cache(maxsize=1)
def load_tables() -> ApproxTables:
    """The packaged tables (parsed once per process)."""
    text = resources.files("oblivfp").joinpath("data/approx_tables.json").read_text()
    return parse_tables(json.loads(text))


def arctan_terms(precision: int) -> int:
    """Medina order m and degree N = 8m - 1 with 2^(-10 m) <= 2^-precision."""
    m = math.ceil(precision / 10)
    return m, 8 * m - 1


__all__ = ["ApproxTables", "Poly", "load_tables", "parse_tables", "arctan_terms", "PRECISIONS"]
