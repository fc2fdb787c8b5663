"""Line-oriented template files.

Layout::

    FPT v1 minutiae <m>
    x y theta                      (m lines)

    FPT v1 hc <m> <m_hat>
    x y theta                      (m lines)
    x y w                          (m_hat lines, exact decimals or p/q)

    FPT v1 spectral <M'> <N'> <N>
    a_1 b_1 a_2 b_2 ... a_N' b_N'  (M' lines)

Blank lines and lines starting with ``#`` are ignored.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ParseError
from .types import HCTemplate, HighCurvaturePoint, Minutia, MinutiaeTemplate, SpectralTemplate

MAGIC = ("FPT", "v1")
KINDS = {"minutiae": 1, "hc": 2, "spectral": 3}


def format_number(v) -> str:
    """Shortest exact text for an int or Fraction (terminating decimal when possible)."""
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    places = max(twos, fives)
    scaled = abs(v) * 10 ** places
    digits = str(int(scaled)).rjust(places + 1, "0")
    sign = "-" if v < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0").rstrip(".")


def _records(text: str):
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield n, s.split()


def _int(tok, path, line, fld):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", path, line, fld) from None


def _num(tok, path, line, fld):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a number, got {tok!r}", path, line, fld) from None


def _minutia(fields, path, line):
    if len(fields) != 3:
        raise ParseError(f"minutia needs 3 fields, got {len(fields)}", path, line, None)
    x, y, th = (_int(t, path, line, i + 1) for i, t in enumerate(fields))
    try:
        return Minutia(x, y, th)
    except ConfigError as e:
        raise ParseError(str(e), path, line, 3) from None


def parse_template(text: str, path: str | None = None):
    """Parse template text; errors carry the offending line and 1-based field."""
    recs = list(_records(text))
    if not recs:
        raise ParseError("empty template", path, None, None)
    hline, head = recs[0]
    if tuple(head[:2]) != MAGIC or len(head) < 3 or head[2] not in KINDS:
        raise ParseError("header must be 'FPT v1 <minutiae|hc|spectral> <dims>'", path, hline, None)
    kind = head[2]
    dims = [_int(t, path, hline, i + 4) for i, t in enumerate(head[3:])]
    if len(dims) != KINDS[kind]:
        raise ParseError(f"{kind} header needs {KINDS[kind]} dimensions", path, hline, None)
    if any(d < 1 for d in dims):
        raise ParseError("dimensions must be positive", path, hline, None)
    body = recs[1:]
    want = {"minutiae": dims[0], "hc": sum(dims), "spectral": dims[0]}[kind]
    if len(body) != want:
        last = body[-1][0] if body else hline
        raise ParseError(f"expected {want} records, found {len(body)}", path, last, None)
    if kind == "minutiae":
        return MinutiaeTemplate([_minutia(f, path, n) for n, f in body])
    if kind == "hc":
        m = dims[0]
        mins = [_minutia(f, path, n) for n, f in body[:m]]
        pts = []
        for n, f in body[m:]:
            if len(f) != 3:
                raise ParseError(f"high curvature point needs 3 fields, got {len(f)}", path, n, None)
            x, y, w = (_num(t, path, n, i + 1) for i, t in enumerate(f))
            if not 0 <= w <= 2:
                raise ParseError(f"curvature {w} outside [0, 2]", path, n, 3)
            pts.append(HighCurvaturePoint(x, y, w))
        return HCTemplate(mins, pts)
    M, Nc, N = dims
    a = np.empty((M, Nc), dtype=object)
    b = np.empty((M, Nc), dtype=object)
    for r, (n, f) in enumerate(body):
        if len(f) != 2 * Nc:
            raise ParseError(f"row needs {2 * Nc} fields, got {len(f)}", path, n, None)
        vals = [_num(t, path, n, i + 1) for i, t in enumerate(f)]
        a[r] = vals[0::2]
        b[r] = vals[1::2]
    try:
        return SpectralTemplate(a, b, N)
    except ConfigError as e:
        raise ParseError(str(e), path, hline, None) from None


def format_template(tpl) -> str:
    lines = []
    if isinstance(tpl, MinutiaeTemplate):
        lines.append(f"FPT v1 minutiae {len(tpl.minutiae)}")
        lines += [f"{p.x} {p.y} {p.theta}" for p in tpl.minutiae]
    elif isinstance(tpl, HCTemplate):
        lines.append(f"FPT v1 hc {len(tpl.minutiae)} {len(tpl.points)}")
        lines += [f"{p.x} {p.y} {p.theta}" for p in tpl.minutiae]
        lines += [" ".join(format_number(v) for v in (p.x, p.y, p.w)) for p in tpl.points]
    elif isinstance(tpl, SpectralTemplate):
        M, Nc = tpl.dims
        lines.append(f"FPT v1 spectral {M} {Nc} {tpl.N}")
        for r in range(M):
            row = []
            for j in range(Nc):
                row += [format_number(tpl.a[r, j]), format_number(tpl.b[r, j])]
            lines.append(" ".join(row))
    else:
        raise ConfigError(f"not a template: {type(tpl).__name__}")
    return "\n".join(lines) + "\n"


def load_template(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {p}: {e}") from None
    return parse_template(text, str(p))


def save_template(tpl, path) -> None:
    Path(path).write_text(format_template(tpl))


__all__ = ["parse_template", "format_template", "load_template", "save_template", "format_number"]
