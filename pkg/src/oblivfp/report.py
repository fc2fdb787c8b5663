"""Run reports as ``key=value`` lines.

Keys are dotted: ``protocol``, ``params.*``, ``input.*``, ``output.*``
and ``cost.*``.  Fixed-point outputs appear twice, as an exact decimal
(``output.<name>``) and as the raw integer (``output.<name>.raw``);
matrix and vector entries get 0-based index suffixes (``output.R.0.1``).
Wall-clock time is deliberately absent, so a seeded in-process run
reproduces its report byte for byte.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .fingerprint.templates import format_number


def _value_lines(prefix, value, is_fx, scale):
    if isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            yield from _value_lines(f"{prefix}.{i}", v, is_fx, scale)
    elif is_fx:
        yield prefix, format_number(Fraction(int(value), scale))
        yield prefix + ".raw", str(int(value))
    else:
        yield prefix, str(value)


def build_report(protocol: str, params: dict, inputs: dict, outputs: dict, fx_fields=(),
                 k: int = 32, cost=None) -> dict:
    """Flat ordered record; ``cost`` is a :class:`~oblivfp.runtime.CostReport` or None."""
    rec = {"protocol": protocol}
    for key, v in params.items():
        rec[f"params.{key}"] = str(v)
    for key, v in inputs.items():
        rec[f"input.{key}"] = str(v)
    for key, v in outputs.items():
        for kk, vv in _value_lines(f"output.{key}", v, key in fx_fields, 1 << k):
            rec[kk] = vv
    if cost is not None:
        rec["cost.ops"] = str(cost.interactive_ops)
        rec["cost.rounds"] = str(cost.rounds)
        rec["cost.bytes"] = str(cost.bytes_sent)
        for lab, b in sorted(cost.breakdown.items()):
            rec[f"cost.label.{lab}.ops"] = str(b["ops"])
            rec[f"cost.label.{lab}.rounds"] = str(b["rounds"])
    return rec


def format_report(rec: dict) -> str:
    for key in rec:
        if "=" in key or "\n" in key or "\n" in str(rec[key]):
            raise ValueError(f"unserializable report entry {key!r}")
    return "".join(f"{k}={v}\n" for k, v in rec.items())


def parse_report(text: str, path=None) -> dict:
    rec = {}
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, val = line.partition("=")
        if not sep or not key:
            raise ParseError("expected key=value", path, n)
        if key in rec:
            raise ParseError(f"duplicate key {key}", path, n)
        rec[key] = val
    return rec


__all__ = ["build_report", "format_report", "parse_report"]
