import pytest

from oblivfp.errors import ParseError
from oblivfp.report import build_report, format_report, parse_report
from oblivfp.runtime import CostReport


def test_build_and_roundtrip():
    cost = CostReport(10, 3, 999, {"s_lt": {"ops": 4, "rounds": 2, "bytes": 100}})
    rec = build_report("geom", {"lam2": 9}, {"gallery": "a.fpt"},
                       {"C_max": 3, "dx": 3 << 31, "R": [[1 << 32, 0], [0, -(1 << 30)]]},
                       fx_fields=("dx", "R"), k=32, cost=cost)
    assert rec["output.dx"] == "1.5" and rec["output.dx.raw"] == str(3 << 31)
    assert rec["output.R.1.1"] == "-0.25" and rec["output.C_max"] == "3"
    assert rec["cost.ops"] == "10" and rec["cost.label.s_lt.rounds"] == "2"
    text = format_report(rec)
    assert text.splitlines()[0] == "protocol=geom"
    assert parse_report(text) == rec


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_report("protocol=geom\nnot a pair\n")
    with pytest.raises(ParseError):
        parse_report("a=1\na=2\n")


def test_refuses_unserializable_keys():
    with pytest.raises(ValueError):
        format_report({"a=b": "1"})
