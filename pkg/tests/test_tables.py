import json

import mpmath
import pytest

from oblivfp.errors import ConfigError
from oblivfp.tables import PRECISIONS, arctan_terms, load_tables, parse_tables

GRID = 100_000
TRUE = {
    "sin": lambda x: mpmath.sin(x * mpmath.pi / 2),
    "cos": lambda x: mpmath.cos(x * mpmath.pi / 2),
    "arctan": mpmath.atan,
}


def test_trig_degrees_per_precision():
    t = load_tables()
    assert [t.get("sin", p).degree for p in PRECISIONS] == [3, 5, 9]
    assert [t.get("cos", p).degree for p in PRECISIONS] == [3, 5, 9]


def test_arctan_orders():
    t = load_tables()
    for p in PRECISIONS:
        m, n = arctan_terms(p)
        assert t.get("arctan", p).degree == n
        assert -1.25 * (n + 1) <= -p


@pytest.mark.slow
@pytest.mark.parametrize("fn", ["sin", "cos", "arctan"])
@pytest.mark.parametrize("precision", PRECISIONS)
def test_table_bounds_on_grid(fn, precision):
    t = load_tables()
    poly = t.get(fn, precision)
    grid = GRID if precision == 32 else GRID // 5      # the k=32 tables get the full grid
    with mpmath.workdps(25 if precision < 64 else 40):
        bound = mpmath.mpf(2) ** t.bound_log2(fn, precision)
        worst = max(abs(poly.eval_mp(mpmath.mpf(i) / grid) - TRUE[fn](mpmath.mpf(i) / grid))
                    for i in range(grid + 1))
    assert worst <= bound


def test_parse_rejects_bad_documents():
    with pytest.raises(ConfigError):
        parse_tables({"format": "other", "version": 1})
    doc = {"format": "oblivfp-approx-tables", "version": 1,
           "sin": {"16": {"degree": 2, "coefficients": ["1"]}}, "cos": {}, "arctan": {}}
    with pytest.raises(ConfigError):
        parse_tables(doc)
    with pytest.raises(ConfigError):
        load_tables().get("sin", 8)


def test_shipped_file_is_json_roundtrippable():
    from importlib import resources
    doc = json.loads(resources.files("oblivfp").joinpath("data/approx_tables.json").read_text())
    assert parse_tables(doc) == load_tables()
