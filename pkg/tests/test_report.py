import io
import math

import pytest

from anisohardy.report import CSV_HEADER, CheckRow, ExperimentReport, config_hash, fmt_float, write_csv


def test_float_format_round_trips():
    x = 0.1 + 0.2
    assert float(fmt_float(x)) == x
    assert fmt_float(float("nan")) == "nan"
    assert fmt_float(-math.inf) == "-inf"


@pytest.mark.parametrize("row, ok", [
    (CheckRow.close("a", 1.0, 1.0 + 5e-9, 1e-8), True),
    (CheckRow.close("a", 1.0, 2.0, 1e-3, rel=True), False),
    (CheckRow.at_least("b", 0.25 - 5e-7, 0.25, 1e-6), True),
    (CheckRow.at_least("b", 0.2, 0.25, 1e-6), False),
    (CheckRow.at_most("c", 1.0, 2.0, 0.0), True),
    (CheckRow.close("d", float("nan"), 0.0, 1.0), False),
])
def test_relations(row, ok):
    assert row.passed is ok


def test_csv_layout():
    rep = ExperimentReport("demo")
    rep.add(CheckRow.at_least("q", 1 / 3, 0.25, 1e-6, quad_err=1e-12))
    buf = io.StringIO()
    write_csv(buf, [rep])
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "demo,q,0.33333333333333331,0.25,STATED,9.9999999999999995e-07,true,9.9999999999999998e-13"
    assert rep.row("q").passed and rep.passed
    with pytest.raises(KeyError):
        rep.row("missing")


def test_config_hash_is_order_independent():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})
