import json
import math

from eigshape.bounds import EigenBounds
from eigshape.intervals import Interval, IntervalSymMatrix
from eigshape.report import (
    bounds_json,
    build_report,
    interval_json,
    render,
    sym_matrix_json,
    to_csv,
    to_json,
)


def test_interval_json_roundtrip():
    x = Interval(1.0 / 3.0, math.pi)
    blob = interval_json(x)
    assert float(blob["lo"]) == x.lo
    assert float(blob["hi"]) == x.hi


def test_sym_matrix_json_sizes():
    assert sym_matrix_json(Interval(0.0, 1.0))["size"] == 1
    m = sym_matrix_json(IntervalSymMatrix.point(1.0, 2.0, 3.0))
    assert m["size"] == 2 and float(m["a12"]["lo"]) == 2.0


def test_bounds_json_indexing():
    rows = bounds_json(EigenBounds((1.0, 2.0), (1.5, 2.5), "direct"))
    assert rows[0]["k"] == 1 and rows[1]["k"] == 2
    assert float(rows[1]["hi"]) == 2.5


def test_report_renders_all_formats():
    rep = build_report({"command": "x"}, {"value": interval_json(Interval(0, 1))})
    parsed = json.loads(to_json(rep))
    assert parsed["schema"] == "eigshape-report/1"
    assert "assumptions" in parsed
    csv_text = to_csv(rep)
    assert csv_text.startswith("key,value")
    assert "value.lo" in csv_text
    for fmt in ("json", "csv", "text"):
        assert render(rep, fmt)


def test_render_rejects_unknown_format():
    import pytest

    with pytest.raises(ValueError):
        render({}, "yaml")
