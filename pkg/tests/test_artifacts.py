import json
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pma_radial import artifacts
from pma_radial.solution import PiecewiseSolution


def test_csv_round_trip_bitwise(ref, tmp_path):
    sol = ref(3, 1e4)
    path = artifacts.write_solution_csv(sol, tmp_path / "s.csv")
    back = artifacts.read_solution_csv(path, n=3)
    for name in ("knots", "phi", "phi_prime", "phi_second"):
        assert np.array_equal(getattr(back, name), getattr(sol, name))


def test_csv_format(ref, tmp_path):
    path = artifacts.write_solution_csv(ref(2, 10.0), tmp_path / "s.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "r,phi,phi_prime,phi_second"
    assert lines[1] == "0,1,0,1"


def test_csv_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        artifacts.read_solution_csv(p, 2)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_format_round_trips(x):
    assert float(artifacts.format_float(x)) == x


def test_json_numbers_and_nulls():
    text = artifacts.dumps({"a": 0.1, "b": [1, 2.5], "c": float("nan"), "d": None, "e": True, "f": complex(1, -2)})
    data = json.loads(text)
    assert '"a": 0.10000000000000001' in text
    assert data["c"] is None and data["e"] is True and data["f"] == {"re": 1.0, "im": -2.0}


def test_empty_report_has_no_nulls(tmp_path):
    path = artifacts.write_report_json({"samples": 0, "checks": []}, tmp_path / "r.json")
    doc = artifacts.read_report_json(path)
    assert doc["report"] == {"samples": 0, "checks": []}
    assert "created_utc" in doc["metadata"]


def test_report_determinism_outside_metadata():
    rep = {"x": 1 / 3, "nested": {"y": [np.float64(2.0), np.int64(3)]}}
    a = json.loads(artifacts.dumps(artifacts.report_document(rep)))
    time.sleep(1.1)
    b = json.loads(artifacts.dumps(artifacts.report_document(rep)))
    assert a["report"] == b["report"]
    assert artifacts.dumps(rep) == artifacts.dumps(rep)


def test_atomic_write_leaves_no_temp(tmp_path):
    artifacts.atomic_write_text(tmp_path / "a.txt", "hello\n")
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


def test_write_failure_names_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        artifacts.atomic_write_text(tmp_path / "missing" / "a.txt", "x")


def test_large_csv_is_fast(tmp_path):
    knots = np.linspace(0, 100, 100_001)
    sol = PiecewiseSolution.from_function(2, knots, lambda r: 1 + r**2 / 2, lambda r: r, lambda r: 1 + 0 * r)
    t0 = time.perf_counter()
    artifacts.write_solution_csv(sol, tmp_path / "big.csv")
    assert time.perf_counter() - t0 < 5.0


def test_unserialisable_object():
    with pytest.raises(TypeError):
        artifacts.dumps({"x": object()})
