import json
import math

import numpy as np
import pytest

from qalgebra.symmetry1d import CurvePoint
from utils.exporters import (
    CURVE_COLUMNS,
    LEDGER_COLUMNS,
    curve_frame,
    frame,
    jsonable,
    ledger_frame,
    to_json_text,
    write_csv,
    write_json,
)
from utils.pdf_generator import generate_ledger_pdf, sanitize_text
from verifiers.ledger import Ledger, LedgerRecorder


@pytest.fixture
def small_ledger():
    rec = LedgerRecorder("algebra")
    rec.add("Eq.1", "Lie relations", "all hold", "confirmed", 0.0)
    rec.add("Eq.6", "printed recursion", 0.25, "mismatch", 0.25, notes="off by a factor")
    ledger = Ledger()
    ledger.extend(rec.entries)
    return ledger


def test_curve_csv_header_and_precision(tmp_path):
    points = [CurvePoint(0.1, -0.5, 1 / 3, 0.0, True), CurvePoint(0.2, -0.5, math.nan, 0.0, False)]
    path = tmp_path / "curve.csv"
    text = write_csv(curve_frame(points), str(path))
    lines = text.splitlines()
    assert lines[0] == ",".join(CURVE_COLUMNS)
    assert lines[1].split(",")[2] == "0.33333333333333331"
    assert lines[2].split(",")[2] == "nan"
    assert path.read_text(encoding="utf-8") == text


def test_frame_reports_missing_columns():
    with pytest.raises(KeyError):
        frame([{"x": 1.0}], ["x", "y"])


def test_jsonable_values():
    out = jsonable({"z": 1 + 2j, "r": 3 + 0j, "bad": math.inf, "arr": np.array([1.0, 2.0]), 4: np.float64(0.5)})
    assert out == {"z": {"re": 1.0, "im": 2.0}, "r": 3.0, "bad": None, "arr": [1.0, 2.0], "4": 0.5}


def test_json_is_sorted_and_stable(tmp_path):
    path = tmp_path / "out.json"
    text = write_json({"b": 1, "a": [1j]}, str(path))
    assert json.loads(path.read_text(encoding="utf-8")) == {"a": [{"re": 0.0, "im": 1.0}], "b": 1}
    assert text == to_json_text({"a": [1j], "b": 1})


def test_ledger_frame(small_ledger):
    df = ledger_frame(small_ledger)
    assert list(df.columns) == LEDGER_COLUMNS
    assert list(df["verdict"]) == ["confirmed", "mismatch"]


def test_sanitize_text():
    assert sanitize_text("ħ∂π") == "hbardpi"
    assert sanitize_text("") == ""


def test_pdf_report(small_ledger, tmp_path):
    path = tmp_path / "ledger.pdf"
    data = generate_ledger_pdf(
        small_ledger,
        "=== ALGEBRA ===",
        str(path),
        regressions=[{"claim_id": "Eq.1", "baseline": "confirmed", "verdict": "mismatch"}],
    )
    assert data.startswith(b"%PDF")
    assert path.read_bytes() == data
