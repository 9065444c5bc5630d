import csv
import json
import math

import pytest
from click.testing import CliRunner

from cli import EXIT_CONFIG, EXIT_OK, EXIT_REGRESSION, EXIT_SINGULAR, load_run_config, main, ConfigError
from utils.exporters import CURVE_COLUMNS, DIFFERENCE_COLUMNS, FIELD_COLUMNS, PHASE_COLUMNS, POLE_COLUMNS
from verifiers.ledger import Ledger, LedgerRecorder

SMALL_PLANE_GRID = {"x_min": -1.0, "x_max": 1.0, "y_min": 0.5, "y_max": 3.0, "nx": 11, "ny": 11}


@pytest.fixture
def runner():
    return CliRunner()


def _write_config(tmp_path, data, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_load_run_config_defaults():
    cfg = load_run_config(None)
    assert cfg.mode == "complex"
    assert cfg.order == 20
    assert load_run_config(None, order=8).order == 8


def test_load_run_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ConfigError):
        load_run_config(_write_config(tmp_path, {"colour": "blue"}))


def test_deform_potential_writes_curves_and_poles(runner, tmp_path):
    cfg = _write_config(tmp_path, {"mode": "real", "s_values": [-0.5], "x_grid": {"x_min": -3, "x_max": 3, "n": 7}})
    out = tmp_path / "curve.csv"
    poles = tmp_path / "poles.csv"
    result = runner.invoke(main, ["deform-potential", "--config", cfg, "--out", str(out), "--poles", str(poles)])
    assert result.exit_code == EXIT_OK, result.output
    rows = _read_csv(out)
    assert rows[0] == CURVE_COLUMNS
    assert len(rows) == 8
    pole_rows = _read_csv(poles)
    assert pole_rows[0] == POLE_COLUMNS
    assert float(pole_rows[1][1]) == pytest.approx(math.exp(0.25), abs=0.01)


def test_invariant_solve_reports_q_independence(runner, tmp_path):
    cfg = _write_config(tmp_path, {"potential": {"2": 1.0}})
    out = tmp_path / "solve.json"
    result = runner.invoke(main, ["invariant-solve", "--config", cfg, "--out", str(out), "--order", "12"])
    assert result.exit_code == EXIT_OK, result.output
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert len(doc["solutions"]) == 3
    assert doc["q_independent"]


def test_invariant_solve_singular_mode_exit(runner, tmp_path):
    cfg = _write_config(tmp_path, {"potential": {"1": 1.0}, "s_values": [math.pi]})
    result = runner.invoke(main, ["invariant-solve", "--config", cfg, "--order", "10"])
    assert result.exit_code == EXIT_SINGULAR


def test_bad_config_key_exit(runner, tmp_path):
    cfg = _write_config(tmp_path, {"colour": "blue"})
    result = runner.invoke(main, ["invariant-solve", "--config", cfg])
    assert result.exit_code == EXIT_CONFIG


def test_bad_json_exit(runner, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    result = runner.invoke(main, ["deform-potential", "--config", str(path)])
    assert result.exit_code == EXIT_CONFIG


def test_partition_solve_needs_block(runner, tmp_path):
    result = runner.invoke(main, ["partition-solve", "--config", _write_config(tmp_path, {})])
    assert result.exit_code == EXIT_CONFIG


def test_partition_solve_scan(runner, tmp_path):
    cfg = _write_config(tmp_path, {"partition": {"N": 2, "B": [1.0]}, "order": 12})
    out = tmp_path / "partition.json"
    result = runner.invoke(main, ["partition-solve", "--config", cfg, "--out", str(out)])
    assert result.exit_code == EXIT_OK, result.output
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["N"] == 2
    assert set(doc["runs"]) == {"1"}


def test_ncplane_check(runner, tmp_path):
    cfg = _write_config(tmp_path, {"grid": SMALL_PLANE_GRID})
    out = tmp_path / "residual.csv"
    scan = tmp_path / "scan.json"
    result = runner.invoke(main, [
        "ncplane-check", "--config", cfg, "--out", str(out), "--scan", str(scan), "--tolerance", "1e-6",
    ])
    assert result.exit_code == EXIT_OK, result.output
    rows = _read_csv(out)
    assert rows[0] == ["x", "y", "residual"]
    assert len(rows) == 1 + 11 * 11
    doc = json.loads(scan.read_text(encoding="utf-8"))
    assert doc["variants"][0]["solves"]
    assert not next(v for v in doc["variants"] if v["printed"])["solves"]


def test_phase_demo_outputs(runner, tmp_path):
    out, diffs, field = tmp_path / "phases.csv", tmp_path / "diffs.csv", tmp_path / "field.csv"
    result = runner.invoke(main, [
        "phase-demo", "--out", str(out), "--differences", str(diffs), "--field", str(field),
    ])
    assert result.exit_code == EXIT_OK, result.output
    assert _read_csv(out)[0] == PHASE_COLUMNS
    assert _read_csv(diffs)[0] == DIFFERENCE_COLUMNS
    field_rows = _read_csv(field)
    assert field_rows[0] == FIELD_COLUMNS
    assert len(field_rows) == 6


def test_verify_figures_stage(runner, tmp_path):
    out = tmp_path / "ledger.json"
    pdf = tmp_path / "ledger.pdf"
    result = runner.invoke(main, ["verify", "--stages", "figures", "--out", str(out), "--pdf", str(pdf)])
    assert result.exit_code == EXIT_OK, result.output
    ledger = Ledger.load(out)
    assert {e.area for e in ledger.entries} == {"figures"}
    assert ledger.get("Eq.18-pole").verdict == "mismatch"
    assert pdf.read_bytes().startswith(b"%PDF")


def test_verify_unknown_stage(runner):
    result = runner.invoke(main, ["verify", "--stages", "figures,astrology"])
    assert result.exit_code == EXIT_CONFIG


def test_verify_regression_against_baseline(runner, tmp_path):
    rec = LedgerRecorder("figures")
    rec.add("Fig.1-pole", "", "", "mismatch")
    rec.add("Eq.18-pole", "", "", "mismatch")
    baseline = tmp_path / "baseline.json"
    Ledger(entries=rec.entries).save(baseline)
    result = runner.invoke(main, [
        "verify", "--stages", "figures", "--baseline", str(baseline), "--out", str(tmp_path / "ledger.json"),
    ])
    assert result.exit_code == EXIT_REGRESSION
