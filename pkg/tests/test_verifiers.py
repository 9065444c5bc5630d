import pytest

from verifiers import (
    KNOWN_VERDICTS,
    STAGES,
    AlgebraVerifier,
    DilationVerifier,
    FigureVerifier,
    InvarianceVerifier,
    Ledger,
    LedgerRecorder,
    NCAlgebraVerifier,
    PerturbativeVerifier,
    PlaneVerifier,
    VerificationOrchestrator,
    load_baseline,
)


def _verifiers():
    return {
        "algebra": AlgebraVerifier,
        "dilation": DilationVerifier,
        "invariance": InvarianceVerifier,
        "figures": FigureVerifier,
        "ncalgebra": lambda: NCAlgebraVerifier(trials=50, max_degree=4),
        "ncplane": PlaneVerifier,
        "perturbative": PerturbativeVerifier,
    }


@pytest.mark.parametrize("stage", STAGES)
def test_stage_matches_known_verdicts(stage):
    out = _verifiers()[stage]().run()
    ledger = Ledger(entries=out["entries"])
    assert out["total_claims"] == len(out["entries"]) > 0
    assert ledger.counts()["undetermined"] == 0
    assert ledger.regressions() == []
    assert all(e.area == stage for e in out["entries"])


def test_known_verdicts_use_ledger_vocabulary():
    assert set(KNOWN_VERDICTS.values()) <= {"sign-flip", "mismatch"}


def test_recorder_turns_errors_into_undetermined():
    rec = LedgerRecorder("algebra")

    def broken():
        raise ZeroDivisionError("division by zero")

    entry = rec.check("Eq.99", "anything", broken)
    assert entry.verdict == "undetermined"
    assert "ZeroDivisionError" in entry.notes
    assert rec.check("Eq.98", "x", lambda: {"measured": 1.5, "verdict": "confirmed", "residual": 0.0}).measured == "1.5"
    assert "- Eq.99: undetermined" in rec.summary()


def test_non_finite_residual_is_dropped():
    rec = LedgerRecorder("figures")
    assert rec.add("Fig.x", "pole", "none", "mismatch", float("nan")).residual is None


def test_regressions_against_baseline():
    rec = LedgerRecorder("algebra")
    rec.add("Eq.1", "", "", "confirmed")
    rec.add("Eq.6", "", "", "confirmed")
    ledger = Ledger(entries=rec.entries)
    assert ledger.regressions() == [{"claim_id": "Eq.6", "baseline": "mismatch", "verdict": "confirmed"}]
    assert ledger.regressions({"Eq.6": "confirmed"}) == []


def test_ledger_save_and_load(tmp_path):
    rec = LedgerRecorder("dilation")
    rec.add("Eq.24-pi", "Q -> inversion", "ok", "confirmed", 0.0)
    rec.add("Eq.25-minus-Ix", "-Ix", "Ix", "mismatch", 2.0, notes="sign")
    ledger = Ledger(entries=rec.entries)
    path = tmp_path / "ledger.json"
    ledger.save(path)
    loaded = Ledger.load(path)
    assert loaded == ledger
    assert load_baseline(path) == {"Eq.24-pi": "confirmed", "Eq.25-minus-Ix": "mismatch"}


def test_orchestrator_runs_selected_stages():
    seen = []
    orchestrator = VerificationOrchestrator()
    result = orchestrator.run_pipeline(lambda stage, pct, msg: seen.append((stage, pct)), stages=["figures", "algebra"])
    assert result["success"]
    assert result["state"].algebra_complete and result["state"].figures_complete
    assert not result["state"].ncalgebra_complete
    assert {e.area for e in result["ledger"].entries} == {"algebra", "figures"}
    assert seen[-1][1] == 1.0
    summaries = orchestrator.get_summaries()
    assert summaries.index("=== ALGEBRA ===") < summaries.index("=== FIGURES ===")


def test_orchestrator_rejects_unknown_stage():
    with pytest.raises(ValueError):
        VerificationOrchestrator().run_pipeline(stages=["algebra", "astrology"])
