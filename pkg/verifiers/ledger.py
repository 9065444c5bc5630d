"""
Discrepancy Ledger
One verdict per printed claim, with the expected form, what was measured and the residual
"""
import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from config import LEDGER_SCHEMA_VERSION

logger = logging.getLogger(__name__)

Verdict = Literal["confirmed", "sign-flip", "mismatch", "undetermined"]

# Claims whose printed form is known not to hold; everything else should come out confirmed.
KNOWN_VERDICTS: Dict[str, str] = {
    "Eq.2-RyP": "sign-flip",
    "Eq.2-VP": "sign-flip",
    "Eq.2-RyV": "sign-flip",
    "Eq.6": "mismatch",
    "Eq.10": "mismatch",
    "Eq.11": "mismatch",
    "Eq.18-pole": "mismatch",
    "Eq.19": "mismatch",
    "Eq.23": "mismatch",
    "Eq.25-minus-Ix": "mismatch",
    "Eq.27-limit-x": "mismatch",
    "Eq.28-line1": "mismatch",
    "Eq.29": "mismatch",
    "Eq.33-pxx": "mismatch",
    "Eq.35-line2": "mismatch",
    "Eq.35-line3": "mismatch",
    "Eq.37-limit": "mismatch",
    "Eq.38-printed": "mismatch",
    "Eq.38-asymptotic": "mismatch",
    "Eq.40-shift": "mismatch",
    "Eq.42-curl-printed": "sign-flip",
    "Eq.44-field": "sign-flip",
    "q-planewave": "mismatch",
}


class LedgerEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    claim_id: str = Field(min_length=1)
    area: str
    expected: str
    measured: str
    residual: Optional[float] = None
    verdict: Verdict
    notes: str = ""

    @field_validator("residual")
    @classmethod
    def finite_residual(cls, v):
        if v is not None and not math.isfinite(v):
            return None
        return v


class Ledger(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: str = LEDGER_SCHEMA_VERSION
    entries: List[LedgerEntry] = Field(default_factory=list)

    def extend(self, entries: List[LedgerEntry]):
        self.entries.extend(entries)

    def get(self, claim_id: str) -> Optional[LedgerEntry]:
        return next((e for e in self.entries if e.claim_id == claim_id), None)

    def counts(self) -> Dict[str, int]:
        out = {"confirmed": 0, "sign-flip": 0, "mismatch": 0, "undetermined": 0}
        for e in self.entries:
            out[e.verdict] += 1
        return out

    def regressions(self, baseline: Optional[Dict[str, str]] = None) -> List[Dict[str, str]]:
        """Entries whose verdict differs from the baseline (default: confirmed unless known)"""
        baseline = KNOWN_VERDICTS if baseline is None else baseline
        out = []
        for e in self.entries:
            expected = baseline.get(e.claim_id, "confirmed")
            if e.verdict != expected:
                out.append({"claim_id": e.claim_id, "baseline": expected, "verdict": e.verdict})
        return out

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def save(self, path):
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Ledger":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_baseline(path) -> Dict[str, str]:
    """Verdict table from a stored ledger file"""
    ledger = Ledger.load(path)
    return {e.claim_id: e.verdict for e in ledger.entries}


def verdict_from_residual(residual: float, tol: float) -> str:
    return "confirmed" if residual <= tol else "mismatch"


def _fmt(value: Any) -> str:
    if isinstance(value, complex):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


class LedgerRecorder:
    """
    Collects entries for one verification area. Each claim runs inside check();
    a failure becomes an undetermined entry instead of stopping the stage.
    """

    def __init__(self, area: str):
        self.area = area
        self.entries: List[LedgerEntry] = []

    def add(self, claim_id: str, expected: str, measured: Any, verdict: str,
            residual: Optional[float] = None, notes: str = "") -> LedgerEntry:
        entry = LedgerEntry(
            claim_id=claim_id,
            area=self.area,
            expected=expected,
            measured=_fmt(measured),
            residual=None if residual is None else float(residual),
            verdict=verdict,
            notes=notes,
        )
        self.entries.append(entry)
        logger.debug("%s: %s", claim_id, verdict)
        return entry

    def check(self, claim_id: str, expected: str, fn: Callable[[], Dict[str, Any]]) -> LedgerEntry:
        """fn returns measured, verdict and optionally residual and notes"""
        try:
            out = fn()
        except Exception as e:
            logger.warning("claim %s could not be evaluated: %s", claim_id, e)
            return self.add(claim_id, expected, "error", "undetermined", notes=f"{type(e).__name__}: {e}")
        return self.add(
            claim_id,
            expected,
            out["measured"],
            out["verdict"],
            out.get("residual"),
            out.get("notes", ""),
        )

    def summary(self) -> str:
        lines = [f"=== {self.area.upper()} ==="]
        for e in self.entries:
            res = "" if e.residual is None else f" (residual {e.residual:.3e})"
            lines.append(f"- {e.claim_id}: {e.verdict}{res}")
        return "\n".join(lines)
