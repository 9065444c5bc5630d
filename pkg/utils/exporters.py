"""
Exporters
Deterministic CSV and JSON writers for curves, residual fields, phases, field samples and the ledger
"""
import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

CURVE_COLUMNS = ["x", "s", "re_V", "im_V", "converged"]
RESIDUAL_COLUMNS = ["x", "y", "residual"]
PHASE_COLUMNS = ["path", "closed", "phase_re", "phase_im", "phase_angle", "stokes_error"]
DIFFERENCE_COLUMNS = ["a", "b", "difference"]
FIELD_COLUMNS = ["x", "y", "z", "Ax", "Ay", "Az"]
POLE_COLUMNS = ["s", "pole", "predicted"]
LEDGER_COLUMNS = ["claim_id", "area", "expected", "measured", "residual", "verdict", "notes"]


def frame(rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
    """Rows as a DataFrame with a fixed column order"""
    rows = list(rows)
    missing = sorted({c for row in rows for c in columns if c not in row})
    if missing:
        raise KeyError(f"missing columns: {missing}")
    return pd.DataFrame(rows, columns=list(columns))


def to_csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan")


def write_csv(df: pd.DataFrame, path: Optional[str] = None) -> str:
    """Write to path (or return the text when path is None)"""
    text = to_csv_text(df)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info("wrote %d rows to %s", len(df), path)
    return text


def curve_frame(points) -> pd.DataFrame:
    return frame(
        ({"x": p.x, "s": p.s, "re_V": p.re_v, "im_V": p.im_v, "converged": p.converged} for p in points),
        CURVE_COLUMNS,
    )


def residual_frame(field) -> pd.DataFrame:
    return frame(({"x": x, "y": y, "residual": r} for x, y, r in field.rows()), RESIDUAL_COLUMNS)


def phase_frame(demo: Dict[str, Any]) -> pd.DataFrame:
    return frame(demo["paths"], PHASE_COLUMNS)


def difference_frame(demo: Dict[str, Any]) -> pd.DataFrame:
    return frame(demo["differences"], DIFFERENCE_COLUMNS)


def field_frame(samples: List[Dict[str, float]]) -> pd.DataFrame:
    return frame(samples, FIELD_COLUMNS)


def ledger_frame(ledger) -> pd.DataFrame:
    return frame((e.model_dump() for e in ledger.entries), LEDGER_COLUMNS)


def jsonable(obj: Any) -> Any:
    """Plain JSON types: complex as {re, im}, arrays as lists, non-finite floats as null"""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if hasattr(obj, "model_dump"):
        return jsonable(obj.model_dump())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return jsonable(obj.item())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, complex):
        if obj.imag == 0:
            return jsonable(obj.real)
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if callable(obj):
        return None
    return str(obj)


def to_json_text(obj: Any) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(obj: Any, path: Optional[str] = None) -> str:
    text = to_json_text(obj)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
        logger.info("wrote JSON to %s", path)
    return text
