"""
Utils package for qsym
"""
from .exporters import (
    curve_frame,
    difference_frame,
    field_frame,
    ledger_frame,
    phase_frame,
    residual_frame,
    write_csv,
    write_json,
)
from .pdf_generator import generate_ledger_pdf

__all__ = [
    'curve_frame',
    'difference_frame',
    'field_frame',
    'ledger_frame',
    'phase_frame',
    'residual_frame',
    'write_csv',
    'write_json',
    'generate_ledger_pdf',
]
