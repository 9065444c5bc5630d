"""
PDF Generator for qsym Ledger Reports
Renders the discrepancy ledger and the stage summaries as a PDF report
"""
from fpdf import FPDF
from datetime import datetime
from typing import Dict, Any, List, Optional


_REPLACEMENTS = {
    "–": "-",
    "—": "-",
    "−": "-",
    "…": "...",
    "→": "->",
    "≠": "!=",
    "≤": "<=",
    "≥": ">=",
    "≈": "~",
    "∂": "d",
    "ħ": "hbar",
    "π": "pi",
    "σ": "sigma",
    "ε": "eps",
    "α": "alpha",
    "κ": "kappa",
    "ν": "nu",
    "²": "^2",
    "³": "^3",
    "•": "-",
    "‘": "'",
    "’": "'",
    "“": '"',
    "”": '"',
}

VERDICT_COLORS = {
    "confirmed": (34, 139, 34),
    "sign-flip": (230, 140, 0),
    "mismatch": (200, 40, 40),
    "undetermined": (128, 128, 128),
}


def sanitize_text(text: str) -> str:
    """Sanitize text to remove/replace characters the core fonts cannot draw"""
    if not text:
        return ""
    for old, new in _REPLACEMENTS.items():
        text = text.replace(old, new)
    return text.encode('latin-1', errors='replace').decode('latin-1')


class LedgerReportPDF(FPDF):
    """Custom PDF class for ledger reports"""

    def __init__(self):
        super().__init__()
        self.set_auto_page_break(auto=True, margin=20)

    def header(self):
        self.set_fill_color(102, 126, 234)
        self.rect(0, 0, 210, 30, 'F')

        self.set_text_color(255, 255, 255)
        self.set_font('Helvetica', 'B', 18)
        self.set_y(8)
        self.cell(0, 10, 'qsym', align='C', ln=True)

        self.set_font('Helvetica', '', 10)
        self.cell(0, 5, 'Discrepancy Ledger Report', align='C', ln=True)

        self.set_y(40)
        self.set_text_color(0, 0, 0)

    def footer(self):
        self.set_y(-15)
        self.set_font('Helvetica', 'I', 8)
        self.set_text_color(128, 128, 128)
        self.cell(0, 10, f'Page {self.page_no()}', align='C')

    def chapter_title(self, title: str):
        """Add a chapter title with an underline"""
        title = sanitize_text(title)
        self.set_font('Helvetica', 'B', 14)
        self.set_text_color(102, 126, 234)
        self.cell(0, 10, title, ln=True)
        self.set_text_color(0, 0, 0)
        self.set_draw_color(102, 126, 234)
        self.set_line_width(0.5)
        self.line(10, self.get_y(), 200, self.get_y())
        self.ln(5)

    def section_title(self, title: str):
        title = sanitize_text(title)
        self.set_font('Helvetica', 'B', 11)
        self.set_text_color(60, 60, 60)
        self.cell(0, 8, title, ln=True)
        self.set_text_color(0, 0, 0)
        self.ln(2)

    def body_text(self, text: str):
        text = sanitize_text(text)
        self.set_font('Helvetica', '', 10)
        self.multi_cell(0, 6, text)
        self.ln(3)

    def bullet_point(self, text: str, indent: int = 10):
        text = sanitize_text(text)
        self.set_font('Helvetica', '', 10)
        self.set_x(indent)
        self.cell(5, 6, chr(149))
        self.multi_cell(0, 6, text)

    def verdict_badge(self, verdict: str):
        """Colored verdict label on the current line"""
        self.set_font('Helvetica', 'B', 9)
        self.set_text_color(*VERDICT_COLORS.get(verdict, (0, 0, 0)))
        self.cell(25, 6, f'[{verdict.upper()}]')
        self.set_text_color(0, 0, 0)

    def add_table(self, headers: List[str], rows: List[List[str]], col_widths: Optional[List[int]] = None,
                  max_chars: int = 50):
        """Add a simple table; cells are cut to max_chars"""
        headers = [sanitize_text(h) for h in headers]
        rows = [[sanitize_text(cell) for cell in row] for row in rows]

        if col_widths is None:
            col_widths = [190 // len(headers)] * len(headers)

        self.set_font('Helvetica', 'B', 9)
        self.set_fill_color(102, 126, 234)
        self.set_text_color(255, 255, 255)
        for i, header in enumerate(headers):
            self.cell(col_widths[i], 8, header, border=1, fill=True, align='C')
        self.ln()

        self.set_font('Helvetica', '', 9)
        self.set_text_color(0, 0, 0)
        fill = False
        for row in rows:
            if fill:
                self.set_fill_color(245, 245, 250)
            else:
                self.set_fill_color(255, 255, 255)
            for i, cell in enumerate(row):
                self.cell(col_widths[i], 7, cell[:max_chars], border=1, fill=True)
            self.ln()
            fill = not fill

        self.ln(5)


def _residual_text(residual: Optional[float]) -> str:
    return "-" if residual is None else f"{residual:.3e}"


def generate_ledger_pdf(ledger, summaries: str = "", path: Optional[str] = None,
                        regressions: Optional[List[Dict[str, str]]] = None) -> bytes:
    """Generate a PDF from a Ledger; written to path when given, always returned as bytes"""

    pdf = LedgerReportPDF()
    pdf.add_page()

    today = datetime.now()

    # Verdict counts
    pdf.chapter_title("Summary")
    counts = ledger.counts()
    pdf.add_table(
        ['Verdict', 'Claims'],
        [[verdict, str(n)] for verdict, n in counts.items()],
        [95, 95],
    )
    pdf.body_text(f"{len(ledger.entries)} claims checked, ledger schema {ledger.schema_version}.")

    if regressions:
        pdf.section_title("Regressions against the baseline")
        for r in regressions:
            pdf.bullet_point(f"{r['claim_id']}: expected {r['baseline']}, got {r['verdict']}")
        pdf.ln(3)

    # One table per area, in ledger order
    areas: Dict[str, List[Any]] = {}
    for entry in ledger.entries:
        areas.setdefault(entry.area, []).append(entry)

    for area, entries in areas.items():
        pdf.add_page()
        pdf.chapter_title(f"Area: {area}")
        pdf.add_table(
            ['Claim', 'Verdict', 'Residual', 'Measured'],
            [[e.claim_id, e.verdict, _residual_text(e.residual), e.measured] for e in entries],
            [35, 25, 25, 105],
            max_chars=60,
        )

    # Everything that did not come out confirmed, with the full text
    open_entries = [e for e in ledger.entries if e.verdict != "confirmed"]
    if open_entries:
        pdf.add_page()
        pdf.chapter_title("Findings")
        for e in open_entries:
            pdf.verdict_badge(e.verdict)
            pdf.section_title(e.claim_id)
            pdf.body_text(f"Expected: {e.expected}")
            pdf.body_text(f"Measured: {e.measured}")
            if e.notes:
                pdf.body_text(f"Notes: {e.notes}")

    if summaries:
        pdf.add_page()
        pdf.chapter_title("Stage Summaries")
        pdf.body_text(summaries)

    pdf.ln(10)
    pdf.set_font('Helvetica', 'I', 9)
    pdf.set_text_color(128, 128, 128)
    pdf.multi_cell(0, 5, f"Generated by qsym on {today.strftime('%B %d, %Y')}.")

    data = bytes(pdf.output())
    if path is not None:
        with open(path, "wb") as fh:
            fh.write(data)
    return data
