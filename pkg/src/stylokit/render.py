"""CSV and SVG renderings of an AlignmentReport.

The CSV layout is the documented interchange surface:

  author,method,pct_in_training,n_names,ppl,ppl_reduction,cosine,accuracy,\
lexical_mse,syntactic_jsd,surface_mse

one data row per (author, method) in report order, then one "average" row
per method. Missing values render as empty cells; floats render with
Python's shortest round-trip repr. SVG output is a plain bar chart of the
ppl_reduction and cosine columns, presentation only.
"""

from __future__ import annotations

import csv
import io

from .metrics import AVERAGE_LABEL, REPORT_COLUMNS, AlignmentReport, ReportRow


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_to_csv(report: AlignmentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in list(report.rows) + list(report.averages):
        writer.writerow([_fmt(row.cell(c)) for c in REPORT_COLUMNS])
    return buf.getvalue()


def _bar_group(rows: list[ReportRow], column: str, title: str, y0: int,
               width: int = 640) -> list[str]:
    entries = [(f"{r.author_id}/{r.method}", r.cell(column))
               for r in rows if r.cell(column) is not None]
    out = [f'<text x="10" y="{y0}" font-size="14" font-family="sans-serif" '
           f'font-weight="bold">{title}</text>']
    if not entries:
        out.append(f'<text x="10" y="{y0 + 20}" font-size="12" '
                   f'font-family="sans-serif">no data</text>')
        return out
    peak = max(abs(v) for _, v in entries) or 1.0
    bar_h = 14
    for i, (label, value) in enumerate(entries):
        y = y0 + 10 + i * (bar_h + 6)
        w = abs(value) / peak * (width - 260)
        out.append(f'<rect x="200" y="{y}" width="{w:.1f}" height="{bar_h}" '
                   f'fill="#4878a8"/>')
        out.append(f'<text x="10" y="{y + 11}" font-size="11" '
                   f'font-family="sans-serif">{label}</text>')
        out.append(f'<text x="{200 + w + 4:.1f}" y="{y + 11}" font-size="11" '
                   f'font-family="sans-serif">{value:.3f}</text>')
    return out


def report_to_svg(report: AlignmentReport, width: int = 640) -> str:
    rows = list(report.rows)
    groups = []
    y = 24
    for column, title in (("ppl_reduction", "Perplexity reduction (%)"),
                          ("cosine", "Cosine similarity")):
        block = _bar_group(rows, column, title, y, width)
        n = sum(1 for r in rows if r.cell(column) is not None) or 1
        groups.extend(block)
        y += 30 + n * 20
    height = y + 10
    body = "\n".join(groups)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="white"/>\n'
            f"{body}\n</svg>\n")
