"""CSV tables, SVG charts and JSON rendering with exact rationals kept exact."""

from __future__ import annotations

import csv
import enum
import io
import json
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import UsageError

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def rational_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return rational_text(value)
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def emit_table(rows: Sequence[Mapping], schema: Sequence[str]) -> str:
    """CSV with a header row; CRLF line endings, quoting only where needed."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(schema)
    for i, row in enumerate(rows):
        if set(row) != set(schema):
            extra = sorted(set(row) - set(schema))
            missing = sorted(set(schema) - set(row))
            raise UsageError(f"row {i} does not match schema (extra {extra}, missing {missing})")
        writer.writerow([_cell(row[c]) for c in schema])
    return buf.getvalue()


def read_table(text: str) -> list:
    return list(csv.DictReader(io.StringIO(text)))


def parse_rational(text) -> Fraction:
    return Fraction(text) if not isinstance(text, Fraction) else text


def to_jsonable(value):
    """Fractions become ``"num/den"`` strings, enums their values, tuples lists."""
    if isinstance(value, Fraction):
        return rational_text(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps(value) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True) + "\n"


# -- SVG -------------------------------------------------------------------

def _num(x: Fraction) -> str:
    # two decimals, exact rounding from the rational
    n = round(Fraction(x) * 100)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // 100}.{n % 100:02d}"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def emit_plot(series: Mapping[str, Sequence], title: str = "", step: bool = False,
              width: int = 640, height: int = 360) -> str:
    """Standalone SVG line chart (or step chart) of one or more numeric series.

    Values may be ints or Fractions; coordinates are computed exactly and
    rounded to two decimals, so identical input gives identical bytes.
    """
    if not series or any(len(v) == 0 for v in series.values()):
        raise UsageError("nothing to plot")
    margin = 40
    values = [Fraction(v) for vs in series.values() for v in vs]
    lo, hi = min(values), max(values)
    span = hi - lo or Fraction(1)
    longest = max(len(v) for v in series.values())
    xspan = max(longest - 1, 1)
    plot_w, plot_h = width - 2 * margin, height - 2 * margin

    def xy(i, v):
        x = margin + Fraction(plot_w * i, xspan)
        y = margin + plot_h - (Fraction(v) - lo) / span * plot_h
        return x, y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{margin - 4}" y="{margin}" text-anchor="end" font-size="10">{_escape(_cell(hi))}</text>',
        f'<text x="{margin - 4}" y="{height - margin}" text-anchor="end" font-size="10">{_escape(_cell(lo))}</text>',
    ]
    if title:
        parts.append(f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{_escape(title)}</text>')
    for k, (label, vs) in enumerate(series.items()):
        colour = PALETTE[k % len(PALETTE)]
        pts = []
        for i, v in enumerate(vs):
            x, y = xy(i, v)
            if step and pts:
                pts.append(f"{_num(x)},{pts[-1].split(',')[1]}")
            pts.append(f"{_num(x)},{_num(y)}")
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        if len(series) > 1:
            ly = margin + 14 * k
            parts.append(f'<line x1="{width - margin - 90}" y1="{ly}" x2="{width - margin - 70}" y2="{ly}" stroke="{colour}"/>')
            parts.append(f'<text x="{width - margin - 66}" y="{ly + 4}" font-size="10">{_escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
