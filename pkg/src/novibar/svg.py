"""Static SVG rendering of a barcode (batch figure output).

The output is deterministic for identical input: no timestamps, ids, or
library-dependent metadata, just bars sorted the way the barcode stores
them, with infinite bars fading out at the right edge.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import Barcode
from .scalars import INFINITY

_PALETTE = ("#2c5282", "#b83280", "#2f855a", "#b7791f", "#6b46c1", "#c53030")


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_barcode_svg(
    barcode: Barcode, width: int = 640, row_height: int = 16, margin: int = 42
) -> str:
    rows = []
    for bar in barcode:
        for _ in range(bar.multiplicity):
            rows.append(bar)
    rows.sort(key=lambda b: (b.birth, b.length == INFINITY, b.length, b.degree or 0))
    n = len(rows)
    births = [b.birth for b in rows]
    deaths = [b.birth + b.length for b in rows if b.finite]
    lo = min(births, default=Fraction(0))
    hi = max(deaths + births, default=Fraction(1))
    if hi <= lo:
        hi = lo + 1
    pad = (hi - lo) / 10
    lo, hi = lo - pad, hi + pad
    span = hi - lo
    height = margin * 2 + max(n, 1) * row_height

    def x_of(value: Fraction) -> float:
        return margin + float((value - lo) / span) * (width - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="#444" stroke-width="1"/>',
    ]
    for tick in (lo + pad, hi - pad):
        x = _fmt(x_of(tick))
        parts.append(
            f'<line x1="{x}" y1="{height - margin}" x2="{x}" '
            f'y2="{height - margin + 5}" stroke="#444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x}" y="{height - margin + 18}" font-size="11" '
            f'font-family="monospace" text-anchor="middle" fill="#222">{tick}</text>'
        )
    for k, bar in enumerate(rows):
        y = margin + k * row_height + row_height // 2
        color = _PALETTE[(bar.degree or 0) % len(_PALETTE)]
        x1 = _fmt(x_of(bar.birth))
        if bar.finite:
            x2 = _fmt(x_of(bar.birth + bar.length))
            parts.append(
                f'<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" '
                f'stroke="{color}" stroke-width="6" stroke-linecap="round"/>'
            )
        else:
            x2 = _fmt(width - margin / 2)
            parts.append(
                f'<line x1="{x1}" y1="{y}" x2="{x2}" y2="{y}" '
                f'stroke="{color}" stroke-width="6" stroke-linecap="round" '
                f'stroke-dasharray="10 4" opacity="0.85"/>'
            )
        label = f"({bar.birth}, {'inf' if not bar.finite else bar.birth + bar.length})"
        if bar.degree is not None:
            label += f" deg {bar.degree}"
        parts.append(
            f'<text x="{margin}" y="{y - 5}" font-size="9" '
            f'font-family="monospace" fill="#555">{label}</text>'
        )
    if not rows:
        parts.append(
            f'<text x="{width // 2}" y="{height // 2}" font-size="13" '
            f'font-family="monospace" text-anchor="middle" fill="#555">'
            "empty barcode</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
