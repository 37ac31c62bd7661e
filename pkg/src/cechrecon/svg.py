"""Barcode plots as plain SVG text (deterministic, diffable)."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .homology import Barcode

WIDTH = 640
LEFT, RIGHT, TOP = 60, 20, 30
ROW = 12
GROUP_GAP = 18


def _fmt(x: float) -> str:
    return f"{x:.3f}".rstrip("0").rstrip(".")


def emit_barcode_svg(barcode: Barcode, markers: Sequence[float] = (), title: str = "") -> str:
    """One horizontal line per bar, grouped by degree; dashed verticals at ``markers``.

    Infinite bars run to the right edge of the plot and end in an arrow head.
    """
    finite = [b.death for b in barcode.bars if not math.isinf(b.death)]
    finite += [b.birth for b in barcode.bars] + list(markers)
    xmax = max(finite, default=1.0) * 1.1 or 1.0
    plot_w = WIDTH - LEFT - RIGHT

    def x(v: float) -> float:
        return LEFT + plot_w * min(v, xmax) / xmax

    dims = sorted({b.dim for b in barcode.bars})
    rows = sum(len(barcode.in_dim(k)) for k in dims)
    height = TOP + rows * ROW + len(dims) * GROUP_GAP + 40
    axis_y = height - 25
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}">',
        '<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 z"/></marker></defs>',
    ]
    if title:
        out.append(f'<text x="{LEFT}" y="16" font-size="12">{escape(title)}</text>')
    out.append(f'<line class="axis" x1="{LEFT}" y1="{axis_y}" x2="{WIDTH - RIGHT}" y2="{axis_y}" stroke="black"/>')
    for t in range(6):
        v = xmax * t / 5
        out.append(
            f'<text class="tick" x="{x(v):.2f}" y="{axis_y + 14}" font-size="10" '
            f'text-anchor="middle">{_fmt(v)}</text>'
        )
    y = TOP
    for k in dims:
        y += GROUP_GAP
        out.append(f'<text class="dim-label" x="8" y="{y - 4}" font-size="11">H{k}</text>')
        for b in barcode.in_dim(k):
            inf = math.isinf(b.death)
            x2 = WIDTH - RIGHT if inf else x(b.death)
            death = "inf" if inf else repr(b.death)
            arrow = ' marker-end="url(#arrow)"' if inf else ""
            out.append(
                f'<line class="bar" data-dim="{k}" data-birth="{b.birth!r}" data-death="{death}" '
                f'x1="{x(b.birth):.2f}" y1="{y}" x2="{x2:.2f}" y2="{y}" stroke="black" '
                f'stroke-width="3"{arrow}/>'
            )
            y += ROW
    for m in markers:
        out.append(
            f'<line class="marker" data-alpha="{m!r}" x1="{x(m):.2f}" y1="{TOP}" x2="{x(m):.2f}" '
            f'y2="{axis_y}" stroke="red" stroke-dasharray="4 3"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
