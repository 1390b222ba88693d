"""SVG drawing of an instance with one or more tours overlaid."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .tour import Tour

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e")
SIZE = 600
MARGIN = 20


def _f(v: float) -> str:
    return f"{v:.2f}"


def render_svg(inst, tours=(), title: str | None = None) -> str:
    """SVG 1.1 text; ``tours`` is a list of ``Tour`` or ``(Tour, style)``.

    ``style`` is a colour string or a dict with ``color``, ``width`` and
    ``dash``. Items are filled circles and placeholders open squares.
    Output depends only on the arguments.
    """
    pts = inst.coords()
    side = math.sqrt(inst.area)
    lo = min(0.0, float(pts.min()))
    hi = max(side, float(pts.max()))
    span = hi - lo if hi > lo else 1.0
    scale = (SIZE - 2 * MARGIN) / span

    def xy(v):
        x, y = inst.coord(v)
        return MARGIN + (x - lo) * scale, SIZE - MARGIN - (y - lo) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
    ]
    if title:
        out.append(f"  <title>{escape(title)}</title>")
    out.append(f'  <rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
    for k, entry in enumerate(tours):
        t, style = entry if isinstance(entry, tuple) else (entry, None)
        if not isinstance(t, Tour):
            raise TypeError("tours must hold Tour objects")
        if isinstance(style, str):
            style = {"color": style}
        style = style or {}
        color = style.get("color", PALETTE[k % len(PALETTE)])
        width = style.get("width", 1.5)
        dash = style.get("dash")
        seq = t.sequence()
        seq.append(seq[0])
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in map(xy, seq))
        extra = f' stroke-dasharray="{escape(str(dash))}"' if dash else ""
        out.append(
            f'  <polyline class="tour" points="{coords}" fill="none" '
            f'stroke="{escape(color)}" stroke-width="{width}"{extra}/>'
        )
    r = 4
    for v in range(1, inst.n + 1):
        x, y = xy(v)
        out.append(f'  <circle class="item" cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="black"/>')
    for v in range(inst.n + 1, 2 * inst.n + 1):
        x, y = xy(v)
        out.append(
            f'  <rect class="placeholder" x="{_f(x - r)}" y="{_f(y - r)}" '
            f'width="{2 * r}" height="{2 * r}" fill="none" stroke="black"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_svg(inst, tours, path, title: str | None = None) -> None:
    Path(path).write_text(render_svg(inst, tours, title))
