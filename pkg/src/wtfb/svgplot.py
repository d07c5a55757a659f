"""Static SVG line plot of a binary sweep.

Curve styles are fixed so regenerated figures diff cleanly:

=============  =========  ==========
curve          color      dash
=============  =========  ==========
``cb_s``       #7f7f7f    6 4
``cb_in``      #1f77b4    none
``cb_in_new``  #d62728    none
``cb_out``     #2ca02c    2 3
=============  =========  ==========
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

CURVES = (
    ("cb_s", "#7f7f7f", "6 4"),
    ("cb_in", "#1f77b4", None),
    ("cb_in_new", "#d62728", None),
    ("cb_out", "#2ca02c", "2 3"),
)
WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 64, "right": 150, "top": 30, "bottom": 52}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_max(v: float) -> float:
    if v <= 0:
        return 1.0
    step = 10 ** math.floor(math.log10(v))
    return math.ceil(v / step * 2) / 2 * step


def sweep_svg(rows, p1: float) -> str:
    """SVG document with one polyline per bound over p2."""
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]
    x_max = 0.5
    y_max = _nice_max(max((getattr(r, name) for r in rows for name, _, _ in CURVES), default=1.0))

    def sx(x):
        return MARGIN["left"] + pw * x / x_max

    def sy(y):
        return MARGIN["top"] + ph * (1 - y / y_max)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - MARGIN["right"] / 2:.2f}" y="18" text-anchor="middle">'
        f'{escape(f"binary wiretap channel with feedback, p1 = {p1:g}")}</text>',
    ]
    x0, y0 = sx(0), sy(0)
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(sx(x_max))}" y2="{_fmt(y0)}" stroke="black"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(sy(y_max))}" stroke="black"/>')
    for k in range(6):
        xv = x_max * k / 5
        out.append(f'<line x1="{_fmt(sx(xv))}" y1="{_fmt(y0)}" x2="{_fmt(sx(xv))}" y2="{_fmt(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(sx(xv))}" y="{_fmt(y0 + 18)}" text-anchor="middle">{xv:.1f}</text>')
        yv = y_max * k / 5
        out.append(f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(sy(yv))}" x2="{_fmt(x0)}" y2="{_fmt(sy(yv))}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x0 - 8)}" y="{_fmt(sy(yv) + 4)}" text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{_fmt(sx(x_max / 2))}" y="{HEIGHT - 12}" text-anchor="middle">p2</text>')
    out.append(f'<text x="16" y="{_fmt(sy(y_max / 2))}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_fmt(sy(y_max / 2))})">bits per channel use</text>')
    for i, (name, color, dash) in enumerate(CURVES):
        pts = " ".join(f"{_fmt(sx(r.p2))},{_fmt(sy(getattr(r, name)))}" for r in rows)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} points="{pts}"/>')
        ly = MARGIN["top"] + 20 + 22 * i
        lx = WIDTH - MARGIN["right"] + 16
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 28}" y2="{ly}" stroke="{color}" stroke-width="2"{dash_attr}/>')
        out.append(f'<text x="{lx + 34}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
