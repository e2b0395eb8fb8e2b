"""Static SVG charts for experiment results, built from plain strings.

Output is deterministic: same numbers in, same bytes out.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["heatmap_svg", "line_chart_svg"]

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=40, bottom=60)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _num(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.1e}"
    return f"{v:.3g}"


def _open(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def line_chart_svg(
    x: list[float],
    series: dict[str, list[float]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = True,
) -> str:
    """Points joined by lines, one polyline per series; NaNs break nothing, they are skipped."""
    left, right = MARGIN["left"], WIDTH - MARGIN["right"]
    top, bottom = MARGIN["top"], HEIGHT - MARGIN["bottom"]
    tx = [math.log10(v) for v in x] if logx else list(x)
    finite = [v for ys in series.values() for v in ys if math.isfinite(v)]
    ylo, yhi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    xlo, xhi = min(tx), max(tx)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5

    def px(v):
        return left + (v - xlo) / (xhi - xlo) * (right - left)

    def py(v):
        return bottom - (v - ylo) / (yhi - ylo) * (bottom - top)

    out = _open(title)
    out.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>')
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>')
    for raw, t in zip(x, tx):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{bottom}" x2="{_fmt(px(t))}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{bottom + 18}" text-anchor="middle">{_num(raw)}</text>')
    for i in range(5):
        v = ylo + (yhi - ylo) * i / 4
        out.append(f'<line x1="{left - 5}" y1="{_fmt(py(v))}" x2="{left}" y2="{_fmt(py(v))}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(py(v) + 4)}" text-anchor="end">{_num(v)}</text>')
    out.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{(top + bottom) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(top + bottom) / 2})">{escape(ylabel)}</text>'
    )
    for k, (name, ys) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        pts = [(px(t), py(v)) for t, v in zip(tx, ys) if math.isfinite(v)]
        if len(pts) > 1:
            path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, b in pts:
            out.append(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3.5" fill="{color}"/>')
        ly = top + 10 + 20 * k
        out.append(f'<rect x="{right + 15}" y="{ly - 8}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{right + 32}" y="{ly + 2}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _diverging(v: float, vmax: float) -> str:
    # blue for negative, red for positive, white at zero
    if not math.isfinite(v):
        return "#999999"
    t = max(-1.0, min(1.0, v / vmax)) if vmax > 0 else 0.0
    if t >= 0:
        r, g, b = 255, int(255 * (1 - t)), int(255 * (1 - t))
    else:
        r, g, b = int(255 * (1 + t)), int(255 * (1 + t)), 255
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(
    rows: list[str],
    cols: list[str],
    values: list[list[float]],
    title: str = "",
    row_label: str = "",
    col_label: str = "",
) -> str:
    """Cell grid coloured on a symmetric diverging scale, with the value printed in each cell."""
    left, right = MARGIN["left"] + 20, WIDTH - MARGIN["right"]
    top, bottom = MARGIN["top"], HEIGHT - MARGIN["bottom"]
    cw = (right - left) / len(cols)
    ch = (bottom - top) / len(rows)
    finite = [abs(v) for r in values for v in r if math.isfinite(v)]
    vmax = max(finite) if finite else 1.0
    out = _open(title)
    for i, name in enumerate(rows):
        y = top + i * ch
        out.append(f'<text x="{left - 6}" y="{_fmt(y + ch / 2 + 4)}" text-anchor="end">{escape(name)}</text>')
        for j, v in enumerate(values[i]):
            x = left + j * cw
            out.append(
                f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cw)}" height="{_fmt(ch)}" '
                f'fill="{_diverging(v, vmax)}" stroke="white"/>'
            )
            label = _num(v) if math.isfinite(v) else "n/a"
            out.append(f'<text x="{_fmt(x + cw / 2)}" y="{_fmt(y + ch / 2 + 4)}" text-anchor="middle">{label}</text>')
    for j, name in enumerate(cols):
        out.append(f'<text x="{_fmt(left + (j + 0.5) * cw)}" y="{bottom + 18}" text-anchor="middle">{escape(name)}</text>')
    out.append(f'<text x="{(left + right) / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(col_label)}</text>')
    out.append(
        f'<text x="16" y="{(top + bottom) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {(top + bottom) / 2})">{escape(row_label)}</text>'
    )
    out.append(f'<text x="{right + 12}" y="{top + 10}">scale: ±{_num(vmax)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
