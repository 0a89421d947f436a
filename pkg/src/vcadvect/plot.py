"""Dependency-free SVG line plots (log-scale y) for eyeballing preset output."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf",
)


def svg_line_plot(series, path, title="", width=720, height=440) -> Path:
    """``series`` is a list of ``(label, x, y)``; nonpositive or non-finite y is dropped."""
    left, right, top, bottom = 70, 210, 30, 45
    pw, ph = width - left - right, height - top - bottom
    cleaned = []
    for label, x, y in series:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y) & (y > 0)
        cleaned.append((label, x[keep], np.log10(y[keep])))
    xs = np.concatenate([c[1] for c in cleaned] or [np.zeros(1)])
    ys = np.concatenate([c[2] for c in cleaned] or [np.zeros(1)])
    if xs.size == 0:
        xs, ys = np.zeros(1), np.zeros(1)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(np.floor(ys.min())), float(np.ceil(ys.max()))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{left + pw / 2}" y="18" text-anchor="middle">{escape(title)}</text>',
        f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle">time</text>',
    ]
    for e in range(int(y0), int(y1) + 1):
        out.append(f'<text x="{left - 6}" y="{py(e) + 4:.1f}" text-anchor="end">1e{e}</text>')
        out.append(f'<line x1="{left}" x2="{left + pw}" y1="{py(e):.1f}" y2="{py(e):.1f}" '
                   'stroke="#ddd"/>')
    for t in np.linspace(x0, x1, 5):
        out.append(f'<text x="{px(t):.1f}" y="{top + ph + 15}" text-anchor="middle">{t:.3g}</text>')
    for i, (label, x, y) in enumerate(cleaned):
        colour = PALETTE[i % len(PALETTE)]
        if x.size:
            pts = " ".join(f"{px(a):.1f},{py(b):.1f}" for a, b in zip(x, y))
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 12 + 14 * i
        out.append(f'<line x1="{left + pw + 10}" x2="{left + pw + 28}" y1="{ly - 4}" y2="{ly - 4}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 32}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
