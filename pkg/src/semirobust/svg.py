"""Minimal SVG figures: an R_p line chart and signature scatter plots."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def line_chart(series: dict, xs, title: str, xlabel: str, ylabel: str,
               width: int = 640, height: int = 420) -> str:
    """One polyline per entry of ``series`` (label -> y values over ``xs``)."""
    ml, mr, mt, mb = 70, 150, 40, 55
    pw, ph = width - ml - mr, height - mt - mb
    xs = np.asarray(xs, dtype=float)
    ys = np.array([v for vals in series.values() for v in vals if v is not None], dtype=float)
    x0, x1 = float(xs.min()), float(xs.max())
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    y0 = min(0.0, float(ys.min())) if ys.size else 0.0
    y1 = max(1.0, float(ys.max())) if ys.size else 1.0

    def X(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return mt + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{ml + pw / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>']
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ml}" x2="{ml + pw}" y1="{_fmt(Y(t))}" y2="{_fmt(Y(t))}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{ml - 6}" y="{_fmt(Y(t) + 4)}" text-anchor="end">{t:g}</text>')
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(X(t))}" y="{mt + ph + 18}" text-anchor="middle">{t:g}</text>')
    out.append(f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(18,{mt + ph / 2}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    for s, (label, vals) in enumerate(series.items()):
        color = PALETTE[s % len(PALETTE)]
        pts = [(X(x), Y(v)) for x, v in zip(xs, vals) if v is not None]
        if pts:
            path = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
            out.extend(f'<circle cx="{_fmt(a)}" cy="{_fmt(b)}" r="3" fill="{color}"/>'
                       for a, b in pts)
        ly = mt + 16 + 20 * s
        out.append(f'<line x1="{ml + pw + 14}" x2="{ml + pw + 38}" y1="{ly}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 44}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def signature_scatter(panels: dict, axis_names=("u1", "u2"), size: int = 300) -> str:
    """Side-by-side scatter panels of 2-D signatures inside the unit circle.

    Each panel is scaled by its largest point norm so the cloud fits the
    circle; only directions matter for rankings.
    """
    pad = 30
    width = len(panels) * size
    height = size + 2 * pad
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    r = size / 2 - pad
    for i, (label, pts) in enumerate(panels.items()):
        P = np.asarray(pts, dtype=float)
        cx, cy = i * size + size / 2, pad + size / 2
        scale = float(np.max(np.linalg.norm(P, axis=1))) or 1.0
        out.append(f'<text x="{cx}" y="{pad - 8}" text-anchor="middle" font-size="14">'
                   f'{escape(label)}</text>')
        out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(r)}" fill="none" stroke="#999"/>')
        out.append(f'<line x1="{_fmt(cx - r)}" x2="{_fmt(cx + r)}" y1="{cy}" y2="{cy}" '
                   f'stroke="#ccc"/>')
        out.append(f'<line x1="{cx}" x2="{cx}" y1="{_fmt(cy - r)}" y2="{_fmt(cy + r)}" '
                   f'stroke="#ccc"/>')
        out.append(f'<text x="{_fmt(cx + r)}" y="{cy + 14}" text-anchor="end" fill="#666">'
                   f'{escape(axis_names[0])}</text>')
        out.append(f'<text x="{cx + 4}" y="{_fmt(cy - r + 10)}" fill="#666">'
                   f'{escape(axis_names[1])}</text>')
        color = PALETTE[i % len(PALETTE)]
        for x, y in P[:, :2] / scale:
            out.append(f'<circle cx="{_fmt(cx + x * r)}" cy="{_fmt(cy - y * r)}" r="2.5" '
                       f'fill="{color}" fill-opacity="0.8"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
