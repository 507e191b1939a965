"""Minimal deterministic SVG emission for 2D projections.

Self-contained text output with fixed formatting and no timestamps, so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import numpy as np

__all__ = ["render_svg"]

_W, _H = 640, 480
_MARGIN = 54
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_MAX_POINTS = 20000
_MAX_VERTS = 60000


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    for m in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    first = np.ceil(lo / step) * step
    return np.arange(first, hi + 0.5 * step, step)


def render_svg(items, xlabel: str, ylabel: str, title: str = "") -> str:
    """Render ("line"|"points", (n, 2) array) items into an SVG document."""
    arrays = [np.asarray(a, dtype=float) for _, a in items]
    finite = [a[np.all(np.isfinite(a), axis=1)] for a in arrays]
    nonempty = [a for a in finite if len(a)]
    if nonempty:
        allpts = np.vstack(nonempty)
        x0, y0 = allpts.min(axis=0)
        x1, y1 = allpts.max(axis=0)
    else:
        x0 = y0 = -1.0
        x1 = y1 = 1.0
    padx = 0.05 * (x1 - x0) or 1.0
    pady = 0.05 * (y1 - y0) or 1.0
    x0, x1 = x0 - padx, x1 + padx
    y0, y1 = y0 - pady, y1 + pady

    def px(x):
        return _MARGIN + (x - x0) / (x1 - x0) * (_W - 2 * _MARGIN)

    def py(y):
        return _H - _MARGIN - (y - y0) / (y1 - y0) * (_H - 2 * _MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    # axes box and ticks
    out.append(f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
               f'height="{_H - 2 * _MARGIN}" fill="none" stroke="#444" '
               f'stroke-width="1"/>')
    for tx in _ticks(x0, x1):
        X = px(tx)
        out.append(f'<line x1="{X:.2f}" y1="{_H - _MARGIN}" x2="{X:.2f}" '
                   f'y2="{_H - _MARGIN + 5}" stroke="#444"/>')
        out.append(f'<text x="{X:.2f}" y="{_H - _MARGIN + 18}" '
                   f'font-size="11" text-anchor="middle" '
                   f'font-family="sans-serif">{tx:.6g}</text>')
    for ty in _ticks(y0, y1):
        Y = py(ty)
        out.append(f'<line x1="{_MARGIN - 5}" y1="{Y:.2f}" x2="{_MARGIN}" '
                   f'y2="{Y:.2f}" stroke="#444"/>')
        out.append(f'<text x="{_MARGIN - 8}" y="{Y + 4:.2f}" font-size="11" '
                   f'text-anchor="end" font-family="sans-serif">{ty:.6g}</text>')
    out.append(f'<text x="{_W / 2:.0f}" y="{_H - 14}" font-size="13" '
               f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="16" y="{_H / 2:.0f}" font-size="13" '
               f'text-anchor="middle" font-family="sans-serif" '
               f'transform="rotate(-90 16 {_H / 2:.0f})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{_W / 2:.0f}" y="24" font-size="14" '
                   f'text-anchor="middle" font-family="sans-serif">{title}</text>')

    for k, ((kind, _), pts) in enumerate(zip(items, finite)):
        color = _COLORS[k % len(_COLORS)]
        if kind == "points":
            if len(pts) > _MAX_POINTS:
                pts = pts[:: len(pts) // _MAX_POINTS + 1]
            for x, y in pts:
                out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" '
                           f'r="0.7" fill="{color}"/>')
        else:
            if len(pts) > _MAX_VERTS:
                pts = pts[:: len(pts) // _MAX_VERTS + 1]
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{coords}" fill="none" '
                       f'stroke="{color}" stroke-width="0.8"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
