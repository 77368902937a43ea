"""Plain-text SVG output: heatmaps, isolines and markers, no plotting library."""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

# viridis sampled at 5 stops
_STOPS = np.array([
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
], dtype=float)


def colour(t: float) -> str:
    t = min(max(float(t), 0.0), 1.0) * (len(_STOPS) - 1)
    i = min(int(t), len(_STOPS) - 2)
    c = _STOPS[i] + (t - i) * (_STOPS[i + 1] - _STOPS[i])
    r, g, b = (int(round(v)) for v in c)
    return f"#{r:02x}{g:02x}{b:02x}"


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def contour_segments(Z: np.ndarray, level: float) -> list[tuple[float, float, float, float]]:
    """Marching-squares segments in index coordinates (column, row) of the cell centres."""
    segs = []
    ny, nx = Z.shape
    for j in range(ny - 1):
        for i in range(nx - 1):
            q = (Z[j, i], Z[j, i + 1], Z[j + 1, i + 1], Z[j + 1, i])
            if any(np.isnan(v) for v in q):
                continue
            corners = ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1))
            pts = []
            for k in range(4):
                a, b = q[k], q[(k + 1) % 4]
                if (a < level) != (b < level):
                    s = (level - a) / (b - a)
                    (x0, y0), (x1, y1) = corners[k], corners[(k + 1) % 4]
                    pts.append((x0 + s * (x1 - x0), y0 + s * (y1 - y0)))
            if len(pts) == 2:
                segs.append((*pts[0], *pts[1]))
            elif len(pts) == 4:
                segs.append((*pts[0], *pts[1]))
                segs.append((*pts[2], *pts[3]))
    return segs


def heatmap(Z: np.ndarray, extent: Sequence[float], title: str = "", markers: Iterable = (),
            levels: Optional[Sequence[float]] = None, outline: Optional[np.ndarray] = None,
            size: int = 480, vmin: Optional[float] = None, vmax: Optional[float] = None) -> str:
    """Render ``Z[row, col]`` (row 0 = lowest y) over ``extent = (x0, y0, x1, y1)``.

    NaN cells are left blank. ``markers`` are (x, y) points drawn as red
    rings; ``outline`` is a closed polyline in data coordinates.
    """
    Z = np.asarray(Z, dtype=float)
    ny, nx = Z.shape
    x0, y0, x1, y1 = extent
    pad, bar = 40, 60
    scale = size / max(x1 - x0, y1 - y0)
    w, hgt = (x1 - x0) * scale, (y1 - y0) * scale
    cw, ch = w / nx, hgt / ny
    finite = Z[np.isfinite(Z)]
    lo = float(finite.min()) if vmin is None and finite.size else (vmin or 0.0)
    hi = float(finite.max()) if vmax is None and finite.size else (vmax or 1.0)
    span = hi - lo if hi > lo else 1.0

    def sx(x):
        return pad + (x - x0) * scale

    def sy(y):
        return pad + hgt - (y - y0) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w + 2 * pad + bar)}" '
        f'height="{_fmt(hgt + 2 * pad)}" viewBox="0 0 {_fmt(w + 2 * pad + bar)} {_fmt(hgt + 2 * pad)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{pad}" y="{pad / 2 + 5}" font-family="sans-serif" font-size="14">{title}</text>')
    out.append('<g shape-rendering="crispEdges">')
    for j in range(ny):
        for i in range(nx):
            v = Z[j, i]
            if not np.isfinite(v):
                continue
            out.append(f'<rect x="{_fmt(pad + i * cw)}" y="{_fmt(pad + hgt - (j + 1) * ch)}" '
                       f'width="{_fmt(cw + 0.01)}" height="{_fmt(ch + 0.01)}" fill="{colour((v - lo) / span)}"/>')
    out.append("</g>")
    if levels:
        out.append('<g stroke="white" stroke-width="0.8" fill="none">')
        for level in levels:
            for a, b, c, d in contour_segments(Z, level):
                out.append(f'<line x1="{_fmt(pad + (a + 0.5) * cw)}" y1="{_fmt(pad + hgt - (b + 0.5) * ch)}" '
                           f'x2="{_fmt(pad + (c + 0.5) * cw)}" y2="{_fmt(pad + hgt - (d + 0.5) * ch)}"/>')
        out.append("</g>")
    if outline is not None and len(outline):
        pts = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in outline)
        out.append(f'<polygon points="{pts}" fill="none" stroke="black" stroke-width="1.2"/>')
    for x, y in markers:
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="5" fill="none" stroke="red" stroke-width="2"/>')
    # colour bar
    bx = pad + w + 15
    for k in range(50):
        out.append(f'<rect x="{_fmt(bx)}" y="{_fmt(pad + hgt * (1 - (k + 1) / 50))}" width="15" '
                   f'height="{_fmt(hgt / 50 + 0.01)}" fill="{colour(k / 49)}"/>')
    out.append(f'<text x="{_fmt(bx)}" y="{_fmt(pad - 4)}" font-family="sans-serif" font-size="10">{hi:.4g}</text>')
    out.append(f'<text x="{_fmt(bx)}" y="{_fmt(pad + hgt + 12)}" font-family="sans-serif" font-size="10">{lo:.4g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def shape_outline(shape) -> np.ndarray:
    return shape.as_polygon()
