"""Deterministic SVG output: series line charts and Koch pre-fractal polygons.

Documents are built as plain strings on a fixed 800x500 canvas with fixed
margins and two-decimal coordinates, so identical inputs give identical bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError, RangeError
from .helix import koch2d_prefractal

WIDTH, HEIGHT = 800, 500
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 50}
SERIES_COLOR = "#1f4e79"
FIT_COLOR = "#c0392b"


def _f(v):
    return f"{v:.2f}"


def _header(title):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]


def _nice_step(span, target=6):
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if raw <= m * mag:
            return m * mag
    return 10 * mag


def render_series_plot(series, fits=(), title=""):
    """Line chart of ``series`` with one straight line per ``(Segment, LinearFit)``."""
    if series is None or len(series) == 0:
        raise DomainError("cannot plot an empty series")
    x = series.years.astype(float)
    y = series.values
    for seg, _ in fits:
        if seg.start_year < series.first_year or seg.end_year > series.last_year:
            raise RangeError(f"fit segment {seg.start_year}-{seg.end_year} outside series coverage")
    x0, x1 = x[0], x[-1]
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    lines = [(seg, fit, fit.predict([seg.start_year, seg.end_year])) for seg, fit in fits]
    ys = [y.min(), y.max()] + [v for _, _, p in lines for v in p]
    ylo, yhi = min(0.0, min(ys)), max(ys)
    if yhi == ylo:
        yhi = ylo + 1
    step = _nice_step(yhi - ylo)
    ylo = math.floor(ylo / step) * step
    yhi = math.ceil(yhi / step) * step
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (yhi - v) / (yhi - ylo) * ph

    out = _header(title)
    out.append(f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-family="sans-serif" '
               f'font-size="15">{escape(title)}</text>')
    bottom = MARGIN["top"] + ph
    out.append(f'<g stroke="black" stroke-width="1"><line x1="{MARGIN["left"]}" y1="{bottom}" '
               f'x2="{MARGIN["left"] + pw}" y2="{bottom}"/><line x1="{MARGIN["left"]}" y1="{MARGIN["top"]}" '
               f'x2="{MARGIN["left"]}" y2="{bottom}"/></g>')
    out.append('<g font-family="sans-serif" font-size="11">')
    span = x1 - x0
    tick = 10 if span <= 80 else (20 if span <= 200 else 50)
    for yr in range(int(math.ceil(x0 / tick) * tick), int(x1) + 1, tick):
        tx = px(yr)
        out.append(f'<line x1="{_f(tx)}" y1="{bottom}" x2="{_f(tx)}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_f(tx)}" y="{bottom + 18}" text-anchor="middle">{yr}</text>')
    for v in np.arange(ylo, yhi + step / 2, step):
        ty = py(v)
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{_f(ty)}" x2="{MARGIN["left"]}" y2="{_f(ty)}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{_f(ty + 4)}" text-anchor="end">{v:g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle">year</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.0f})">patents per million inhabitants</text>')
    out.append("</g>")
    pts = " ".join(f"{_f(px(a))},{_f(py(b))}" for a, b in zip(x, y))
    out.append(f'<polyline fill="none" stroke="{SERIES_COLOR}" stroke-width="1.5" points="{pts}"/>')
    for seg, fit, (ya, yb) in lines:
        out.append(
            f'<line class="fit" x1="{_f(px(seg.start_year))}" y1="{_f(py(ya))}" x2="{_f(px(seg.end_year))}" '
            f'y2="{_f(py(yb))}" stroke="{FIT_COLOR}" stroke-width="2"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def prefractal_path(n, size=1.0, offset=(0.0, 0.0)):
    """SVG path data for pre-fractal ``n`` scaled to ``size`` with y pointing down."""
    pts = koch2d_prefractal(n)
    ox, oy = offset
    coords = [(ox + size * a, oy - size * b) for a, b in pts]
    head, *rest = coords
    return f"M{_f(head[0])},{_f(head[1])} " + " ".join(f"L{_f(a)},{_f(b)}" for a, b in rest) + " Z"


def render_prefractal_plot(n):
    return render_prefractal_panel((n,), title=f"Koch pre-fractal n={n}")


def render_prefractal_panel(orders=(1, 2, 3, 4), title="Koch snowflake pre-fractals"):
    """Pre-fractals side by side, one cell per order."""
    out = _header(title)
    cell = WIDTH / len(orders)
    size = 0.62 * min(cell, HEIGHT)
    for i, n in enumerate(orders):
        # centre each snowflake in its cell; the base triangle's centroid is (0.5, sqrt(3)/6)
        cx = cell * (i + 0.5)
        cy = HEIGHT / 2
        offset = (cx - 0.5 * size, cy + math.sqrt(3) / 6 * size)
        out.append(f'<path class="prefractal" data-order="{n}" d="{prefractal_path(n, size, offset)}" '
                   f'fill="#d6e4f0" stroke="{SERIES_COLOR}" stroke-width="1"/>')
        out.append(f'<text x="{_f(cx)}" y="{HEIGHT - 30}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="13">n = {n}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
