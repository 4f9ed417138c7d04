"""Minimal deterministic SVG emission for histograms and line plots.

Hand-rolled rather than delegated to a plotting library so that a fixed
input always yields byte-identical files; every coordinate is formatted
through one fixed-precision path.
"""

from __future__ import annotations

import numpy as np

WIDTH = 640
HEIGHT = 400
MARGIN = 50

_AXIS_STYLE = 'stroke="#333" stroke-width="1"'
_SERIES_COLORS = ("#1f6fb2", "#d1495b", "#3c8d53", "#8857a3")


def _fmt(x: float) -> str:
    return format(float(x), ".4f").rstrip("0").rstrip(".")


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        span = 1.0
    return [(out_lo + (v - lo) / span * (out_hi - out_lo)) for v in values]


def _frame(title: str, x_label: str, y_label: str, body: list[str]) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" {_AXIS_STYLE}/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" {_AXIS_STYLE}/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif">{x_label}</text>',
        f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {HEIGHT // 2})">{y_label}</text>',
    ]
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def histogram_svg(values, title: str, x_label: str, bins: int = 30) -> str:
    """Histogram of a series as a standalone SVG document."""
    x = np.asarray(values, dtype=float)
    counts, edges = np.histogram(x, bins=bins)
    top = max(int(counts.max()), 1)
    body = []
    plot_w = WIDTH - 2 * MARGIN
    bar_w = plot_w / bins
    for i, count in enumerate(counts):
        h = (HEIGHT - 2 * MARGIN) * count / top
        x0 = MARGIN + i * bar_w
        y0 = HEIGHT - MARGIN - h
        body.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(bar_w)}" '
            f'height="{_fmt(h)}" fill="{_SERIES_COLORS[0]}" stroke="#ffffff" stroke-width="0.5"/>'
        )
    body.append(
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 16}" font-size="11" '
        f'font-family="sans-serif">{_fmt(edges[0])}</text>'
    )
    body.append(
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" text-anchor="end" '
        f'font-size="11" font-family="sans-serif">{_fmt(edges[-1])}</text>'
    )
    body.append(
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" text-anchor="end" font-size="11" '
        f'font-family="sans-serif">{top}</text>'
    )
    return _frame(title, x_label, "count", body)


def line_plot_svg(t, series: dict[str, np.ndarray], title: str, x_label: str, y_label: str) -> str:
    """Overlayed line series on a common time axis, with a small legend."""
    t = np.asarray(t, dtype=float)
    all_values = np.concatenate([np.asarray(v, dtype=float) for v in series.values()])
    y_lo, y_hi = float(all_values.min()), float(all_values.max())
    if y_lo == y_hi:
        y_lo -= 1.0
        y_hi += 1.0
    body = []
    xs = _scale(t, t[0], t[-1], MARGIN, WIDTH - MARGIN)
    for idx, (name, values) in enumerate(series.items()):
        ys = _scale(np.asarray(values, dtype=float), y_lo, y_hi, HEIGHT - MARGIN, MARGIN)
        pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in zip(xs, ys))
        color = _SERIES_COLORS[idx % len(_SERIES_COLORS)]
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN + 16 * idx
        body.append(
            f'<line x1="{WIDTH - MARGIN - 110}" y1="{ly}" x2="{WIDTH - MARGIN - 86}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        body.append(
            f'<text x="{WIDTH - MARGIN - 80}" y="{ly + 4}" font-size="11" '
            f'font-family="sans-serif">{name}</text>'
        )
    body.append(
        f'<text x="{MARGIN - 6}" y="{HEIGHT - MARGIN + 4}" text-anchor="end" font-size="11" '
        f'font-family="sans-serif">{_fmt(y_lo)}</text>'
    )
    body.append(
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" text-anchor="end" font-size="11" '
        f'font-family="sans-serif">{_fmt(y_hi)}</text>'
    )
    return _frame(title, x_label, y_label, body)
