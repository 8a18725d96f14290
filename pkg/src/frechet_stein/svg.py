"""Standalone log-log SVG chart, written by hand (no plotting dependency)."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from xml.sax.saxutils import escape

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def loglog_svg(
    xs: Sequence[float],
    series: Mapping[str, Sequence[float | None]],
    *,
    title: str = "",
    xlabel: str = "n",
    width: int = 640,
    height: int = 420,
) -> str:
    """Render ``series`` (name -> y values aligned with ``xs``) on log-log axes.

    Non-positive or missing values are skipped.
    """
    pts = {
        name: [(x, y) for x, y in zip(xs, ys) if y is not None and y > 0 and math.isfinite(y)]
        for name, ys in series.items()
    }
    all_y = [y for p in pts.values() for _, y in p] or [1.0]
    lx0, lx1 = math.floor(math.log10(min(xs))), math.ceil(math.log10(max(xs)))
    ly0, ly1 = math.floor(math.log10(min(all_y))), math.ceil(math.log10(max(all_y)))
    if lx1 == lx0:
        lx1 += 1
    if ly1 == ly0:
        ly1 += 1
    left, right, top, bottom = 70, 160, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + pw * (math.log10(x) - lx0) / (lx1 - lx0)

    def sy(y):
        return top + ph * (1 - (math.log10(y) - ly0) / (ly1 - ly0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for e in range(lx0, lx1 + 1):
        x = sx(10.0**e)
        out.append(f'<line x1="{x:.2f}" y1="{top}" x2="{x:.2f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" text-anchor="middle">1e{e}</text>')
    for e in range(ly0, ly1 + 1):
        y = sy(10.0**e)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    out.append(
        f'<text x="{left + pw / 2}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    if title:
        out.append(f'<text x="{left + pw / 2}" y="22" text-anchor="middle" font-size="13">{escape(title)}</text>')
    for i, (name, p) in enumerate(pts.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        if p:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
            out.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="1.5"/>')
            out.extend(
                f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{colour}"/>' for x, y in p
            )
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 12}" y1="{ly}" x2="{left + pw + 32}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 38}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
