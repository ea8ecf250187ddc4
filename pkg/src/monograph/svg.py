"""Minimal deterministic SVG plots of graphs with square and ball overlays."""

from __future__ import annotations

from typing import Sequence

Point = tuple[float, float]


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(
    series: Sequence[Sequence[Point]],
    squares: Sequence[tuple[float, float, float]] = (),
    balls: Sequence[tuple[float, float, float]] = (),
    width: int = 640,
    height: int = 400,
    title: str = "",
) -> str:
    """One polyline per series, one rect per square (left, bottom, side), one
    circle per ball (cx, cy, r).  Identical input gives identical bytes."""
    series = [list(s) for s in series]
    if not series or not any(series):
        raise ValueError("nothing to plot")
    xs = [p[0] for s in series for p in s] + [v for sq in squares for v in (sq[0], sq[0] + sq[2])]
    ys = [p[1] for s in series for p in s] + [v for sq in squares for v in (sq[1], sq[1] + sq[2])]
    xs += [v for b in balls for v in (b[0] - b[2], b[0] + b[2])]
    ys += [v for b in balls for v in (b[1] - b[2], b[1] + b[2])]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pad = 30
    sx = (width - 2 * pad) / (x1 - x0)
    sy = (height - 2 * pad) / (y1 - y0)
    s = min(sx, sy) if squares or balls else None

    def X(v: float) -> float:
        return pad + (v - x0) * (s or sx)

    def Y(v: float) -> float:
        return height - pad - (v - y0) * (s or sy)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" style="background:white">',
    ]
    if title:
        out.append(f'<text x="{pad}" y="{pad // 2 + 5}" font-size="12">{title}</text>')
    out.append(
        f'<g class="axes" stroke="black" stroke-width="1">'
        f'<line x1="{_fmt(X(x0))}" y1="{_fmt(Y(y0))}" x2="{_fmt(X(x1))}" y2="{_fmt(Y(y0))}"/>'
        f'<line x1="{_fmt(X(x0))}" y1="{_fmt(Y(y0))}" x2="{_fmt(X(x0))}" y2="{_fmt(Y(y1))}"/></g>'
    )
    colors = ["#1f4e9c", "#b03a2e", "#1e8449", "#7d3c98"]
    for i, ser in enumerate(series):
        pts = " ".join(f"{_fmt(X(x))},{_fmt(Y(y))}" for x, y in ser)
        out.append(f'<polyline fill="none" stroke="{colors[i % len(colors)]}" stroke-width="1" points="{pts}"/>')
    for left, bottom, side in squares:
        out.append(
            f'<rect class="square" x="{_fmt(X(left))}" y="{_fmt(Y(bottom + side))}" '
            f'width="{_fmt(side * s)}" height="{_fmt(side * s)}" fill="#f5b041" fill-opacity="0.4" stroke="#935116"/>'
        )
    for cx, cy, r in balls:
        out.append(
            f'<circle cx="{_fmt(X(cx))}" cy="{_fmt(Y(cy))}" r="{_fmt(r * s)}" fill="#58d68d" fill-opacity="0.3" stroke="#1d8348"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
