"""Dependency-free deterministic SVG charts.

Charts render CSV columns as a line or scatter plot.  Output bytes depend
only on the input data: fixed canvas geometry, fixed-precision coordinate
formatting, and no timestamps or generator metadata, so identical inputs
produce identical files.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .errors import ConfigError

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 30
MARGIN_BOTTOM = 50


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def read_xy(csv_path, x_col: str, y_col: str) -> tuple[list[float], list[float]]:
    """Extract two numeric columns; header must declare both names."""
    path = Path(csv_path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        for col in (x_col, y_col):
            if col not in header:
                raise ConfigError(f"column {col!r} not in {header} of {path}")
        xi, yi = header.index(x_col), header.index(y_col)
        xs, ys = [], []
        for row in reader:
            if not row:
                continue
            xs.append(float(row[xi]))
            ys.append(float(row[yi]))
    return xs, ys


def render_svg(
    xs: list[float],
    ys: list[float],
    x_label: str,
    y_label: str,
    kind: str = "line",
) -> str:
    """Chart body as an SVG string; empty data yields empty axes."""
    if kind not in ("line", "scatter"):
        raise ConfigError(f"unknown plot kind {kind!r}")
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{x_label}</text>',
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="monospace" font-size="13" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2:.1f})">{y_label}</text>',
    ]
    if xs:
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if x_hi == x_lo:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

        def sx(v: float) -> float:
            return MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

        def sy(v: float) -> float:
            return MARGIN_TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

        for tx in _ticks(x_lo, x_hi):
            parts.append(
                f'<line x1="{sx(tx):.2f}" y1="{MARGIN_TOP + plot_h}" '
                f'x2="{sx(tx):.2f}" y2="{MARGIN_TOP + plot_h + 5}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{sx(tx):.2f}" y="{MARGIN_TOP + plot_h + 20}" text-anchor="middle" '
                f'font-family="monospace" font-size="11">{_fmt(tx)}</text>'
            )
        for ty in _ticks(y_lo, y_hi):
            parts.append(
                f'<line x1="{MARGIN_LEFT - 5}" y1="{sy(ty):.2f}" '
                f'x2="{MARGIN_LEFT}" y2="{sy(ty):.2f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{MARGIN_LEFT - 8}" y="{sy(ty) + 4:.2f}" text-anchor="end" '
                f'font-family="monospace" font-size="11">{_fmt(ty)}</text>'
            )
        coords = [(sx(x), sy(y)) for x, y in zip(xs, ys)]
        if kind == "line" and len(coords) > 1:
            points = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
            parts.append(
                f'<polyline points="{points}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>'
            )
        for x, y in coords:
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2.2" fill="#1f4e9c"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot_csv(csv_path, x_col: str, y_col: str, out_path, kind: str = "line") -> Path:
    """Read two CSV columns and write the chart; returns the output path."""
    xs, ys = read_xy(csv_path, x_col, y_col)
    finite = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
    xs, ys = [p[0] for p in finite], [p[1] for p in finite]
    out = Path(out_path)
    out.write_text(render_svg(xs, ys, x_col, y_col, kind))
    return out
