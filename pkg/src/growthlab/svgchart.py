"""Self-contained SVG line charts for time series, with deterministic bytes.

No plotting dependency: charts are assembled as strings with fixed number
formatting, so identical input always yields byte-identical files.  CSV
remains the canonical output; these charts exist so a run can be eyeballed
without further tooling.
"""

from __future__ import annotations

import math
from typing import Sequence

from .core import DomainError

Series = Sequence[tuple[str, Sequence[tuple[float, float]]]]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_WIDTH = 760
_HEIGHT = 380
_MARGIN_LEFT = 72
_MARGIN_RIGHT = 16
_MARGIN_TOP = 34
_MARGIN_BOTTOM = 46


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]; pure and deterministic."""
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    else:
        step = 10.0 * mag
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _fmt_coord(x: float) -> str:
    return f"{x:.2f}"


def _fmt_value(v: float) -> str:
    return f"{v:.6g}"


def emit_svg(
    series: Series,
    path: str,
    *,
    title: str = "",
    x_label: str = "time steps",
    y_label: str = "",
) -> None:
    """Write a line chart of labeled (x, y) sequences to ``path``.

    Axis ranges cover the union of the series with a small padding; a
    constant series yields a horizontal line with the y-axis spanning the
    value plus/minus the padding.  Identical input produces byte-identical
    output.
    """
    if not series:
        raise DomainError("at least one series is required")
    for label, points in series:
        if not points:
            raise DomainError(f"series {label!r} has no points")

    xs = [float(x) for _, pts in series for x, _ in pts]
    ys = [float(y) for _, pts in series for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    pad = (y_hi - y_lo) * 0.05
    if pad == 0.0:
        pad = max(abs(y_lo) * 0.1, 1e-6)
    y_lo -= pad
    y_hi += pad

    plot_w = _WIDTH - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = _HEIGHT - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out: list[str] = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">'
    )
    out.append(f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{_WIDTH / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{_escape(title)}</text>'
        )

    # axes box
    out.append(
        f'<rect x="{_MARGIN_LEFT}" y="{_MARGIN_TOP}" width="{plot_w}" '
        f'height="{plot_h}" fill="none" stroke="#333" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(
            f'<line x1="{_fmt_coord(px)}" y1="{_MARGIN_TOP + plot_h}" '
            f'x2="{_fmt_coord(px)}" y2="{_MARGIN_TOP + plot_h + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_fmt_coord(px)}" y="{_MARGIN_TOP + plot_h + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f"{_fmt_value(t)}</text>"
        )
    for t in _nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(
            f'<line x1="{_MARGIN_LEFT - 5}" y1="{_fmt_coord(py)}" '
            f'x2="{_MARGIN_LEFT}" y2="{_fmt_coord(py)}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_MARGIN_LEFT - 8}" y="{_fmt_coord(py + 3.5)}" '
            f'text-anchor="end" font-family="sans-serif" font-size="11">'
            f"{_fmt_value(t)}</text>"
        )
    out.append(
        f'<text x="{_MARGIN_LEFT + plot_w / 2:.0f}" y="{_HEIGHT - 8}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">'
        f"{_escape(x_label)}</text>"
    )
    if y_label:
        cy = _MARGIN_TOP + plot_h / 2
        out.append(
            f'<text x="16" y="{cy:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {cy:.0f})">{_escape(y_label)}</text>'
        )

    for idx, (label, points) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(
            f"{_fmt_coord(sx(float(x)))},{_fmt_coord(sy(float(y)))}"
            for x, y in points
        )
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>'
        )
        # legend entry, top-right corner of the plot box
        ly = _MARGIN_TOP + 14 + 16 * idx
        lx = _MARGIN_LEFT + plot_w - 150
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 28}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{_escape(str(label))}</text>'
        )
    out.append("</svg>")

    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(out) + "\n")
    except OSError as exc:
        raise RuntimeError(f"failed to write SVG to {path}: {exc}") from exc


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
