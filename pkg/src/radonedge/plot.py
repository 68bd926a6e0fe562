"""Dependency-free SVG overlay of reconstructed and predicted edge profiles."""

from __future__ import annotations

import csv
import html
import math
from pathlib import Path

from .errors import InputError

__all__ = ["read_profile_csv", "write_profile_csv", "emit_plot", "render_svg"]

COLUMNS = ("h", "f_eps", "predicted", "abs_err")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 60


def write_profile_csv(path, rows) -> None:
    """``rows`` yields ``(h, f_eps, predicted, abs_err)``; floats use ``%.17g``."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % float(v) for v in row) + "\n")


def read_profile_csv(path) -> list[tuple[float, float, float]]:
    """``(h, f_eps, predicted)`` rows of a profile CSV."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:3]] != list(COLUMNS[:3]):
            raise InputError(f"{path}: expected header starting with {','.join(COLUMNS[:3])}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or not "".join(rec).strip():
                continue
            if len(rec) < 3:
                raise InputError(f"{path}: line {lineno}: expected at least 3 columns")
            try:
                h, f, p = (float(v) for v in rec[:3])
            except ValueError:
                raise InputError(f"{path}: line {lineno}: non-numeric value") from None
            if not all(math.isfinite(v) for v in (h, f, p)):
                raise InputError(f"{path}: line {lineno}: non-finite value")
            rows.append((h, f, p))
    if not rows:
        raise InputError(f"{path}: no data rows")
    return rows


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(rows, title: str = "edge profile") -> str:
    hs = [r[0] for r in rows]
    ys = [v for r in rows for v in r[1:3]]
    x_lo, x_hi = _span(min(hs), max(hs))
    y_lo, y_hi = _span(min(ys), max(ys))
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + pw * (x - x_lo) / (x_hi - x_lo)

    def sy(y):
        return TOP + ph * (1.0 - (y - y_lo) / (y_hi - y_lo))

    def poly(col, color, dash=""):
        pts = " ".join(f"{_fmt(sx(r[0]))},{_fmt(sy(r[col]))}" for r in rows)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        marks = "".join(
            f'<circle cx="{_fmt(sx(r[0]))}" cy="{_fmt(sy(r[col]))}" r="2" fill="{color}"/>' for r in rows
        )
        return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>\n{marks}'

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        yv = y_lo + (y_hi - y_lo) * i / 4
        out.append(f'<text x="{_fmt(sx(xv))}" y="{TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{LEFT - 6}" y="{_fmt(sy(yv) + 4)}" font-size="11" '
                   f'text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" font-size="13" text-anchor="middle">h</text>')
    out.append(f'<text x="18" y="{TOP + ph / 2}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph / 2})">f</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{TOP - 10}" font-size="13" text-anchor="middle">{html.escape(title)}</text>')
    out.append(poly(1, "#1f4e9c"))
    out.append(poly(2, "#c0392b", "6 4"))
    lx = LEFT + pw - 150
    out.append(f'<line x1="{lx}" y1="{TOP + 15}" x2="{lx + 25}" y2="{TOP + 15}" stroke="#1f4e9c" stroke-width="1.5"/>')
    out.append(f'<text x="{lx + 30}" y="{TOP + 19}" font-size="11">reconstructed</text>')
    out.append(f'<line x1="{lx}" y1="{TOP + 32}" x2="{lx + 25}" y2="{TOP + 32}" stroke="#c0392b" '
               f'stroke-width="1.5" stroke-dasharray="6 4"/>')
    out.append(f'<text x="{lx + 30}" y="{TOP + 36}" font-size="11">predicted</text>')
    out.append("</svg>\n")
    return "\n".join(out)


def emit_plot(csv_path, svg_path, title: str | None = None) -> Path:
    """Render a profile CSV as an SVG overlay; identical input gives identical bytes."""
    rows = read_profile_csv(csv_path)
    svg = render_svg(rows, title if title is not None else Path(csv_path).stem)
    out = Path(svg_path)
    out.write_text(svg)
    return out
