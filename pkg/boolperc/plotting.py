"""Static SVG line charts written by hand: axes, ticks and one polyline per series."""
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 400
MARGIN = 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

Series = Dict[str, Tuple[Sequence[float], Sequence[float]]]


def _extent(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _ticks(lo: float, hi: float, n: int = 5) -> List[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def line_chart(
    series: Series,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    logx: bool = False,
) -> str:
    """Return an SVG document; `logx` plots log10 of x (non-positive x are dropped)."""
    cleaned = {}
    for name, (xs, ys) in series.items():
        x = np.asarray(xs, dtype=np.float64)
        y = np.asarray(ys, dtype=np.float64)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        x, y = x[keep], y[keep]
        if logx:
            x = np.log10(x)
        if len(x):
            cleaned[name] = (x, y)
    if not cleaned:
        xlo, xhi, ylo, yhi = 0.0, 1.0, 0.0, 1.0
    else:
        xlo, xhi = _extent(np.concatenate([x for x, _ in cleaned.values()]))
        ylo, yhi = _extent(np.concatenate([y for _, y in cleaned.values()]))

    plot_w, plot_h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(x: float) -> float:
        return MARGIN + (x - xlo) / (xhi - xlo) * plot_w

    def sy(y: float) -> float:
        return HEIGHT - MARGIN - (y - ylo) / (yhi - ylo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for t in _ticks(xlo, xhi):
        label = _fmt(10 ** t) if logx else _fmt(t)
        out.append(f'<line x1="{sx(t):.1f}" y1="{HEIGHT - MARGIN}" x2="{sx(t):.1f}" y2="{HEIGHT - MARGIN + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(t):.1f}" y="{HEIGHT - MARGIN + 20}" text-anchor="middle" font-size="11">{label}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<line x1="{MARGIN - 5}" y1="{sy(t):.1f}" x2="{MARGIN}" y2="{sy(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN - 8}" y="{sy(t) + 4:.1f}" text-anchor="end" font-size="11">{_fmt(t)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    out.append(
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">{escape(ylabel)}</text>'
    )
    for i, (name, (x, y)) in enumerate(cleaned.items()):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{points}"/>')
        for a, b in zip(x, y):
            out.append(f'<circle cx="{sx(a):.1f}" cy="{sy(b):.1f}" r="3" fill="{color}"/>')
        ly = MARGIN + 16 * i
        out.append(f'<line x1="{WIDTH - MARGIN - 110}" y1="{ly}" x2="{WIDTH - MARGIN - 90}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - MARGIN - 85}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save_line_chart(path: "str | Path", series: Series, **kwargs) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(line_chart(series, **kwargs), encoding="utf-8")
    logger.info(f"Wrote plot {path}")
    return path


def plot_path(output: "str | Path | None", default_stem: str) -> Path:
    """The .svg next to the output file, or <stem>.svg in the working directory."""
    if output is None:
        return Path(f"{default_stem}.svg")
    return Path(output).with_suffix(".svg")
