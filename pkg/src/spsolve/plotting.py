"""Deterministic SVG line plots on a fixed 800x600 canvas."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 30, 40, 60
COLORS = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad")


def _fmt(x: float) -> str:
    return format(x, ".4g")


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _range(values: np.ndarray) -> tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi == lo:
        pad = abs(hi) if hi else 1.0
        return lo - 0.5 * pad, hi + 0.5 * pad
    return lo, hi


def line_plot_svg(x, series: dict, title: str, xlabel: str, ylabel: str = "") -> str:
    """SVG text for one or more curves sharing an x axis."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("nothing to plot")
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    x0, x1 = _range(x)
    y0, y1 = _range(np.concatenate(list(ys.values())))
    pw, ph = WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{title}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(
            f'<text x="{sx(t):.2f}" y="{MARGIN_T + ph + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>'
        )
    for t in _ticks(y0, y1):
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{sy(t) + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{xlabel}</text>'
    )
    if ylabel:
        out.append(
            f'<text x="20" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14" transform="rotate(-90 20 {MARGIN_T + ph / 2:.2f})">{ylabel}</text>'
        )
    for i, (name, y) in enumerate(ys.items()):
        color = COLORS[i % len(COLORS)]
        ok = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(
            f'<text x="{MARGIN_L + pw - 10}" y="{MARGIN_T + 20 + 18 * i}" text-anchor="end" '
            f'font-family="sans-serif" font-size="13" fill="{color}">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing input {path}")
    lines = path.read_text().splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        if line.strip():
            rows.append([_to_float(c) for c in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def _to_float(s: str) -> float:
    s = s.strip()
    if s in ("true", "True"):
        return 1.0
    if s in ("false", "False"):
        return 0.0
    try:
        return float(s)
    except ValueError:
        return math.nan


def plot_file(path, out_dir=None) -> list[Path]:
    """Write SVG panels for a profile CSV (r, u, phi) or a sweep CSV."""
    path = Path(path)
    header, data = read_csv(path)
    if data.shape[0] == 0:
        raise ValueError(f"{path} has no rows to plot")
    out_dir = Path(out_dir) if out_dir is not None else path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if header[:3] == ["r", "u", "phi"]:
        svg = line_plot_svg(data[:, 0], {"u": data[:, 1], "phi": data[:, 2]}, path.stem, "r")
        target = out_dir / f"{path.stem}.svg"
        target.write_text(svg, newline="\n")
        written.append(target)
    elif "level" in header:
        col = header.index("level")
        svg = line_plot_svg(data[:, 0], {"level": data[:, col]}, path.stem, header[0], "level")
        target = out_dir / f"{path.stem}_level.svg"
        target.write_text(svg, newline="\n")
        written.append(target)
    else:
        raise ValueError(f"unrecognised columns {header}")
    return written
