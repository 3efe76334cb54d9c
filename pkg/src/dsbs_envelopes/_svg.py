"""Dependency-free SVG emitters for the figure command.

Display-only output: a polyline chart for curve families and a
marching-squares contour chart for surfaces on a rectangular lattice.
Everything is plain string assembly; no drawing library involved.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
)

_FONT = "font-family=\"Helvetica, Arial, sans-serif\""


def _ticks(lo: float, hi: float, target: int = 6) -> list:
    """Rounded tick positions covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(x: float) -> str:
    return f"{x:.6g}"


class _Frame:
    """Maps data coordinates onto a pixel viewport with margins and axes."""

    def __init__(self, x_range, y_range, width, height, title, xlabel, ylabel):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.width, self.height = width, height
        self.left, self.right, self.top, self.bottom = 64, 18, 34, 46
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel

    def px(self, x: float) -> float:
        span = self.width - self.left - self.right
        return self.left + (x - self.x0) / (self.x1 - self.x0) * span

    def py(self, y: float) -> float:
        span = self.height - self.top - self.bottom
        return self.height - self.bottom - (y - self.y0) / (self.y1 - self.y0) * span

    def chrome(self) -> list:
        w, h = self.width, self.height
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}">',
            f'<rect width="{w}" height="{h}" fill="white"/>',
        ]
        if self.title:
            parts.append(
                f'<text x="{w / 2:.1f}" y="20" text-anchor="middle" {_FONT} '
                f'font-size="15">{escape(self.title)}</text>'
            )
        x_axis_y = self.py(self.y0)
        y_axis_x = self.px(self.x0)
        for t in _ticks(self.x0, self.x1):
            x = self.px(t)
            parts.append(
                f'<line x1="{x:.1f}" y1="{x_axis_y:.1f}" x2="{x:.1f}" '
                f'y2="{x_axis_y + 4:.1f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{x:.1f}" y="{x_axis_y + 17:.1f}" text-anchor="middle" '
                f'{_FONT} font-size="11">{_fmt(t)}</text>'
            )
        for t in _ticks(self.y0, self.y1):
            y = self.py(t)
            parts.append(
                f'<line x1="{y_axis_x - 4:.1f}" y1="{y:.1f}" x2="{y_axis_x:.1f}" '
                f'y2="{y:.1f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{y_axis_x - 7:.1f}" y="{y + 4:.1f}" text-anchor="end" '
                f'{_FONT} font-size="11">{_fmt(t)}</text>'
            )
        parts.append(
            f'<rect x="{self.left}" y="{self.top}" width="{w - self.left - self.right}" '
            f'height="{h - self.top - self.bottom}" fill="none" stroke="black"/>'
        )
        if self.xlabel:
            parts.append(
                f'<text x="{w / 2:.1f}" y="{h - 8}" text-anchor="middle" {_FONT} '
                f'font-size="12">{escape(self.xlabel)}</text>'
            )
        if self.ylabel:
            x, y = 16, (self.top + h - self.bottom) / 2
            parts.append(
                f'<text x="{x}" y="{y:.1f}" text-anchor="middle" {_FONT} font-size="12" '
                f'transform="rotate(-90 {x} {y:.1f})">{escape(self.ylabel)}</text>'
            )
        return parts


def _poly_points(frame: _Frame, xs, ys) -> str:
    return " ".join(f"{frame.px(x):.2f},{frame.py(y):.2f}" for x, y in zip(xs, ys))


def polyline_plot(series, *, title="", xlabel="", ylabel="", width=720, height=480) -> str:
    """One chart with several labelled curves; series = [(xs, ys, label), ...]."""
    series = [(list(map(float, xs)), list(map(float, ys)), str(lbl)) for xs, ys, lbl in series]
    finite = [
        (x, y) for xs, ys, _ in series for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)
    ]
    if not finite:
        raise ValueError("no finite points to plot")
    xr = (min(p[0] for p in finite), max(p[0] for p in finite))
    yr = (min(p[1] for p in finite), max(p[1] for p in finite))
    frame = _Frame(xr, yr, width, height, title, xlabel, ylabel)
    parts = frame.chrome()
    for k, (xs, ys, label) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = [(x, y) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.6" '
            f'points="{_poly_points(frame, [p[0] for p in pts], [p[1] for p in pts])}"/>'
        )
        ly = frame.top + 16 + 15 * k
        lx = frame.width - frame.right - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{lx + 27}" y="{ly}" {_FONT} font-size="11">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def _cell_segments(x0, x1, y0, y1, v00, v01, v10, v11, level):
    """Marching-squares segments for one lattice cell at one level.

    v_ab is the value at (x_a, y_b); linear interpolation along edges.
    Returns 0, 1 or 2 segments ((xa, ya), (xb, yb)) in data coordinates.
    """

    def lerp(pa, pb, va, vb):
        if vb == va:
            frac = 0.5
        else:
            frac = (level - va) / (vb - va)
        frac = min(max(frac, 0.0), 1.0)
        return (pa[0] + frac * (pb[0] - pa[0]), pa[1] + frac * (pb[1] - pa[1]))

    corners = ((x0, y0, v00), (x1, y0, v10), (x1, y1, v11), (x0, y1, v01))
    idx = 0
    for bit, (_, _, v) in enumerate(corners):
        if v >= level:
            idx |= 1 << bit
    if idx in (0, 15):
        return []
    # Edge midpoints by interpolation: bottom, right, top, left.
    pts = {
        "b": lerp((x0, y0), (x1, y0), v00, v10),
        "r": lerp((x1, y0), (x1, y1), v10, v11),
        "t": lerp((x1, y1), (x0, y1), v11, v01),
        "l": lerp((x0, y1), (x0, y0), v01, v00),
    }
    table = {
        1: [("l", "b")],
        2: [("b", "r")],
        3: [("l", "r")],
        4: [("r", "t")],
        5: [("l", "t"), ("b", "r")],
        6: [("b", "t")],
        7: [("l", "t")],
        8: [("t", "l")],
        9: [("t", "b")],
        10: [("t", "r"), ("l", "b")],
        11: [("t", "r")],
        12: [("r", "l")],
        13: [("r", "b")],
        14: [("b", "l")],
    }
    return [(pts[a], pts[b]) for a, b in table[idx]]


def contour_plot(
    xs, ys, zgrid, levels, *, title="", xlabel="", ylabel="", width=720, height=560
) -> str:
    """Contour lines of ``zgrid[i][j]`` given at (xs[i], ys[j]), one color per level."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    z = [[float(v) for v in row] for row in zgrid]
    if len(z) != len(xs) or any(len(row) != len(ys) for row in z):
        raise ValueError("zgrid shape must be (len(xs), len(ys))")
    frame = _Frame((xs[0], xs[-1]), (ys[0], ys[-1]), width, height, title, xlabel, ylabel)
    parts = frame.chrome()
    for k, level in enumerate(levels):
        color = _PALETTE[k % len(_PALETTE)]
        chunks = []
        for i in range(len(xs) - 1):
            for j in range(len(ys) - 1):
                for (xa, ya), (xb, yb) in _cell_segments(
                    xs[i], xs[i + 1], ys[j], ys[j + 1],
                    z[i][j], z[i][j + 1], z[i + 1][j], z[i + 1][j + 1], float(level),
                ):
                    chunks.append(
                        f'<line x1="{frame.px(xa):.2f}" y1="{frame.py(ya):.2f}" '
                        f'x2="{frame.px(xb):.2f}" y2="{frame.py(yb):.2f}"/>'
                    )
        parts.append(f'<g stroke="{color}" stroke-width="1.2">')
        parts.extend(chunks)
        parts.append("</g>")
        ly = frame.top + 16 + 15 * k
        lx = frame.width - frame.right - 110
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.6"/>'
        )
        parts.append(
            f'<text x="{lx + 27}" y="{ly}" {_FONT} font-size="11">{_fmt(float(level))}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)
