"""Minimal hand-emitted SVG plots (no plotting dependency).

All coordinates are formatted with a fixed precision and elements are emitted
in a fixed order, so outputs are byte-stable for golden-file comparisons.
Convention from the lattice figures: boundary spin +1 is drawn black, -1 white.
"""

from __future__ import annotations

import numpy as np

from .model import IsingGraph

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _open_svg(width: int, height: int) -> list[str]:
    return [
        _HEADER,
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">\n',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n',
    ]


class _Canvas:
    """Maps data coordinates into a fixed pixel box (SVG y axis points down)."""

    def __init__(self, xlim, ylim, size=640, margin=24):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        self.size = size
        self.margin = margin
        span = max(self.x1 - self.x0, self.y1 - self.y0, 1e-12)
        self.scale = (size - 2 * margin) / span

    def px(self, x: float) -> float:
        return self.margin + (x - self.x0) * self.scale

    def py(self, y: float) -> float:
        return self.size - self.margin - (y - self.y0) * self.scale


def render_graph_svg(g: IsingGraph, spins: np.ndarray | None = None) -> str:
    """Vertices, edges, and boundary spins; optionally fill interior spins too."""
    if g.embedding is None:
        raise ValueError("graph has no embedding to draw")
    xy = g.embedding
    canvas = _Canvas(
        (xy[:, 0].min(), xy[:, 0].max()), (xy[:, 1].min(), xy[:, 1].max())
    )
    r_vertex = max(2.0, canvas.scale * 0.3)

    parts = _open_svg(canvas.size, canvas.size)
    parts.append('<g stroke="#999999" stroke-width="0.5">\n')
    for u, v in g.edges:
        parts.append(
            f'<line x1="{_fmt(canvas.px(xy[u, 0]))}" y1="{_fmt(canvas.py(xy[u, 1]))}" '
            f'x2="{_fmt(canvas.px(xy[v, 0]))}" y2="{_fmt(canvas.py(xy[v, 1]))}"/>\n'
        )
    parts.append("</g>\n")

    parts.append('<g stroke="black" stroke-width="0.6">\n')
    for vid in range(g.n_vertices):
        if vid < g.n_interior:
            if spins is None:
                fill = "#bbbbbb"
                radius = r_vertex * 0.5
            else:
                fill = "black" if spins[vid] > 0 else "white"
                radius = r_vertex
        else:
            fill = "black" if g.boundary_spin[vid - g.n_interior] > 0 else "white"
            radius = r_vertex
        parts.append(
            f'<circle cx="{_fmt(canvas.px(xy[vid, 0]))}" cy="{_fmt(canvas.py(xy[vid, 1]))}" '
            f'r="{_fmt(radius)}" fill="{fill}"/>\n'
        )
    parts.append("</g>\n</svg>\n")
    return "".join(parts)


def render_trace_svg(avg_spin: np.ndarray, width: int = 800, height: int = 320) -> str:
    """Average-spin line plot over iterations with a dashed zero axis."""
    avg = np.asarray(avg_spin, dtype=np.float64)
    n = len(avg)
    margin = 30

    def px(it: float) -> float:
        return margin + (width - 2 * margin) * (it / max(n - 1, 1))

    def py(v: float) -> float:
        return margin + (height - 2 * margin) * (1.0 - (v + 1.0) / 2.0)

    parts = _open_svg(width, height)
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black" stroke-width="1"/>\n'
    )
    parts.append(
        f'<line x1="{margin}" y1="{_fmt(py(0.0))}" x2="{width - margin}" y2="{_fmt(py(0.0))}" '
        'stroke="#888888" stroke-dasharray="4 3" stroke-width="0.8"/>\n'
    )
    coords = " ".join(f"{_fmt(px(i))},{_fmt(py(float(v)))}" for i, v in enumerate(avg))
    parts.append(
        f'<polyline points="{coords}" fill="none" stroke="#1050a0" stroke-width="1"/>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def render_matching_svg(x: np.ndarray, mu_x: np.ndarray, pairs: np.ndarray) -> str:
    """Transport map: originals as circles, reflected images as plus marks,
    one segment from each mu(x_i) to its partner x_{m(i)}."""
    both = np.concatenate([x, mu_x], axis=0)
    canvas = _Canvas(
        (both[:, 0].min(), both[:, 0].max()), (both[:, 1].min(), both[:, 1].max())
    )
    cross = max(1.5, canvas.scale * 0.25)
    parts = _open_svg(canvas.size, canvas.size)

    parts.append('<g stroke="#cc3333" stroke-width="0.7">\n')
    for i in range(len(x)):
        j = int(pairs[i])
        parts.append(
            f'<line x1="{_fmt(canvas.px(mu_x[i, 0]))}" y1="{_fmt(canvas.py(mu_x[i, 1]))}" '
            f'x2="{_fmt(canvas.px(x[j, 0]))}" y2="{_fmt(canvas.py(x[j, 1]))}"/>\n'
        )
    parts.append("</g>\n")

    parts.append('<g fill="none" stroke="black" stroke-width="0.7">\n')
    for i in range(len(x)):
        parts.append(
            f'<circle cx="{_fmt(canvas.px(x[i, 0]))}" cy="{_fmt(canvas.py(x[i, 1]))}" '
            f'r="{_fmt(cross)}"/>\n'
        )
    parts.append("</g>\n")

    parts.append('<g stroke="#1050a0" stroke-width="0.7">\n')
    for i in range(len(mu_x)):
        cx, cy = canvas.px(mu_x[i, 0]), canvas.py(mu_x[i, 1])
        parts.append(
            f'<line x1="{_fmt(cx - cross)}" y1="{_fmt(cy)}" x2="{_fmt(cx + cross)}" y2="{_fmt(cy)}"/>\n'
        )
        parts.append(
            f'<line x1="{_fmt(cx)}" y1="{_fmt(cy - cross)}" x2="{_fmt(cx)}" y2="{_fmt(cy + cross)}"/>\n'
        )
    parts.append("</g>\n</svg>\n")
    return "".join(parts)
