"""
Static SVG plots: Q-Q matching curves between groups and binned densities.

Output is plain, self-contained SVG text with fixed-precision coordinates,
so identical inputs give byte-identical files.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .divergence import bin_scores
from .empirical import EmpiricalDistribution

WIDTH = HEIGHT = 420
MARGIN = 56
PALETTE = ("#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#34495e")
MAX_QQ_POINTS = 2000
MARKER_LIMIT = 200


def qq_points(a: EmpiricalDistribution, b: EmpiricalDistribution, max_points: int = MAX_QQ_POINTS):
    """Quantile pairs ``(F_a^{-1}(u), F_b^{-1}(u))``.

    ``u`` runs over the merged jump grid ``{i/n_a} U {j/n_b}``; when that has
    more than ``max_points`` levels an even grid ``k/max_points`` is used.
    """
    grid = np.union1d(np.arange(1, a.n + 1) / a.n, np.arange(1, b.n + 1) / b.n)
    if grid.size > max_points:
        grid = np.arange(1, max_points + 1) / max_points
    return a.quantile(grid), b.quantile(grid)


def _f(v) -> str:
    return f"{v:.2f}"


def _ticks(lo, hi, n=5):
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _header(title: str) -> list:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def x(self, v):
        return MARGIN + (v - self.xlo) / (self.xhi - self.xlo) * (WIDTH - 2 * MARGIN)

    def y(self, v):
        return HEIGHT - MARGIN - (v - self.ylo) / (self.yhi - self.ylo) * (HEIGHT - 2 * MARGIN)

    def axes(self, xlabel, ylabel) -> list:
        x0, x1, y0, y1 = MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN
        out = [f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#333333"/>']
        for t in _ticks(self.xlo, self.xhi):
            out.append(f'<text x="{_f(self.x(t))}" y="{y0 + 16}" text-anchor="middle">{t:.3g}</text>')
        for t in _ticks(self.ylo, self.yhi):
            out.append(f'<text x="{x0 - 6}" y="{_f(self.y(t) + 4)}" text-anchor="end">{t:.3g}</text>')
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 14}" text-anchor="middle">{escape(xlabel)}</text>')
        out.append(f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>')
        return out


def _range(values):
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    pad = 0.02 * (hi - lo)
    return lo - pad, hi + pad


def qq_svg(a: EmpiricalDistribution, b: EmpiricalDistribution, label_a: str, label_b: str,
           title: str | None = None) -> str:
    """Q-Q matching plot of group ``b`` quantiles against group ``a`` quantiles.

    The dashed diagonal is the fair reference: the curve lies on it exactly
    when the two score distributions coincide.
    """
    xs, ys = qq_points(a, b)
    lo, hi = _range(np.concatenate([xs, ys]))
    fr = _Frame(lo, hi, lo, hi)
    out = _header(title or f"Quantile matching {label_a} vs {label_b}")
    out += fr.axes(f"score quantile, group {label_a}", f"score quantile, group {label_b}")
    out.append(f'<line x1="{_f(fr.x(lo))}" y1="{_f(fr.y(lo))}" x2="{_f(fr.x(hi))}" y2="{_f(fr.y(hi))}" '
               'stroke="#999999" stroke-dasharray="4 3"/>')
    pts = " ".join(f"{_f(fr.x(x))},{_f(fr.y(y))}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="{PALETTE[0]}" stroke-width="1.5"/>')
    if xs.size <= MARKER_LIMIT:
        out += [f'<circle cx="{_f(fr.x(x))}" cy="{_f(fr.y(y))}" r="2.5" fill="{PALETTE[0]}"/>'
                for x, y in zip(xs, ys)]
    out.append("</svg>")
    return "\n".join(out) + "\n"


def density_svg(dists: dict, edges, title: str = "Binned score density") -> str:
    """Step densities (mass / bin width) of each group on shared bins."""
    edges = np.asarray(edges, dtype=float)
    widths = np.diff(edges)
    dens = {g: bin_scores(d, edges).masses / widths for g, d in dists.items()}
    ymax = max(float(v.max()) for v in dens.values()) or 1.0
    fr = _Frame(float(edges[0]), float(edges[-1]), 0.0, 1.05 * ymax)
    out = _header(title)
    out += fr.axes("score", "density")
    for i, (g, v) in enumerate(dens.items()):
        color = PALETTE[i % len(PALETTE)]
        pts = [f"{_f(fr.x(edges[0]))},{_f(fr.y(0.0))}"]
        for j, h in enumerate(v):
            pts.append(f"{_f(fr.x(edges[j]))},{_f(fr.y(h))}")
            pts.append(f"{_f(fr.x(edges[j + 1]))},{_f(fr.y(h))}")
        pts.append(f"{_f(fr.x(edges[-1]))},{_f(fr.y(0.0))}")
        out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN + 14 + 16 * i
        out.append(f'<line x1="{WIDTH - MARGIN - 70}" y1="{ly - 4}" x2="{WIDTH - MARGIN - 52}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - MARGIN - 48}" y="{ly}">{escape(g)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
