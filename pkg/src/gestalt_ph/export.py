"""JSON and SVG output. Numbers are written with 9 significant digits."""
from __future__ import annotations

import json
import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .clustering import SignificanceSplit
from .filtration import SkeletonGraph

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.9g}")
    return obj


def dumps(doc: dict) -> str:
    """Deterministic JSON: 9-digit floats, infinities as the string "inf"."""
    return json.dumps(_clean(doc), indent=2) + "\n"


def _n(x: float) -> str:
    return f"{x:.6g}"


class _Canvas:
    """Maps data coordinates into an SVG viewport with the y axis pointing up."""

    def __init__(self, xy: np.ndarray, size: float = 480.0, pad: float = 20.0):
        lo = xy.min(axis=0) if len(xy) else np.zeros(2)
        hi = xy.max(axis=0) if len(xy) else np.ones(2)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
        self.lo, self.span, self.size, self.pad = lo, span, size, pad
        self.parts: list[str] = []

    def map(self, p) -> tuple[float, float]:
        s = (self.size - 2 * self.pad) / self.span
        return self.pad + (p[0] - self.lo[0]) * s, self.size - self.pad - (p[1] - self.lo[1]) * s

    def line(self, a, b, color: str, width: float = 1.0, opacity: float = 1.0):
        (x1, y1), (x2, y2) = self.map(a), self.map(b)
        self.parts.append(f'<line x1="{_n(x1)}" y1="{_n(y1)}" x2="{_n(x2)}" y2="{_n(y2)}" '
                          f'stroke="{color}" stroke-width="{_n(width)}" stroke-opacity="{_n(opacity)}"/>')

    def dot(self, p, color: str, r: float = 3.0):
        x, y = self.map(p)
        self.parts.append(f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(r)}" fill="{color}"/>')

    def polyline(self, pts, color: str, width: float = 2.5):
        xy = " ".join(f"{_n(x)},{_n(y)}" for x, y in map(self.map, pts))
        self.parts.append(f'<polyline points="{xy}" fill="none" stroke="{color}" stroke-width="{_n(width)}"/>')

    def render(self, title: str = "") -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(self.size)}" height="{_n(self.size)}" '
                f'viewBox="0 0 {_n(self.size)} {_n(self.size)}">')
        body = [head, '<rect width="100%" height="100%" fill="white"/>']
        if title:
            body.append(f'<title>{escape(title)}</title>')
        return "\n".join(body + self.parts + ["</svg>"]) + "\n"


def render_skeleton(sk: SkeletonGraph, labels: Sequence[int] | None = None,
                    loops: Sequence[Sequence[int]] = (), paths: Sequence[Sequence[int]] = (),
                    title: str = "") -> str:
    """The 1-skeleton with vertices colored by group; loops and paths stroked on top."""
    xy = sk.coords
    cv = _Canvas(xy)
    for a, b in sk.edges:
        color = PALETTE[labels[a] % len(PALETTE)] if labels is not None and labels[a] == labels[b] else "#999999"
        cv.line(xy[a], xy[b], color, 1.0, 0.6)
    for k, loop in enumerate(loops):
        cv.polyline(xy[list(loop)], PALETTE[k % len(PALETTE)])
    for path in paths:
        cv.polyline(xy[list(path)], "#000000")
    for i in range(len(xy)):
        color = PALETTE[labels[i] % len(PALETTE)] if labels is not None else "#333333"
        cv.dot(xy[i], color)
    return cv.render(title)


def render_diagram(split: SignificanceSplit, title: str = "") -> str:
    """PD scatter with the diagonal; significant points in red, infinite deaths on a top rail."""
    pts = split.diagram.points
    finite = pts[np.isfinite(pts)] if len(pts) else np.zeros(1)
    top = float(finite.max()) if finite.size else 1.0
    top = top * 1.1 if top > 0 else 1.0
    rail = top
    cv = _Canvas(np.array([[0.0, 0.0], [top, top]]))
    cv.line((0, 0), (top, 0), "#000000")
    cv.line((0, 0), (0, top), "#000000")
    cv.line((0, 0), (top, top), "#999999")
    sig = set(split.significant_idx)
    for i, (b, d) in enumerate(pts):
        d = rail if math.isinf(d) else d
        cv.dot((b, d), "#d62728" if i in sig else "#1f77b4", 4.0 if i in sig else 3.0)
    return cv.render(title)


def render_diagrams(splits: Sequence[SignificanceSplit]) -> str:
    """Several diagrams side by side, one panel per split."""
    size = 480.0
    panels = []
    for k, split in enumerate(splits):
        inner = render_diagram(split, f"{split.dim}-PD").split("\n")
        body = "\n".join(inner[1:-2])
        panels.append(f'<g transform="translate({_n(k * size)},0)">\n{body}\n</g>')
    width = size * max(len(splits), 1)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(width)}" height="{_n(size)}" '
            f'viewBox="0 0 {_n(width)} {_n(size)}">')
    return "\n".join([head, *panels, "</svg>"]) + "\n"
