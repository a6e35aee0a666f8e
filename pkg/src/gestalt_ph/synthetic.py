"""Synthetic stimuli for each principle, shaped like the classic demo figures."""
from __future__ import annotations

import numpy as np

from .geometry import AttributedCloud

# Olympic layout for unit radius: three rings on top, two interlocking below.
OLYMPIC_CENTERS = ((0.0, 0.0), (2.2, 0.0), (4.4, 0.0), (1.1, -1.0), (3.3, -1.0))


def similarity_row() -> AttributedCloud:
    """Ten red/blue dots whose 0-PD is {inf, sqrt(125), 10 x5, 5 x3} under color scale 10."""
    xs = [0, 5, 15, 25, 30, 35, 45, 55, 60, 70]
    color = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1]
    return AttributedCloud.from_arrays([(x, 0.0) for x in xs], {"color": color})


def two_color_interleaved(rows: int = 4, cols: int = 4, spacing: float = 5.0) -> AttributedCloud:
    """Red lattice with a blue lattice offset by half a cell; each color spaced ``spacing``."""
    red = [(c * spacing, r * spacing) for r in range(rows) for c in range(cols)]
    blue = [(x + spacing / 2, y + spacing / 2) for x, y in red]
    return AttributedCloud.from_arrays(red + blue, {"color": [0] * len(red) + [1] * len(blue)})


def column_grid(columns: int = 4, rows: int = 5, within: float = 1.0, between: float = 3.0) -> AttributedCloud:
    pts = [(c * between, r * within) for c in range(columns) for r in range(rows)]
    return AttributedCloud.from_arrays(pts)


def circle(n: int = 12, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> np.ndarray:
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])


def arc_with_gap(n: int = 40, radius: float = 1.0, gap_factor: float = 1.8) -> np.ndarray:
    """``n`` evenly spaced points on a circle, leaving a gap of ``gap_factor`` steps."""
    step = 2 * np.pi / (n - 1 + gap_factor)
    t = step * np.arange(n)
    return radius * np.column_stack([np.cos(t), np.sin(t)])


def olympic_rings(per_ring: int = 30, radius: float = 1.0) -> np.ndarray:
    # phase offsets keep the sample sets of overlapping rings from coinciding
    return np.vstack([
        circle(per_ring, radius, (cx * radius, cy * radius), phase=0.1 * k)
        for k, (cx, cy) in enumerate(OLYMPIC_CENTERS)
    ])


def x_crossing(half: int = 5) -> np.ndarray:
    """Lattice points on y = x and y = -x sharing the origin; the y = x branch comes first."""
    k = np.arange(-half, half + 1)
    diag = np.column_stack([k, k])
    anti = np.column_stack([k, -k])[k != 0]
    return np.vstack([diag, anti]).astype(float)


def conflict_grid(size: int = 3, spacing: float = 1.0) -> AttributedCloud:
    """Rows share a shape value, columns share a color value."""
    pts, color, shape = [], [], []
    for r in range(size):
        for c in range(size):
            pts.append((c * spacing, r * spacing))
            color.append(c)
            shape.append(r)
    return AttributedCloud.from_arrays(pts, {"color": color, "shape": shape})


def convex_blob(radius: float = 1.0, spacing: float = 0.2, jitter: float = 0.2, seed: int = 0) -> np.ndarray:
    """Jittered square lattice clipped to a disc: filled, so any hole is a sampling gap."""
    rng = np.random.default_rng(seed)
    k = np.arange(-radius, radius + spacing / 2, spacing)
    gx, gy = np.meshgrid(k, k)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    pts = pts[np.hypot(pts[:, 0], pts[:, 1]) <= radius]
    return pts + rng.uniform(-jitter, jitter, size=pts.shape) * spacing


def add_clutter(cloud: AttributedCloud, k: int = 50, size_gap: float = 10.0,
                spread: float | None = None, seed: int = 0) -> tuple[AttributedCloud, dict[str, float]]:
    """Append ``k`` Gaussian clutter dots with random attribute values and a smaller size.

    Every point gains a ``size`` attribute: 1 for the originals and 0.1 for
    clutter (a tenth of the area). The returned scale map puts the clutter
    ``size_gap`` away from every original along that axis. Clutter indices
    follow the originals.
    """
    rng = np.random.default_rng(seed)
    xy = cloud.xy
    center = xy.mean(axis=0)
    if spread is None:
        spread = float(xy.std(axis=0).max()) or 1.0
    junk = center + rng.normal(0.0, spread, size=(k, 2))
    attrs = {}
    raw = cloud.attribute_matrix()
    for j, name in enumerate(cloud.attr_names):
        choices = np.unique(raw[:, j])
        attrs[name] = np.concatenate([raw[:, j], rng.choice(choices, size=k)])
    attrs["size"] = np.concatenate([np.ones(len(cloud)), np.full(k, 0.1)])
    return AttributedCloud.from_arrays(np.vstack([xy, junk]), attrs), {"size": size_gap / 0.9}
