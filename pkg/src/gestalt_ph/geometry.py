"""Attributed planar point sets and their lift into (m+2)-dimensional space."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, DegenerateExtentError


@dataclass(frozen=True)
class AttributedPoint:
    x: float
    y: float
    attrs: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ConfigError(f"non-finite coordinate ({self.x}, {self.y})")
        object.__setattr__(self, "attrs", tuple((str(k), float(v)) for k, v in self.attrs))

    @property
    def attr_names(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.attrs)


@dataclass(frozen=True)
class AttributedCloud:
    """Planar points sharing one ordered attribute-name list.

    Objects with extent are expected to be reduced to their barycenters
    before they get here.
    """

    points: tuple[AttributedPoint, ...]
    attr_names: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ConfigError("a cloud needs at least one point")
        names = pts[0].attr_names
        for i, p in enumerate(pts):
            if p.attr_names != names:
                raise ConfigError(f"point {i} has attributes {p.attr_names}, expected {names}")
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate attribute names {names}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "attr_names", names)

    @classmethod
    def from_arrays(cls, xy, attrs: Mapping[str, Sequence[float]] | None = None) -> "AttributedCloud":
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        attrs = dict(attrs or {})
        cols = {k: np.asarray(v, dtype=float).ravel() for k, v in attrs.items()}
        for k, v in cols.items():
            if len(v) != len(xy):
                raise ConfigError(f"attribute {k!r} has {len(v)} values for {len(xy)} points")
        return cls(tuple(
            AttributedPoint(float(x), float(y), tuple((k, float(cols[k][i])) for k in cols))
            for i, (x, y) in enumerate(xy)
        ))

    def __len__(self):
        return len(self.points)

    @property
    def xy(self) -> np.ndarray:
        return np.array([(p.x, p.y) for p in self.points], dtype=float)

    def attribute_matrix(self) -> np.ndarray:
        """Raw attribute values, shape (n, m)."""
        return np.array([[v for _, v in p.attrs] for p in self.points], dtype=float).reshape(len(self), len(self.attr_names))


@dataclass(frozen=True, eq=False)
class EmbeddedCloud:
    points: np.ndarray
    attr_names: tuple[str, ...] = ()

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ConfigError("embedded cloud needs a non-empty (n, m+2) array")
        if pts.shape[1] != len(self.attr_names) + 2:
            raise ConfigError(f"expected {len(self.attr_names) + 2} coordinates, got {pts.shape[1]}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "attr_names", tuple(self.attr_names))

    @classmethod
    def planar(cls, xy) -> "EmbeddedCloud":
        return cls(np.asarray(xy, dtype=float).reshape(-1, 2))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return len(self.attr_names)

    @property
    def xy(self) -> np.ndarray:
        return self.points[:, :2]


def embed(cloud: AttributedCloud, scale: Mapping[str, float] | None = None) -> EmbeddedCloud:
    """Lift ``cloud`` to (x, y, z_1..z_m) with z_j = scale[name_j] * raw value.

    Attributes missing from ``scale`` keep their raw values (scale 1).
    """
    scale = dict(scale or {})
    for name, s in scale.items():
        if name not in cloud.attr_names:
            raise ConfigError(f"unknown attribute {name!r}; cloud has {list(cloud.attr_names)}")
        if not (s >= 0 and math.isfinite(s)):
            raise ConfigError(f"scale for {name!r} must be finite and >= 0, got {s}")
    factors = np.array([scale.get(name, 1.0) for name in cloud.attr_names], dtype=float)
    z = cloud.attribute_matrix() * factors
    return EmbeddedCloud(np.hstack([cloud.xy, z]), cloud.attr_names)


def distance_matrix(cloud: EmbeddedCloud | np.ndarray) -> np.ndarray:
    """Symmetric Euclidean distance matrix with an exact zero diagonal.

    Rows are independent; (a - b)**2 == (b - a)**2 keeps the result exactly symmetric.
    """
    x = cloud.points if isinstance(cloud, EmbeddedCloud) else np.asarray(cloud, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    dm = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    dm.setflags(write=False)
    return dm


def normalize_unit_square(cloud: AttributedCloud) -> AttributedCloud:
    """Translate and uniformly rescale positions so the longer bbox side spans [0, 1]."""
    xy = cloud.xy
    lo = xy.min(axis=0)
    extent = float((xy.max(axis=0) - lo).max())
    if extent <= 0:
        raise DegenerateExtentError("all points coincide; cannot normalize")
    out = np.clip((xy - lo) / extent, 0.0, 1.0)
    return AttributedCloud(tuple(
        AttributedPoint(float(x), float(y), p.attrs) for (x, y), p in zip(out, cloud.points)
    ))
