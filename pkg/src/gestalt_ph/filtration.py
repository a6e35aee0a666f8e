"""Vietoris-Rips filtrations over a distance matrix.

Simplices are plain tuples of strictly increasing point indices. A
:class:`Filtration` keeps them column-wise in numpy arrays because the
full complex of a few hundred points already holds millions of triangles.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .errors import CapacityError, ParameterError

Simplex = tuple

DEFAULT_MAX_SIMPLICES = 5_000_000
_CHUNK = 1 << 14


@dataclass(frozen=True, eq=False)
class Filtration:
    """Simplices sorted by (value, dim, lexicographic vertices).

    ``verts`` is padded with -1 past each simplex's last vertex.
    """

    values: np.ndarray
    dims: np.ndarray
    verts: np.ndarray
    n_points: int
    max_dim: int
    max_eps: float

    def __post_init__(self):
        for a in (self.values, self.dims, self.verts):
            a.setflags(write=False)

    def __len__(self):
        return len(self.values)

    def simplex(self, pos: int) -> Simplex:
        d = int(self.dims[pos])
        return tuple(int(v) for v in self.verts[pos, : d + 1])

    def __iter__(self) -> Iterator[tuple[Simplex, float]]:
        for pos in range(len(self)):
            yield self.simplex(pos), float(self.values[pos])

    @property
    def entries(self) -> list[tuple[Simplex, float]]:
        return list(self)

    def positions(self, dim: int) -> np.ndarray:
        return self._positions_by_dim[dim] if dim < len(self._positions_by_dim) else np.empty(0, np.int64)

    @cached_property
    def _positions_by_dim(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.dims == d) for d in range(self.max_dim + 1)]

    def count(self, dim: int) -> int:
        return len(self.positions(dim))

    def prefix_length(self, eps: float) -> int:
        """Number of entries with value <= eps."""
        return int(np.searchsorted(self.values, eps, side="right"))

    @cached_property
    def _keys(self) -> list[np.ndarray]:
        return [_encode(self.verts[p, : d + 1], self.n_points) for d, p in enumerate(self._positions_by_dim)]

    def index_of(self, simplices, dim: int) -> np.ndarray:
        """Filtration positions of an (k, dim+1) array of sorted vertex tuples; -1 if absent."""
        simplices = np.asarray(simplices, dtype=np.int64).reshape(-1, dim + 1)
        if dim > self.max_dim or len(simplices) == 0:
            return np.full(len(simplices), -1, dtype=np.int64)
        keys = self._keys[dim]
        if len(keys) == 0:
            return np.full(len(simplices), -1, dtype=np.int64)
        order = self._key_order[dim]
        q = _encode(simplices, self.n_points)
        hit = order[np.searchsorted(keys, q, sorter=order).clip(max=len(keys) - 1)]
        return np.where(keys[hit] == q, self._positions_by_dim[dim][hit], -1).astype(np.int64)

    @cached_property
    def _key_order(self) -> list[np.ndarray]:
        return [np.argsort(k, kind="stable") for k in self._keys]

    def to_text(self) -> str:
        """Debug export, one ``value dim v0 v1 ...`` line per simplex in order."""
        lines = []
        for s, v in self:
            lines.append(" ".join([f"{v:.9g}", str(len(s) - 1), *map(str, s)]))
        return "\n".join(lines) + "\n"


def _encode(simplices: np.ndarray, n: int) -> np.ndarray:
    keys = np.zeros(len(simplices), dtype=np.int64)
    for c in range(simplices.shape[1]):
        keys = keys * n + simplices[:, c]
    return keys


def build_vr(dm, max_dim: int = 2, max_eps: float | None = None,
             max_simplices: int = DEFAULT_MAX_SIMPLICES) -> Filtration:
    """Vietoris-Rips filtration: every vertex subset with all pairwise distances <= max_eps.

    ``max_eps`` defaults to the diameter, so the final complex is a full
    simplex and every 1-cycle gets a finite death.
    """
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if max_dim < 0:
        raise ParameterError(f"max_dim must be >= 0, got {max_dim}")
    if max_eps is None:
        max_eps = float(dm.max()) if n > 1 else 0.0
    elif not max_eps > 0:
        raise ParameterError(f"max_eps must be > 0, got {max_eps}")
    max_eps = float(max_eps)

    total = n
    if total > max_simplices:
        raise CapacityError(f"{n} vertices exceed the simplex cap {max_simplices}")
    blocks_v = [np.arange(n, dtype=np.int64)[:, None]]
    blocks_val = [np.zeros(n)]
    adj = dm <= max_eps
    np.fill_diagonal(adj, False)

    if max_dim >= 1 and n > 1:
        i, j = np.nonzero(np.triu(adj, 1))
        edges = np.stack([i, j], axis=1).astype(np.int64)
        total += len(edges)
        if total > max_simplices:
            raise CapacityError(f"{total} simplices through dim 1 exceed the cap {max_simplices}")
        blocks_v.append(edges)
        blocks_val.append(dm[i, j])
        current, current_val = edges, dm[i, j]
        for _ in range(2, max_dim + 1):
            if len(current) == 0:
                break
            current, current_val = _extend_cliques(current, current_val, adj, dm, max_simplices - total)
            total += len(current)
            blocks_v.append(current)
            blocks_val.append(current_val)

    width = max_dim + 1
    verts = np.full((total, width), -1, dtype=np.int32)
    dims = np.empty(total, dtype=np.int8)
    values = np.empty(total)
    at = 0
    for d, (bv, bval) in enumerate(zip(blocks_v, blocks_val)):
        k = len(bv)
        verts[at:at + k, : d + 1] = bv
        dims[at:at + k] = d
        values[at:at + k] = bval
        at += k

    keys = [verts[:, c] for c in range(width - 1, -1, -1)] + [dims, values]
    order = np.lexsort(keys)
    return Filtration(values[order], dims[order], verts[order], n, max_dim, max_eps)


def _extend_cliques(simplices, values, adj, dm, budget):
    """All (k+1)-cliques whose lowest k vertices form a listed k-clique."""
    n = adj.shape[0]
    upper = np.arange(n)
    out_s, out_v = [], []
    produced = 0
    for start in range(0, len(simplices), _CHUNK):
        s = simplices[start:start + _CHUNK]
        mask = upper[None, :] > s[:, -1:]
        for c in range(s.shape[1]):
            mask &= adj[s[:, c]]
        rows, new = np.nonzero(mask)
        produced += len(rows)
        if produced > budget:
            raise CapacityError(
                f"Rips complex of dim {s.shape[1]} exceeds the simplex cap; "
                "lower max_eps or max_dim, or raise the cap")
        val = values[start:start + _CHUNK][rows]
        for c in range(s.shape[1]):
            val = np.maximum(val, dm[s[rows, c], new])
        out_s.append(np.hstack([s[rows], new[:, None].astype(np.int64)]))
        out_v.append(val)
    width = simplices.shape[1] + 1
    if not out_s:
        return np.empty((0, width), dtype=np.int64), np.empty(0)
    return np.vstack(out_s), np.concatenate(out_v)


def complex_at(f: Filtration, eps: float) -> set[Simplex]:
    """The state VR(eps): every simplex whose value is <= eps."""
    if not (0 <= eps <= f.max_eps):
        raise ParameterError(f"eps={eps} outside [0, {f.max_eps}]")
    return {f.simplex(p) for p in range(f.prefix_length(eps))}


@dataclass(frozen=True, eq=False)
class SkeletonGraph:
    """Vertices and edges of a complex, with planar coordinates for geometry."""

    coords: np.ndarray
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(nb)) for v, nb in adj.items()}

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def length(self, a: int, b: int) -> float:
        return float(np.hypot(*(self.coords[b] - self.coords[a])))

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adjacency.get(a, ())


def one_skeleton(simplices: Iterable[Simplex], coords) -> SkeletonGraph:
    """Graph of the 0- and 1-simplices; ``coords`` are the planar (x, y) of every point."""
    coords = np.asarray(coords, dtype=float)[:, :2]
    verts, edges = set(), set()
    for s in simplices:
        if len(s) == 1:
            verts.add(s[0])
        elif len(s) == 2:
            a, b = sorted(s)
            if a == b:
                continue
            edges.add((a, b))
            verts.update((a, b))
    c = coords.copy()
    c.setflags(write=False)
    return SkeletonGraph(c, tuple(sorted(verts)), tuple(sorted(edges)))


def skeleton_at(f: Filtration, eps: float, coords) -> SkeletonGraph:
    """``one_skeleton(complex_at(f, eps))`` without materializing higher simplices."""
    if not (0 <= eps <= f.max_eps):
        raise ParameterError(f"eps={eps} outside [0, {f.max_eps}]")
    k = f.prefix_length(eps)
    low = f.dims[:k] <= 1
    return one_skeleton((f.simplex(p) for p in np.flatnonzero(low)), coords)
