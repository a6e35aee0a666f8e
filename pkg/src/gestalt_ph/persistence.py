"""Persistent homology of a filtration by Z/2 boundary-matrix reduction.

Columns are sorted arrays of face positions; adding two columns is their
symmetric difference. Pairs come from reducing the coboundary matrix (the
anti-transpose of the boundary matrix), which yields the same pairing as
the left-to-right boundary reduction with far fewer column additions on
Rips filtrations, and lets columns known to be deaths one dimension lower
be cleared. Boundary columns are still reduced, lazily and only up to the
largest death whose representative cycle is requested.
``reduce_standard`` is the textbook left-to-right loop over every column,
kept as the slow reference the fast path must agree with.

Homology in the top dimension of the complex is not reported: without
cofaces it never dies, so those classes are truncation artifacts. A
vertex-only filtration still reports its dimension-0 classes.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .errors import UnsupportedRepresentativeError
from .filtration import Filtration

INF = math.inf


@dataclass(frozen=True)
class PersistencePair:
    dim: int
    birth: float
    death: float
    birth_index: int
    death_index: int | None = None

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    @property
    def is_finite(self) -> bool:
        return self.death_index is not None


@dataclass(frozen=True, eq=False)
class Diagram:
    """Points (birth, death) of one dimension, zero-persistence pairs dropped."""

    dim: int
    points: np.ndarray
    pairs: tuple[PersistencePair, ...] = ()

    def __len__(self):
        return len(self.points)

    @property
    def persistence(self) -> np.ndarray:
        return self.points[:, 1] - self.points[:, 0]

    def as_tuples(self) -> list[tuple[float, float]]:
        return [(float(b), float(d)) for b, d in self.points]

    @classmethod
    def from_points(cls, dim: int, points: Iterable[Sequence[float]]) -> "Diagram":
        pts = np.array([tuple(p) for p in points], dtype=float).reshape(-1, 2)
        return cls(dim, pts)


def boundary_matrix(f: Filtration) -> dict[int, np.ndarray]:
    """Face positions of every simplex, per dimension.

    ``out[d][k]`` lists, ascending, the filtration positions of the
    (d-1)-faces of the k-th d-simplex in filtration order. Vertex columns
    are empty and omitted.
    """
    out = {}
    for d in range(1, f.max_dim + 1):
        pos = f.positions(d)
        verts = f.verts[pos, : d + 1].astype(np.int64)
        faces = np.empty((len(pos), d + 1), dtype=np.int64)
        for drop in range(d + 1):
            keep = [c for c in range(d + 1) if c != drop]
            faces[:, drop] = f.index_of(verts[:, keep], d - 1)
        faces.sort(axis=1)
        out[d] = faces
    return out


@njit(cache=True)
def _xor_sorted(a, la, buf, s, lb, out):
    """Symmetric difference of a[:la] and buf[s:s+lb] (both ascending) into out."""
    p = 0
    q = 0
    r = 0
    while p < la and q < lb:
        x = a[p]
        y = buf[s + q]
        if x < y:
            out[r] = x
            r += 1
            p += 1
        elif y < x:
            out[r] = y
            r += 1
            q += 1
        else:
            p += 1
            q += 1
    while p < la:
        out[r] = a[p]
        r += 1
        p += 1
    while q < lb:
        out[r] = buf[s + q]
        r += 1
        q += 1
    return r


@njit(cache=True)
def _reduce_block(faces, n_total, max_len):
    """Left-to-right reduction of one dimension's boundary columns; the pivot is the last face."""
    m, w = faces.shape
    pivot_of = np.full(n_total, -1, np.int64)
    lows = np.full(m, -1, np.int64)
    starts = np.zeros(m, np.int64)
    lens = np.zeros(m, np.int64)
    buf = np.empty(max(16, 2 * m * w), np.int64)
    used = 0
    a = np.empty(max_len + w, np.int64)
    b = np.empty(max_len + w, np.int64)
    for j in range(m):
        la = w
        for t in range(w):
            a[t] = faces[j, t]
        while la > 0:
            k = pivot_of[a[la - 1]]
            if k < 0:
                break
            la = _xor_sorted(a, la, buf, starts[k], lens[k], b)
            a, b = b, a
        if la > 0:
            low = a[la - 1]
            pivot_of[low] = j
            lows[j] = low
            if used + la > buf.shape[0]:
                grown = np.empty(max(2 * buf.shape[0], used + la), np.int64)
                grown[:used] = buf[:used]
                buf = grown
            buf[used:used + la] = a[:la]
            starts[j] = used
            lens[j] = la
            used += la
    return lows, starts, lens, buf[:used]


@njit(cache=True)
def _coboundary(faces, local_of_face_pos, m):
    """CSR coboundary: row k lists cofaces of the k-th lower simplex, ascending."""
    rows, w = faces.shape
    indptr = np.zeros(m + 1, np.int64)
    for r in range(rows):
        for t in range(w):
            indptr[local_of_face_pos[faces[r, t]] + 1] += 1
    for k in range(m):
        indptr[k + 1] += indptr[k]
    fill = indptr[:-1].copy()
    indices = np.empty(indptr[m], np.int64)
    for r in range(rows):
        for t in range(w):
            k = local_of_face_pos[faces[r, t]]
            indices[fill[k]] = r
            fill[k] += 1
    return indptr, indices


@njit(cache=True)
def _reduce_coboundary(indptr, indices, skip, n_rows):
    """Reduce coboundary columns from the youngest simplex down.

    The pivot of a column is its earliest coface. Returns, per column, the
    local index of the pivot coface or -1.
    """
    m = len(indptr) - 1
    pivot_of = np.full(n_rows, -1, np.int64)
    piv = np.full(m, -1, np.int64)
    starts = np.zeros(m, np.int64)
    lens = np.zeros(m, np.int64)
    buf = np.empty(max(16, len(indices)), np.int64)
    used = 0
    a = np.empty(n_rows + 1, np.int64)
    b = np.empty(n_rows + 1, np.int64)
    for j in range(m - 1, -1, -1):
        if skip[j]:
            continue
        la = indptr[j + 1] - indptr[j]
        a[:la] = indices[indptr[j]:indptr[j + 1]]
        while la > 0:
            k = pivot_of[a[0]]
            if k < 0:
                break
            la = _xor_sorted(a, la, buf, starts[k], lens[k], b)
            a, b = b, a
        if la > 0:
            pivot_of[a[0]] = j
            piv[j] = a[0]
            if used + la > buf.shape[0]:
                grown = np.empty(max(2 * buf.shape[0], used + la), np.int64)
                grown[:used] = buf[:used]
                buf = grown
            buf[used:used + la] = a[:la]
            starts[j] = used
            lens[j] = la
            used += la
    return piv


def _reported_dims(f: Filtration) -> range:
    return range(max(f.max_dim, 1))


@dataclass(eq=False)
class PersistenceResult:
    """Pairs of a filtration; boundary columns are reduced on demand."""

    filtration: Filtration
    pairs: list[PersistencePair]
    _bm: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    _columns: dict[int, tuple[int, np.ndarray, np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    def reduce_through(self, pos: int) -> None:
        """Left-to-right reduce the boundary columns of pos's dimension up to ``pos``."""
        f = self.filtration
        d = int(f.dims[pos])
        if d == 0:
            return
        k = int(np.searchsorted(f.positions(d), pos))
        done = self._columns.get(d, (0,))[0]
        if k < done:
            return
        faces = self._bm[d][: k + 1]
        _, starts, lens, buf = _reduce_block(faces, len(f), max(f.count(d - 1), 1))
        self._columns[d] = (k + 1, starts, lens, buf)

    def reduced_column(self, pos: int) -> np.ndarray:
        """Face positions held by the reduced boundary column of the simplex at ``pos``."""
        f = self.filtration
        d = int(f.dims[pos])
        if d == 0:
            return np.empty(0, np.int64)
        self.reduce_through(pos)
        _, starts, lens, buf = self._columns[d]
        k = int(np.searchsorted(f.positions(d), pos))
        return buf[starts[k]: starts[k] + lens[k]].copy()

    def diagram(self, dim: int) -> Diagram:
        return diagram(self.pairs, dim)


def compute_persistence(f: Filtration) -> PersistenceResult:
    bm = boundary_matrix(f)
    n_total = len(f)
    death_of = np.full(n_total, -1, np.int64)
    cleared = np.zeros(n_total, dtype=bool)
    for d in range(f.max_dim):
        pos_d = f.positions(d)
        pos_up = f.positions(d + 1)
        local = np.full(n_total, -1, np.int64)
        local[pos_d] = np.arange(len(pos_d))
        indptr, indices = _coboundary(bm[d + 1], local, len(pos_d))
        piv = _reduce_coboundary(indptr, indices, cleared[pos_d], len(pos_up))
        paired = piv >= 0
        death_of[pos_d[paired]] = pos_up[piv[paired]]
        cleared[pos_up[piv[paired]]] = True
    pairs = _collect_pairs(f, death_of, cleared)
    return PersistenceResult(f, pairs, bm)


def _collect_pairs(f: Filtration, death_of: np.ndarray, is_death: np.ndarray) -> list[PersistencePair]:
    pairs = []
    for d in _reported_dims(f):
        pos = f.positions(d)
        pos = pos[~is_death[pos]]
        deaths = death_of[pos]
        births_v = f.values[pos]
        death_v = np.where(deaths >= 0, f.values[np.maximum(deaths, 0)], INF)
        for i, j, b, dv in zip(pos.tolist(), deaths.tolist(), births_v.tolist(), death_v.tolist()):
            pairs.append(PersistencePair(d, b, dv, i, j if j >= 0 else None))
    pairs.sort(key=lambda p: p.birth_index)
    return pairs


def reduce(f: Filtration) -> list[PersistencePair]:
    """All persistence pairs of ``f``, zero-persistence ones included."""
    return compute_persistence(f).pairs


def reduce_standard(f: Filtration) -> list[PersistencePair]:
    """Left-to-right reduction over the whole matrix, no shortcuts. Slow."""
    bm = boundary_matrix(f)
    cols: list[set[int]] = [set() for _ in range(len(f))]
    for d, faces in bm.items():
        for pos, row in zip(f.positions(d), faces):
            cols[pos] = set(int(x) for x in row)
    pivot_of: dict[int, int] = {}
    death_of = np.full(len(f), -1, np.int64)
    is_death = np.zeros(len(f), dtype=bool)
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            k = pivot_of.get(low)
            if k is None:
                break
            col ^= cols[k]
        if col:
            low = max(col)
            pivot_of[low] = j
            death_of[low] = j
            is_death[j] = True
    return _collect_pairs(f, death_of, is_death)


def diagram(pairs: Iterable[PersistencePair], dim: int) -> Diagram:
    kept = tuple(p for p in pairs if p.dim == dim and p.death > p.birth)
    pts = np.array([(p.birth, p.death) for p in kept], dtype=float).reshape(-1, 2)
    return Diagram(dim, pts, kept)


def betti_at(pairs: Iterable[PersistencePair], dim: int, i: float, j: float) -> int:
    """Persistent Betti number: classes born by ``i`` still alive at ``j``."""
    if not 0 <= i <= j:
        raise ValueError(f"need 0 <= i <= j, got i={i}, j={j}")
    return sum(1 for p in pairs if p.dim == dim and p.birth <= i and p.death > j)


def representative_cycle(f: Filtration, pair: PersistencePair,
                         result: PersistenceResult | None = None) -> list[tuple[int, int]]:
    """Edges of the reduced death column of a finite 1-dimensional pair.

    The chain is a boundary at ``pair.death`` whose youngest edge is the
    birth edge, so every edge is present by ``pair.birth``. It need not be
    the shortest cycle in its class.
    """
    if pair.dim != 1:
        raise ValueError(f"representatives are only extracted for 1-cycles, got dim {pair.dim}")
    if pair.death_index is None:
        raise UnsupportedRepresentativeError(
            "infinite 1-cycle has no death column; rebuild with max_eps >= the cloud diameter")
    if result is None:
        result = compute_persistence(f)
    col = result.reduced_column(pair.death_index)
    return [f.simplex(int(p)) for p in col]


def diagram_csv(pairs: Iterable[PersistencePair], dims: Sequence[int] = (0, 1)) -> str:
    buf = io.StringIO()
    buf.write("dim,birth,death\n")
    for d in dims:
        for b, de in diagram(pairs, d).points:
            buf.write(f"{d},{fmt(b)},{fmt(de)}\n")
    return buf.getvalue()


def fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.9g}"
