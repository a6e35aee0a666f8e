"""Perceptual results read off VR(eps_g): groups, closed contours, traced curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .clustering import (DEFAULT_REPLACE_FACTOR, GestaltThreshold, InfinityPolicy,
                         SignificanceSplit, split_significant, threshold_0d, threshold_1d)
from .errors import (ConfigError, DeadEndError, NoCommonScaleError, NoLoopError,
                     NonTerminatingWalkError, ParameterError)
from .filtration import Filtration, SkeletonGraph, build_vr, skeleton_at
from .geometry import AttributedCloud, EmbeddedCloud, distance_matrix, embed
from .persistence import PersistencePair, PersistenceResult, compute_persistence, representative_cycle

_ANGLE_TOL = 1e-12


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class Grouping:
    labels: tuple[int, ...]
    group_count: int
    eps_g: float
    tie_sensitive: bool = False
    significant: tuple[tuple[float, float], ...] = ()

    @property
    def groups(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.group_count)]
        for i, g in enumerate(self.labels):
            out[g].append(i)
        return out

    def to_dict(self) -> dict:
        return {
            "kind": "grouping",
            "eps_g": self.eps_g,
            "group_count": self.group_count,
            "tie_sensitive": self.tie_sensitive,
            "labels": list(self.labels),
            "groups": self.groups,
            "features": [{"birth": b, "death": d} for b, d in self.significant],
        }


@dataclass(frozen=True)
class Loop:
    """Closed vertex cycle: ``vertices[0] == vertices[-1]``."""

    vertices: tuple[int, ...]
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    @property
    def edges(self) -> list[tuple[int, int]]:
        v = self.vertices
        return [tuple(sorted((v[i], v[i + 1]))) for i in range(len(v) - 1)]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "birth": self.birth, "death": self.death}


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[int, ...]
    turn_angles: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "turn_angles": list(self.turn_angles)}


@dataclass(eq=False)
class PipelineRun:
    """Everything one pass of build -> reduce -> split -> threshold produced."""

    cloud: EmbeddedCloud
    filtration: Filtration
    persistence: PersistenceResult
    split: SignificanceSplit | None
    threshold: GestaltThreshold | None
    extra: dict = field(default_factory=dict)


def _as_embedded(cloud) -> EmbeddedCloud:
    if isinstance(cloud, EmbeddedCloud):
        return cloud
    if isinstance(cloud, AttributedCloud):
        return embed(cloud)
    return EmbeddedCloud.planar(cloud)


def run_0d(cloud, policy=InfinityPolicy.FORCE_SIGNIFICANT, replace_factor=DEFAULT_REPLACE_FACTOR,
           max_eps: float | None = None) -> PipelineRun:
    """0-PD pipeline. Components only need the 1-skeleton, so no triangles are built."""
    ec = _as_embedded(cloud)
    f = build_vr(distance_matrix(ec), max_dim=1, max_eps=max_eps)
    res = compute_persistence(f)
    d0 = res.diagram(0)
    split = split_significant(d0, policy, replace_factor)
    return PipelineRun(ec, f, res, split, threshold_0d(split))


def run_1d(cloud, policy=InfinityPolicy.FORCE_SIGNIFICANT, replace_factor=DEFAULT_REPLACE_FACTOR,
           max_dim: int = 2, max_eps: float | None = None, strict: bool = True) -> PipelineRun:
    """1-PD pipeline. ``split``/``threshold`` are None when the 1-PD is empty.

    With ``strict=False`` a missing common scale leaves ``threshold`` None
    and the error in ``extra["error"]`` instead of raising.
    """
    if max_dim < 2:
        raise ParameterError("1-cycles need 2-simplices to die; use max_dim >= 2")
    ec = _as_embedded(cloud)
    f = build_vr(distance_matrix(ec), max_dim=max_dim, max_eps=max_eps)
    res = compute_persistence(f)
    d1 = res.diagram(1)
    if len(d1) == 0:
        return PipelineRun(ec, f, res, None, None)
    split = split_significant(d1, policy, replace_factor)
    try:
        thr = threshold_1d(split)
    except NoCommonScaleError as exc:
        if strict:
            raise
        return PipelineRun(ec, f, res, split, None, {"error": exc})
    return PipelineRun(ec, f, res, split, thr)


def components(dm: np.ndarray, eps: float) -> tuple[int, ...]:
    """Component labels of the graph d(i, j) <= eps, numbered by smallest member."""
    n = dm.shape[0]
    uf = UnionFind(n)
    ii, jj = np.nonzero(np.triu(dm <= eps, 1))
    for a, b in zip(ii.tolist(), jj.tolist()):
        uf.union(a, b)
    label: dict[int, int] = {}
    out = []
    for i in range(n):
        out.append(label.setdefault(uf.find(i), len(label)))
    return tuple(out)


def group(cloud, eps_g: float, tie_sensitive: bool = False,
          significant: Sequence[tuple[float, float]] = ()) -> Grouping:
    if not eps_g >= 0:
        raise ParameterError(f"eps_g must be >= 0, got {eps_g}")
    labels = components(distance_matrix(_as_embedded(cloud)), eps_g)
    return Grouping(labels, max(labels) + 1, float(eps_g), tie_sensitive, tuple(significant))


def is_tie_sensitive(split: SignificanceSplit) -> bool:
    """True when the split hinges on equal values, so the grouping depends on tie handling."""
    if split.degenerate:
        return True
    pts = split.diagram.points
    if not split.noise_idx:
        return False
    t_d = max(pts[i, 1] for i in split.noise_idx)
    first = min(pts[i, 1] for i in split.significant_idx)
    return math.isclose(t_d, first, rel_tol=1e-9)


def group_by_persistence(cloud, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                         replace_factor=DEFAULT_REPLACE_FACTOR, eps: float | None = None) -> Grouping:
    """Similarity/proximity grouping at the eps_g chosen from the 0-PD (or an explicit ``eps``)."""
    run = run_0d(cloud, policy, replace_factor)
    eps_g = run.threshold.eps_g if eps is None else eps
    return group(run.cloud, eps_g, is_tie_sensitive(run.split), run.split.significant)


def resolve_conflict(cloud: AttributedCloud, scales: Mapping[str, float],
                     policy=InfinityPolicy.FORCE_SIGNIFICANT,
                     replace_factor=DEFAULT_REPLACE_FACTOR) -> Grouping:
    """Group under competing attributes; the attribute with the larger scaled gap dominates."""
    return group_by_persistence(embed(cloud, scales), policy, replace_factor)


def simple_cycles(edges: Sequence[tuple[int, int]]) -> list[list[int]]:
    """Split an even-degree edge set into simple cycles, each closed (first == last)."""
    adj: dict[int, set[int]] = {}
    for a, b in edges:
        if a == b:
            continue
        adj.setdefault(a, set()).symmetric_difference_update({b})
        adj.setdefault(b, set()).symmetric_difference_update({a})
    for v, nb in adj.items():
        if len(nb) % 2:
            raise ValueError(f"vertex {v} has odd degree {len(nb)}; not a cycle")
    cycles = []
    while True:
        live = sorted(v for v, nb in adj.items() if nb)
        if not live:
            break
        path = [live[0]]
        on_path = {live[0]: 0}
        while path:
            cur = path[-1]
            if not adj[cur]:
                break
            nxt = min(adj[cur])
            adj[cur].discard(nxt)
            adj[nxt].discard(cur)
            if nxt in on_path:
                at = on_path[nxt]
                cycles.append(path[at:] + [nxt])
                for v in path[at + 1:]:
                    del on_path[v]
                del path[at + 1:]
            else:
                on_path[nxt] = len(path)
                path.append(nxt)
    return cycles


def _canonical(cycle: list[int]) -> tuple[int, ...]:
    ring = cycle[:-1]
    k = ring.index(min(ring))
    ring = ring[k:] + ring[:k]
    if len(ring) > 2 and ring[-1] < ring[1]:
        ring = [ring[0]] + ring[:0:-1]
    return tuple(ring + [ring[0]])


def _cycle_length(cycle, coords) -> float:
    p = coords[list(cycle)]
    return float(np.linalg.norm(np.diff(p, axis=0), axis=1).sum())


def loop_from_pair(f: Filtration, pair: PersistencePair, coords, result: PersistenceResult | None = None) -> Loop:
    """Longest simple cycle inside the pair's representative chain."""
    rep = representative_cycle(f, pair, result)
    cycles = simple_cycles(rep)
    best = max(cycles, key=lambda c: (len(c), _cycle_length(c, coords), [-v for v in _canonical(c)]))
    return Loop(_canonical(best), pair.birth, pair.death)


def close_contours(cloud, max_loops: int | None = None, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                   replace_factor=DEFAULT_REPLACE_FACTOR, max_dim: int = 2,
                   max_eps: float | None = None, run: PipelineRun | None = None) -> list[Loop]:
    """One closed loop per significant 1-PD point, most persistent first."""
    if run is None:
        run = run_1d(cloud, policy, replace_factor, max_dim, max_eps)
    if run.split is None:
        raise NoLoopError("the 1-PD is empty; nothing to close")
    if run.threshold is None:
        raise run.extra["error"]
    pairs = sorted(run.split.significant_pairs, key=lambda p: (-p.persistence, p.birth_index))
    if max_loops is not None:
        pairs = pairs[:max_loops]
    finite = [p for p in pairs if p.death_index is not None]
    if finite:
        run.persistence.reduce_through(max(p.death_index for p in finite))
    return [loop_from_pair(run.filtration, p, run.cloud.xy, run.persistence) for p in pairs]


@dataclass(frozen=True)
class PragnanzSummary:
    significant_loop_count: int
    loops: tuple[Loop, ...]
    # no 1-PD point outlives the connectivity scale of the sample
    all_noise: bool = False
    noise_band: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": "loops",
            "significant_loop_count": self.significant_loop_count,
            "all_noise": self.all_noise,
            "noise_band": self.noise_band,
            "loops": [lp.to_dict() for lp in self.loops],
        }


def pragnanz_summary(cloud, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                     replace_factor=DEFAULT_REPLACE_FACTOR, max_dim: int = 2,
                     max_eps: float | None = None) -> PragnanzSummary:
    """Count the significant loops a cloud reduces to.

    The noise band is the largest finite 0-PD death, the scale at which the
    sample becomes connected. A hole that closes within that band is a
    sampling gap; when every 1-PD point does, ``all_noise`` is set. Loops
    are only traced when the significant ones share a common scale.
    """
    run = run_1d(cloud, policy, replace_factor, max_dim, max_eps, strict=False)
    deaths = run.persistence.diagram(0).points[:, 1]
    finite = deaths[np.isfinite(deaths)]
    band = float(finite.max()) if len(finite) else 0.0
    if run.split is None:
        return PragnanzSummary(0, (), False, band)
    all_noise = bool(run.split.diagram.persistence.max() <= band)
    loops = close_contours(run.cloud, run=run) if run.threshold is not None else []
    return PragnanzSummary(len(run.split.significant_idx), tuple(loops), all_noise, band)


def _unit(v) -> np.ndarray:
    n = float(np.hypot(v[0], v[1]))
    if n == 0:
        raise ConfigError("zero-length direction")
    return np.asarray(v, dtype=float) / n


def steering_angle(heading, origin, target) -> float:
    """Absolute turn in [0, pi] between ``heading`` and the ray origin -> target."""
    h = _unit(heading)
    e = _unit(np.asarray(target, dtype=float) - np.asarray(origin, dtype=float))
    return math.atan2(abs(h[0] * e[1] - h[1] * e[0]), h[0] * e[0] + h[1] * e[1])


def trace_continuation(sk: SkeletonGraph, start: int, end: int, initial_direction=None,
                       max_steps: int | None = None) -> Polyline:
    """Greedy smoothest walk from ``start`` to ``end`` over the skeleton.

    At each vertex the walk takes the edge with the smallest steering angle
    from the incoming heading, never stepping straight back. Ties go to the
    shorter edge, then the smaller index. Vertices may be revisited, so a
    crossing point can serve two branches. Without ``initial_direction``
    the walk heads for the nearest neighbor of ``start``; equally near
    neighbors are ranked by how directly they face ``end``.
    """
    if start == end:
        raise ConfigError("start and end must differ")
    for v in (start, end):
        if v not in sk.adjacency:
            raise ConfigError(f"vertex {v} is not in the skeleton")
    nbrs = sk.neighbors(start)
    if not nbrs:
        raise DeadEndError(f"start vertex {start} has no neighbors", [start])
    xy = sk.coords
    if initial_direction is None:
        toward_end = xy[end] - xy[start]
        nearest = min(nbrs, key=lambda w: (sk.length(start, w), steering_angle(toward_end, xy[start], xy[w]), w))
        heading = xy[nearest] - xy[start]
    else:
        heading = np.asarray(initial_direction, dtype=float)
    limit = max_steps if max_steps is not None else 10 * len(sk.vertices)

    path, angles = [start], []
    prev, cur = None, start
    for _ in range(limit):
        cands = [w for w in sk.neighbors(cur) if w != prev]
        if not cands:
            raise DeadEndError(f"dead end at vertex {cur}", path)
        scored = [(steering_angle(heading, xy[cur], xy[w]), sk.length(cur, w), w) for w in cands]
        best_angle = min(s[0] for s in scored)
        ang, _, nxt = min(s for s in scored if s[0] <= best_angle + _ANGLE_TOL)
        if prev is not None:
            angles.append(ang)
        heading = xy[nxt] - xy[cur]
        prev, cur = cur, nxt
        path.append(cur)
        if cur == end:
            return Polyline(tuple(path), tuple(angles))
    raise NonTerminatingWalkError(f"no arrival at {end} within {limit} steps", path)


def continuation_skeleton(cloud, eps: float | None = None, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                          replace_factor=DEFAULT_REPLACE_FACTOR) -> tuple[SkeletonGraph, float]:
    """1-skeleton of VR(eps) for curve tracing.

    Without an explicit ``eps`` the 1-PD threshold is used when the cloud
    has loops, otherwise the 0-PD one.
    """
    ec = _as_embedded(cloud)
    dm = distance_matrix(ec)
    if eps is None:
        run = run_1d(ec, policy, replace_factor)
        if run.threshold is None:
            run = run_0d(ec, policy, replace_factor)
        eps = run.threshold.eps_g
    f = build_vr(dm, max_dim=1, max_eps=max(float(dm.max()), eps, 1e-300))
    return skeleton_at(f, eps, ec.xy), float(eps)
