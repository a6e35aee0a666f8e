"""Significant/noise split of a persistence diagram and the threshold it implies."""
from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyInputError, InconsistentSplitError, NoCommonScaleError
from .persistence import Diagram, fmt

DEFAULT_REPLACE_FACTOR = 1.2


class InfinityPolicy(enum.Enum):
    FORCE_SIGNIFICANT = "force"
    REPLACE = "replace"

    @classmethod
    def parse(cls, value) -> "InfinityPolicy":
        if isinstance(value, cls):
            return value
        for p in cls:
            if value in (p.value, p.name):
                return p
        raise ConfigError(f"unknown infinity policy {value!r}; use 'force' or 'replace'")


@dataclass(frozen=True, eq=False)
class SignificanceSplit:
    dim: int
    diagram: Diagram
    significant_idx: tuple[int, ...]
    noise_idx: tuple[int, ...]
    infinite_replacement: float | None = None
    # 2-means had nothing to separate (all clustered values equal)
    degenerate: bool = False

    @property
    def significant(self) -> list[tuple[float, float]]:
        return [tuple(map(float, self.diagram.points[i])) for i in self.significant_idx]

    @property
    def noise(self) -> list[tuple[float, float]]:
        return [tuple(map(float, self.diagram.points[i])) for i in self.noise_idx]

    @property
    def significant_pairs(self):
        return [self.diagram.pairs[i] for i in self.significant_idx]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dim,birth,death,class\n")
        label = {i: "significant" for i in self.significant_idx}
        label.update({i: "noise" for i in self.noise_idx})
        for i, (b, d) in enumerate(self.diagram.points):
            buf.write(f"{self.dim},{fmt(b)},{fmt(d)},{label[i]}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class GestaltThreshold:
    dim: int
    eps_g: float
    valid_interval: tuple[float, float]

    def admits(self, eps: float) -> bool:
        low, high = self.valid_interval
        return low <= eps < high


def _projected(d: Diagram, policy: InfinityPolicy, factor: float):
    if len(d) == 0:
        raise EmptyInputError(f"{d.dim}-PD is empty")
    births, deaths = d.points[:, 0], d.points[:, 1]
    inf = np.isinf(deaths)
    replacement = None
    if policy is InfinityPolicy.FORCE_SIGNIFICANT:
        idx = np.flatnonzero(~inf)
        return idx, deaths[idx] - births[idx], np.flatnonzero(inf), None
    if inf.any():
        finite = deaths[~inf]
        top = finite.max() if len(finite) else float(births.max())
        replacement = factor * top if top > 0 else factor
        deaths = np.where(inf, replacement, deaths)
    idx = np.arange(len(d))
    return idx, deaths - births, np.empty(0, dtype=np.int64), replacement


def project_persistence(d: Diagram, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                        replace_factor: float = DEFAULT_REPLACE_FACTOR) -> np.ndarray:
    """Persistence of each clustered point.

    This is the distance of the point's projection onto y = -x from the
    origin, up to the constant 1/sqrt(2), which changes neither order nor
    the 2-means partition. Under FORCE_SIGNIFICANT infinite points are
    left out; under REPLACE their death becomes ``replace_factor`` times
    the largest finite death.
    """
    _, values, _, _ = _projected(d, InfinityPolicy.parse(policy), replace_factor)
    return values


def two_means_1d(values) -> tuple[int | None, float]:
    """Exact 1-D 2-means by scanning every split of the sorted values.

    Returns ``(k, sse)``: the lowest ``k`` sorted values form the low class.
    Splits only fall between distinct values; ``k`` is None when all
    values are equal. Equal costs go to the larger ``k``.
    """
    v = np.sort(np.asarray(values, dtype=float))
    m = len(v)
    if m == 0 or v[0] == v[-1]:
        return None, 0.0
    c = v - v.mean()
    s1 = np.cumsum(c)
    s2 = np.cumsum(c * c)
    best_k, best = None, math.inf
    for k in range(1, m):
        if v[k - 1] == v[k]:
            continue
        lo = s2[k - 1] - s1[k - 1] ** 2 / k
        hi = (s2[-1] - s2[k - 1]) - (s1[-1] - s1[k - 1]) ** 2 / (m - k)
        cost = lo + hi
        if cost <= best + 1e-12 * max(1.0, abs(best) if math.isfinite(best) else 1.0):
            best_k, best = k, cost
    return best_k, max(best, 0.0)


def split_significant(d: Diagram, policy=InfinityPolicy.FORCE_SIGNIFICANT,
                      replace_factor: float = DEFAULT_REPLACE_FACTOR) -> SignificanceSplit:
    """Two classes by 1-D 2-means on persistence; the higher one is significant."""
    policy = InfinityPolicy.parse(policy)
    idx, values, forced, replacement = _projected(d, policy, replace_factor)
    if len(d) == 1:
        return SignificanceSplit(d.dim, d, (0,), (), replacement)

    order = np.argsort(values, kind="stable")
    k, _ = two_means_1d(values)
    degenerate = k is None
    if degenerate:
        # nothing to separate: beside a forced point the rest is noise, alone it is all signal
        k = len(values) if len(forced) else 0
    noise = sorted(int(i) for i in idx[order[:k]])
    significant = sorted([int(i) for i in idx[order[k:]]] + [int(i) for i in forced])
    return SignificanceSplit(d.dim, d, tuple(significant), tuple(noise), replacement, degenerate)


def threshold_0d(s: SignificanceSplit) -> GestaltThreshold:
    """eps_g = t_d, the largest noise death; a death at exactly eps is already dead in VR(eps)."""
    if s.dim != 0:
        raise ConfigError(f"threshold_0d needs a 0-PD split, got dim {s.dim}")
    pts = s.diagram.points
    sig_death = float(min(pts[i, 1] for i in s.significant_idx))
    t_d = float(max(pts[i, 1] for i in s.noise_idx)) if s.noise_idx else 0.0
    if t_d >= sig_death:
        raise InconsistentSplitError(
            f"largest noise death {t_d} is not below smallest significant death {sig_death}")
    return GestaltThreshold(0, t_d, (t_d, sig_death))


def threshold_1d(s: SignificanceSplit) -> GestaltThreshold:
    """eps_g = t_b, the latest significant birth, where every significant loop is alive."""
    if s.dim != 1:
        raise ConfigError(f"threshold_1d needs a 1-PD split, got dim {s.dim}")
    if not s.significant_idx:
        raise EmptyInputError("no significant 1-cycles")
    pts = s.diagram.points
    t_b = float(max(pts[i, 0] for i in s.significant_idx))
    first_death = float(min(pts[i, 1] for i in s.significant_idx))
    if t_b >= first_death:
        intervals = [(float(pts[i, 0]), float(pts[i, 1])) for i in s.significant_idx]
        raise NoCommonScaleError(
            f"significant loops never coexist: latest birth {t_b} >= earliest death {first_death}",
            intervals)
    return GestaltThreshold(1, t_b, (t_b, first_death))
