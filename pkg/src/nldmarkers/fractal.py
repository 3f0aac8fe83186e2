"""Box-counting dimension of planar curves, including the graph of a signal.

Cells are half-open ``[k r, (k+1) r)`` with the last row and column closed at
1, so every point belongs to exactly one cell. The segment between
consecutive points is traced exactly: a cell counts if the segment passes
through its interior, while grazing a corner does not.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import ceil

import numpy as np

from nldmarkers.series import SampledSeries

__all__ = [
    "PlanarCurve",
    "BoxCount",
    "FractalFit",
    "embed_signal",
    "box_count",
    "fractal_dimension",
    "dyadic_grid",
    "point_cells",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Ordered polyline inside the unit square, stored as an ``(n, 2)`` array."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 2:
            raise ValueError("a curve needs at least 2 (x, y) points")
        if not np.all(np.isfinite(p)) or p.min() < 0.0 or p.max() > 1.0:
            raise ValueError("curve coordinates must lie in [0, 1]")
        p.flags.writeable = False
        object.__setattr__(self, "points", p)

    def __len__(self) -> int:
        return self.points.shape[0]

    def length(self) -> float:
        return float(np.sum(np.hypot(*np.diff(self.points, axis=0).T)))


@dataclass(frozen=True)
class BoxCount:
    r: float
    n: int


@dataclass(frozen=True)
class FractalFit:
    d: float
    r_squared: float
    counts: list[BoxCount] = field(default_factory=list)

    @property
    def out_of_range(self) -> bool:
        return not (0.8 <= self.d <= 2.2)


def embed_signal(x: SampledSeries) -> PlanarCurve:
    """Map sample ``i`` to ``(i / (n-1), (x_i - min) / (max - min))``."""
    n = len(x)
    if n < 2:
        raise ValueError("embedding needs at least 2 samples")
    lo, hi = x.samples.min(), x.samples.max()
    if hi == lo:
        raise ValueError("cannot embed a constant signal: zero amplitude range")
    t = np.arange(n) / (n - 1)
    y = (x.samples - lo) / (hi - lo)
    return PlanarCurve(np.column_stack([t, y]))


def _cells(u: np.ndarray, m: int) -> np.ndarray:
    return np.clip(np.floor(u).astype(np.int64), 0, m - 1)


def point_cells(curve: PlanarCurve, r: float) -> np.ndarray:
    """Linear cell index of every curve point (one per point)."""
    m = ceil(1.0 / r - 1e-12)
    u = curve.points / r
    c = _cells(u, m)
    return c[:, 0] * m + c[:, 1]


def _crossings(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Segment ids and integer grid lines strictly between ``a[s]`` and ``b[s]``."""
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    first = np.floor(lo).astype(np.int64) + 1
    count = np.maximum(np.ceil(hi).astype(np.int64) - first, 0)
    seg = np.repeat(np.arange(a.size), count)
    starts = np.repeat(np.cumsum(count) - count, count)
    k = np.repeat(first, count) + (np.arange(seg.size) - starts)
    return seg, k.astype(np.float64)


def _segment_cells(u: np.ndarray, m: int) -> np.ndarray:
    p0, p1 = u[:-1], u[1:]
    nseg = p0.shape[0]
    t_parts = [np.zeros(nseg), np.ones(nseg)]
    s_parts = [np.arange(nseg), np.arange(nseg)]
    for axis in (0, 1):
        a, b = p0[:, axis], p1[:, axis]
        seg, k = _crossings(a, b)
        t_parts.append((k - a[seg]) / (b[seg] - a[seg]))
        s_parts.append(seg)
    t = np.concatenate(t_parts)
    s = np.concatenate(s_parts)
    order = np.lexsort((t, s))
    t, s = t[order], s[order]
    same = (s[1:] == s[:-1]) & (t[1:] > t[:-1])
    seg = s[1:][same]
    tm = 0.5 * (t[1:][same] + t[:-1][same])
    mid = p0[seg] + tm[:, None] * (p1[seg] - p0[seg])
    c = _cells(mid, m)
    return c[:, 0] * m + c[:, 1]


def box_count(curve: PlanarCurve, r: float) -> BoxCount:
    """Number of grid cells of side ``r`` touched by the points or segments of ``curve``."""
    if not r > 0:
        raise ValueError(f"box size must be positive, got {r}")
    r = min(float(r), 1.0)
    m = ceil(1.0 / r - 1e-12)
    u = curve.points / r
    occupied = np.union1d(point_cells(curve, r), _segment_cells(u, m))
    return BoxCount(r, int(occupied.size))


def dyadic_grid(depth: int = 8) -> list[float]:
    return [2.0 ** -k for k in range(1, depth + 1)]


def fractal_dimension(curve: PlanarCurve, grid=None) -> FractalFit:
    """Least-squares slope of ``log N`` against ``log(1/r)``; defaults to ``r = 2^-1 .. 2^-8``."""
    grid = dyadic_grid() if grid is None else sorted(set(float(r) for r in grid), reverse=True)
    if len(grid) < 4:
        raise ValueError(f"need at least 4 box sizes, got {len(grid)}")
    counts = [box_count(curve, r) for r in grid]
    x = np.log([1.0 / c.r for c in counts])
    y = np.log([c.n for c in counts])
    d, intercept = np.polyfit(x, y, 1)
    resid = y - (d * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    fit = FractalFit(float(d), float(min(max(r2, 0.0), 1.0)), counts)
    if fit.out_of_range:
        log.warning("box-counting dimension %.3f outside [0.8, 2.2]", fit.d)
    return fit
