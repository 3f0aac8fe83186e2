"""Rescaled-range (R/S) Hurst exponent.

For a window of ``w`` samples the cumulative deviations from the window mean
are ``y_i``; ``R`` is their range and ``S`` the sample standard deviation.
``(R/S)_w`` is averaged over the non-overlapping windows of each size and
``H`` is the slope of ``log(R/S)`` against ``log w``.

The classical R/S statistic is biased upward on short windows (white noise
typically lands a few hundredths above 0.5); no small-sample correction is
applied.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from nldmarkers.series import SampledSeries, _window

__all__ = [
    "RsPoint",
    "HurstFit",
    "HurstConfig",
    "cumulative_deviation",
    "rescaled_range",
    "window_grid",
    "hurst_exponent",
    "InsufficientDataError",
]

log = logging.getLogger(__name__)


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class RsPoint:
    w: int
    rs: float


@dataclass(frozen=True)
class HurstFit:
    h: float
    log_k: float
    r_squared: float
    points: list[RsPoint] = field(default_factory=list)

    @property
    def out_of_range(self) -> bool:
        """True when the estimate falls outside (0, 1)."""
        return not (0.0 < self.h < 1.0)


@dataclass(frozen=True)
class HurstConfig:
    w_min: int = 16
    w_max_fraction: float = 0.25
    n_windows: int = 20

    def __post_init__(self):
        if self.w_min < 8:
            raise ValueError("w_min must be >= 8")
        if not 0 < self.w_max_fraction <= 0.5:
            raise ValueError("w_max_fraction must lie in (0, 0.5]")
        if self.n_windows < 4:
            raise ValueError("n_windows must be >= 4")


def cumulative_deviation(x: SampledSeries, t0: int, w: int, i: int) -> float:
    """``y_i``: sum of the first ``i`` window samples minus the window mean."""
    seg = _window(x, t0, w)
    if not 1 <= i <= w:
        raise IndexError(f"offset i={i} outside 1..{w}")
    return float(np.sum(seg[:i] - seg.mean()))


def rescaled_range(x: SampledSeries, t0: int, w: int) -> float:
    if w < 8:
        raise ValueError(f"rescaled range needs w >= 8, got {w}")
    seg = _window(x, t0, w)
    s = seg.std(ddof=1)
    if s == 0:
        raise ValueError("degenerate window: zero standard deviation")
    y = np.cumsum(seg - seg.mean())
    return float((y.max() - y.min()) / s)


def _mean_rs(samples: np.ndarray, w: int) -> float | None:
    """Average R/S over the non-overlapping windows of length ``w``; None if all degenerate."""
    count = samples.size // w
    blocks = samples[: count * w].reshape(count, w)
    dev = blocks - blocks.mean(axis=1, keepdims=True)
    y = np.cumsum(dev, axis=1)
    r = y.max(axis=1) - y.min(axis=1)
    s = blocks.std(axis=1, ddof=1)
    ok = s > 0
    if not ok.any():
        return None
    return float(np.mean(r[ok] / s[ok]))


def window_grid(n: int, cfg: HurstConfig) -> np.ndarray:
    """Log-spaced integer window sizes from ``w_min`` to ``w_max_fraction * n``."""
    w_max = int(np.floor(cfg.w_max_fraction * n))
    if w_max < cfg.w_min:
        return np.array([], dtype=int)
    grid = np.floor(np.logspace(np.log10(cfg.w_min), np.log10(w_max), cfg.n_windows) + 1e-9).astype(int)
    return np.unique(grid)


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(min(max(r2, 0.0), 1.0))


def hurst_exponent(x: SampledSeries, cfg: HurstConfig = HurstConfig()) -> HurstFit:
    n = len(x)
    if n < 4 * cfg.w_min:
        raise InsufficientDataError(f"series of length {n} is shorter than 4 * w_min = {4 * cfg.w_min}")
    points = []
    for w in window_grid(n, cfg):
        rs = _mean_rs(x.samples, int(w))
        if rs is not None and rs > 0:
            points.append(RsPoint(int(w), rs))
    if len(points) < 4:
        raise InsufficientDataError(f"only {len(points)} usable window sizes (need 4)")
    lw = np.log([p.w for p in points])
    lrs = np.log([p.rs for p in points])
    h, log_k, r2 = _linfit(lw, lrs)
    fit = HurstFit(h, log_k, r2, points)
    if fit.out_of_range:
        log.warning("Hurst estimate %.3f lies outside (0, 1)", h)
    return fit
