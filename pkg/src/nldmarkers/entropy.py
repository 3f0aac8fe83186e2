"""Shannon entropy of a signal's equal-width amplitude histogram (natural log, nats)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from nldmarkers.series import SampledSeries

__all__ = ["AmplitudeHistogram", "EntropyResult", "histogram", "shannon_entropy", "signal_entropy", "DEFAULT_BINS"]

DEFAULT_BINS = 128


@dataclass(frozen=True, eq=False)
class AmplitudeHistogram:
    m: int
    probabilities: np.ndarray
    edges: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if self.m < 1 or p.shape != (self.m,):
            raise ValueError("need m >= 1 probabilities")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "probabilities", p)


@dataclass(frozen=True)
class EntropyResult:
    s: float
    c: float
    m: int


def histogram(x: SampledSeries, m: int = DEFAULT_BINS) -> AmplitudeHistogram:
    """``m`` equal-width bins over ``[min, max]``; the maximum lands in the last bin.

    A constant signal puts all mass in the first bin.
    """
    if m < 1:
        raise ValueError("bin count must be >= 1")
    v = x.samples
    lo, hi = float(v.min()), float(v.max())
    edges = np.linspace(lo, hi, m + 1)
    if hi > lo:
        idx = np.floor((v - lo) / (hi - lo) * m).astype(np.int64)
        idx = np.clip(idx, 0, m - 1)
    else:
        idx = np.zeros(v.size, dtype=np.int64)
    counts = np.bincount(idx, minlength=m)
    return AmplitudeHistogram(m, counts / v.size, edges)


def shannon_entropy(h: AmplitudeHistogram, c: float = 1.0) -> EntropyResult:
    """``-c * sum(p ln p)`` with ``0 ln 0 = 0``."""
    if not c > 0:
        raise ValueError("c must be positive")
    p = h.probabilities[h.probabilities > 0]
    # fsum is order independent, so mirrored histograms give identical results
    s = -math.fsum(p * np.log(p))
    return EntropyResult(c * max(s, 0.0), c, h.m)


def signal_entropy(x: SampledSeries, m: int = DEFAULT_BINS, c: float = 1.0) -> EntropyResult:
    return shannon_entropy(histogram(x, m), c)
