"""Synthetic signals with known answers: fractional Gaussian noise, Koch curve, white noise.

Randomness comes from numpy's PCG64 bit generator, which produces the same
stream on every platform for a given seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nldmarkers.fractal import PlanarCurve
from nldmarkers.series import SampledSeries

__all__ = ["FgnSpec", "KochSpec", "fgn_autocovariance", "gen_fgn", "gen_koch", "gen_white", "MAX_KOCH_DEPTH"]

MAX_KOCH_DEPTH = 8


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class FgnSpec:
    h_true: float
    n: int
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.h_true < 1:
            raise ValueError("h_true must lie in (0, 1)")
        if self.n < 64 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 64")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class KochSpec:
    depth: int

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")

    @property
    def n_points(self) -> int:
        return 4 ** self.depth + 1


def fgn_autocovariance(h: float, k) -> np.ndarray:
    """Unit-variance fGn autocovariance at integer lag(s) ``k``."""
    k = np.abs(np.asarray(k, dtype=float))
    e = 2.0 * h
    return 0.5 * (np.abs(k + 1) ** e - 2.0 * k ** e + np.abs(k - 1) ** e)


def gen_fgn(spec: FgnSpec, sample_rate: float = 1.0) -> SampledSeries:
    """Exact fGn by circulant embedding of the autocovariance (Davies-Harte)."""
    n = spec.n
    gamma = fgn_autocovariance(spec.h_true, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])  # length 2n, symmetric
    lam = np.fft.fft(row).real
    if lam.min() < -1e-10 * lam.max():
        raise AssertionError(f"circulant embedding has a negative eigenvalue ({lam.min():.3g})")
    lam = np.clip(lam, 0.0, None)
    m = row.size
    rng = _rng(spec.seed)
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    w = np.fft.fft(np.sqrt(lam / m) * z)
    return SampledSeries(w.real[:n], sample_rate)


def gen_white(n: int, seed: int = 0, sample_rate: float = 1.0) -> SampledSeries:
    if n < 1:
        raise ValueError("n must be >= 1")
    return SampledSeries(_rng(seed).standard_normal(n), sample_rate)


def _koch_points(depth: int) -> np.ndarray:
    pts = np.array([0.0 + 0.0j, 1.0 + 0.0j])
    rot = np.exp(1j * np.pi / 3)
    for _ in range(depth):
        a, b = pts[:-1], pts[1:]
        d = (b - a) / 3.0
        p1 = a + d
        p3 = a + 2.0 * d
        p2 = p1 + d * rot
        out = np.empty(4 * a.size + 1, dtype=complex)
        out[0:-1:4] = a
        out[1::4] = p1
        out[2::4] = p2
        out[3::4] = p3
        out[-1] = b[-1]
        pts = out
    return pts


def gen_koch(spec: KochSpec) -> PlanarCurve:
    """Koch curve on the unit base segment from (0, 0) to (1, 0); peaks rise to sqrt(3)/6."""
    if spec.depth > MAX_KOCH_DEPTH:
        raise ValueError(f"Koch depth {spec.depth} exceeds the guard of {MAX_KOCH_DEPTH}")
    z = _koch_points(spec.depth)
    pts = np.column_stack([z.real, z.imag])
    pts[:, 1] = np.clip(pts[:, 1], 0.0, None)  # kill -0.0 and round-off below the base
    pts[-1, 0] = min(pts[-1, 0], 1.0)
    return PlanarCurve(np.clip(pts, 0.0, 1.0))
