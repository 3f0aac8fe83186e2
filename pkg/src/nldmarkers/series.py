"""Sampled time-series container and the windowed statistics shared by the estimators.

Every window is the ``w`` consecutive samples ``t0 .. t0 + w - 1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SampledSeries",
    "SessionRecord",
    "WindowStats",
    "window_mean",
    "window_std",
    "window_stats",
    "epoch_split",
    "SESSION_ORDER",
    "session_sort_key",
]

ENVIRONMENTS = ("DAY", "FOG", "NIGHT", "RAIN")
LEVELS = ("A", "B", "C", "D")
SESSION_ORDER = tuple(f"{env}_DRIVING_{lvl}" for env in ENVIRONMENTS for lvl in LEVELS)
_SESSION_RE = re.compile(r"^(DAY|FOG|NIGHT|RAIN)_DRIVING_[ABCD]$")
_TOKEN_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")


@dataclass(frozen=True, eq=False)
class SampledSeries:
    """Uniformly sampled real signal. ``samples`` is stored as a read-only float64 array."""

    samples: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64).ravel()
        if x.size < 1:
            raise ValueError("a series needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("series contains NaN or infinite samples")
        fs = float(self.sample_rate)
        if not (np.isfinite(fs) and fs > 0):
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate!r}")
        x.flags.writeable = False
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "sample_rate", fs)

    def __len__(self) -> int:
        return self.samples.size

    def with_samples(self, samples) -> "SampledSeries":
        return SampledSeries(samples, self.sample_rate)

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


def is_canonical_session(label: str) -> bool:
    return bool(_SESSION_RE.match(label))


def session_sort_key(label: str) -> tuple[int, int]:
    """Canonical DAY A-D, FOG A-D, NIGHT A-D, RAIN A-D position; other labels sort after."""
    if label in SESSION_ORDER:
        return (0, SESSION_ORDER.index(label))
    return (1, 0)


@dataclass(frozen=True, eq=False)
class SessionRecord:
    """One recording with its Table-1 identity (subject, session, age, driving experience).

    Canonical labels look like ``FOG_DRIVING_C``. Free-form tokens are accepted
    too (on-road recordings have no canonical label); check
    :attr:`is_canonical` if you need the strict form.
    """

    subject_id: int
    session_label: str
    age: float
    experience: float
    series: SampledSeries

    def __post_init__(self):
        if int(self.subject_id) != self.subject_id or self.subject_id < 1:
            raise ValueError(f"subject_id must be a positive integer, got {self.subject_id!r}")
        if not _TOKEN_RE.match(self.session_label or ""):
            raise ValueError(f"invalid session label {self.session_label!r}")
        if not (self.age >= self.experience >= 0):
            raise ValueError(f"need age >= experience >= 0, got age={self.age}, experience={self.experience}")

    @property
    def is_canonical(self) -> bool:
        return is_canonical_session(self.session_label)


@dataclass(frozen=True)
class WindowStats:
    mean: float
    std: float


def _window(x: SampledSeries, t0: int, w: int) -> np.ndarray:
    n = len(x)
    if w < 1 or t0 < 0 or t0 + w > n:
        raise IndexError(f"window t0={t0}, w={w} out of range for length {n}")
    return x.samples[t0:t0 + w]


def window_mean(x: SampledSeries, t0: int, w: int) -> float:
    return float(np.mean(_window(x, t0, w)))


def window_std(x: SampledSeries, t0: int, w: int) -> float:
    """Sample standard deviation (denominator ``w - 1``) of one window."""
    if w < 2:
        raise ValueError(f"standard deviation needs a window of at least 2 samples, got w={w}")
    return float(np.std(_window(x, t0, w), ddof=1))


def window_stats(x: SampledSeries, t0: int, w: int) -> WindowStats:
    return WindowStats(window_mean(x, t0, w), window_std(x, t0, w))


def epoch_split(x: SampledSeries, epoch_len: int) -> list[SampledSeries]:
    """Consecutive non-overlapping epochs; a short trailing remainder is dropped."""
    if epoch_len < 1:
        raise ValueError("epoch_len must be >= 1")
    count = len(x) // epoch_len
    return [x.with_samples(x.samples[k * epoch_len:(k + 1) * epoch_len]) for k in range(count)]
