"""Signal conditioning: linear detrend, Butterworth high-pass, 50 Hz notch, channel pick.

A simplified stand-in for a full EEG cleaning pipeline. All filters are
linear; with ``zero_phase`` they run forward then backward over a
reflect-padded copy of the signal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import signal

from nldmarkers.series import SampledSeries

__all__ = [
    "FilterSpec",
    "detrend_linear",
    "highpass",
    "notch",
    "select_channel",
    "preprocess",
    "highpass_sos",
    "notch_sos",
    "magnitude_response",
    "HEADSET_CHANNELS",
]

HEADSET_CHANNELS = ("F3", "F4", "C3", "C4", "P3", "Pz", "P4")


@dataclass(frozen=True)
class FilterSpec:
    highpass_cutoff: float = 1.0
    notch_freq: float = 50.0
    notch_q: float = 30.0
    filter_order: int = 4
    zero_phase: bool = True

    def __post_init__(self):
        if not self.highpass_cutoff > 0:
            raise ValueError("highpass_cutoff must be positive")
        if not self.notch_q > 0:
            raise ValueError("notch_q must be positive")
        if self.filter_order < 2 or self.filter_order % 2:
            raise ValueError("filter_order must be an even positive integer")

    def check(self, sample_rate: float) -> None:
        """Raise ``ValueError`` unless 0 < cutoff < notch < Nyquist at this rate."""
        nyq = sample_rate / 2.0
        if self.highpass_cutoff >= nyq:
            raise ValueError(f"high-pass cutoff {self.highpass_cutoff} Hz must be below Nyquist ({nyq} Hz)")
        if self.notch_freq >= nyq:
            raise ValueError(f"notch frequency {self.notch_freq} Hz must be below Nyquist ({nyq} Hz)")
        if not self.highpass_cutoff < self.notch_freq:
            raise ValueError("high-pass cutoff must be below the notch frequency")


def detrend_linear(x: SampledSeries) -> SampledSeries:
    """Subtract the least-squares straight line fitted over the whole series."""
    if len(x) < 2:
        raise ValueError("detrending needs at least 2 samples")
    return x.with_samples(signal.detrend(x.samples, type="linear"))


def highpass_sos(spec: FilterSpec, sample_rate: float) -> np.ndarray:
    if spec.highpass_cutoff >= sample_rate / 2.0:
        raise ValueError(f"high-pass cutoff {spec.highpass_cutoff} Hz must be below Nyquist ({sample_rate / 2.0} Hz)")
    return signal.butter(spec.filter_order, spec.highpass_cutoff, btype="highpass", fs=sample_rate, output="sos")


def notch_sos(spec: FilterSpec, sample_rate: float) -> np.ndarray:
    if spec.notch_freq >= sample_rate / 2.0:
        raise ValueError(f"notch frequency {spec.notch_freq} Hz must be below Nyquist ({sample_rate / 2.0} Hz)")
    b, a = signal.iirnotch(spec.notch_freq, spec.notch_q, fs=sample_rate)
    return signal.tf2sos(b, a)


def _apply(sos: np.ndarray, x: np.ndarray, spec: FilterSpec) -> np.ndarray:
    if spec.zero_phase:
        # pad length 3 x order, clipped for very short inputs
        pad = min(3 * spec.filter_order, x.size - 1)
        return signal.sosfiltfilt(sos, x, padtype="even" if pad > 0 else None, padlen=pad)
    zi = signal.sosfilt_zi(sos) * x[0]
    y, _ = signal.sosfilt(sos, x, zi=zi)
    return y


def highpass(x: SampledSeries, spec: FilterSpec = FilterSpec()) -> SampledSeries:
    """Butterworth high-pass of order ``spec.filter_order`` at ``spec.highpass_cutoff``."""
    sos = highpass_sos(spec, x.sample_rate)
    return x.with_samples(_apply(sos, x.samples, spec))


def notch(x: SampledSeries, spec: FilterSpec = FilterSpec()) -> SampledSeries:
    """Second-order IIR notch at ``spec.notch_freq`` with bandwidth ``notch_freq / notch_q``."""
    sos = notch_sos(spec, x.sample_rate)
    return x.with_samples(_apply(sos, x.samples, spec))


def preprocess(x: SampledSeries, spec: FilterSpec = FilterSpec()) -> SampledSeries:
    """detrend -> high-pass -> notch."""
    spec.check(x.sample_rate)
    return notch(highpass(detrend_linear(x), spec), spec)


def magnitude_response(kind: str, spec: FilterSpec, sample_rate: float, freqs) -> np.ndarray:
    """Effective linear gain of the ``"highpass"`` or ``"notch"`` filter at ``freqs`` (Hz).

    Forward-backward filtering squares the single-pass magnitude.
    """
    sos = {"highpass": highpass_sos, "notch": notch_sos}[kind](spec, sample_rate)
    _, h = signal.sosfreqz(sos, worN=np.atleast_1d(np.asarray(freqs, dtype=float)), fs=sample_rate)
    mag = np.abs(h)
    return mag ** 2 if spec.zero_phase else mag


def select_channel(frame: Mapping[str, np.ndarray], name: str, sample_rate: float) -> SampledSeries:
    """Pull one named column out of a multi-channel frame (any mapping of name -> samples)."""
    if name not in frame:
        available = ", ".join(frame.keys())
        raise KeyError(f"channel {name!r} not found; available channels: {available}")
    return SampledSeries(frame[name], sample_rate)
