"""Resonant band-pass filter bank (RBJ biquads, unity peak gain).

Coefficients follow the audio-EQ cookbook band-pass with constant 0 dB peak
gain, so the -3 dB bandwidth is f0/Q. Filter state persists across blocks.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import lfilter


class BandPass:
    """Second-order resonant band-pass with streaming state."""

    def __init__(self, center_hz: float, q: float, sample_rate: int):
        if not 0 < center_hz < sample_rate / 2:
            raise ValueError(f"center {center_hz} Hz outside (0, Nyquist)")
        if q <= 0:
            raise ValueError(f"q must be > 0, got {q}")
        w0 = 2.0 * math.pi * center_hz / sample_rate
        alpha = math.sin(w0) / (2.0 * q)
        a0 = 1.0 + alpha
        self.b = np.array([alpha, 0.0, -alpha]) / a0
        self.a = np.array([1.0, -2.0 * math.cos(w0) / a0, (1.0 - alpha) / a0])
        self.zi = np.zeros(2)

    def process(self, block: np.ndarray) -> np.ndarray:
        out, self.zi = lfilter(self.b, self.a, block, zi=self.zi)
        return out


class BandPassBank:
    """Parallel band-pass sections sharing one input, summed with band gains."""

    def __init__(self, centers_hz: tuple[float, ...], q: float, sample_rate: int):
        self.centers_hz = centers_hz
        self.q = q
        self.sample_rate = sample_rate
        self.sections = [BandPass(c, q, sample_rate) for c in centers_hz]

    def process(self, block: np.ndarray, band_gains: np.ndarray) -> np.ndarray:
        """band_gains: one gain per section, either scalars or per-sample rows."""
        out = np.zeros_like(block)
        for section, gain in zip(self.sections, band_gains):
            out += section.process(block) * gain
        return out


def spectral_filter(
    block: np.ndarray,
    centers_hz: tuple[float, ...] | list[float],
    gains: tuple[float, ...] | list[float],
    q: float,
    sample_rate: int,
) -> np.ndarray:
    """One-shot filter pass: a fresh bank applied to a single block."""
    if not centers_hz:
        raise ValueError("filter bank needs at least one band")
    bank = BandPassBank(tuple(centers_hz), q, sample_rate)
    return bank.process(np.asarray(block, dtype=np.float64), np.asarray(gains, dtype=np.float64))
