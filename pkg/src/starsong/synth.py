"""Sine-bank rendering into sample buffers, 16-bit WAV output, spectrum checks.

Each partial sounds for the configured duration from its own start time,
with short raised-cosine fades at both ends to avoid clicks. The summed mix
is peak-normalized, so relative amplitudes between partials are preserved
regardless of phase alignment.
"""

from __future__ import annotations

import math
import struct
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audify import PartialSpec

WAV_HEADER_BYTES = 44
PCM16_FULL_SCALE = 32767


@dataclass(frozen=True)
class RenderConfig:
    sample_rate: int = 44100
    duration_s: float = 10.0
    fade_ms: float = 10.0
    peak_target: float = 0.891  # -1 dBFS

    def __post_init__(self) -> None:
        if self.sample_rate < 8000:
            raise ValueError(f"sample_rate must be >= 8000, got {self.sample_rate}")
        if not self.duration_s > 2 * self.fade_ms / 1000.0:
            raise ValueError("duration_s must exceed twice the fade length")
        if not 0 < self.peak_target <= 1:
            raise ValueError(f"peak_target must be in (0, 1], got {self.peak_target}")


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono samples in [-1, 1] plus their sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))
        self.samples.setflags(write=False)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def _fade_envelope(n_samples: int, fade_samples: int) -> np.ndarray:
    env = np.ones(n_samples)
    if fade_samples <= 0:
        return env
    ramp = 0.5 * (1.0 - np.cos(np.pi * np.arange(fade_samples) / fade_samples))
    env[:fade_samples] = ramp
    env[-fade_samples:] = ramp[::-1]
    return env


def render_partials(partials: list[PartialSpec], cfg: RenderConfig = RenderConfig()) -> AudioBuffer:
    """Render partials into one peak-normalized mono buffer.

    Every partial contributes ``amplitude * sin(2*pi*f*(t - start))`` for
    the configured duration from its own start, shaped by the fades. The
    buffer covers ``max(start) + duration`` seconds.
    """
    if not partials:
        raise ValueError("no partials to render")
    sr = cfg.sample_rate
    nyquist = sr / 2.0
    for i, p in enumerate(partials):
        if not (math.isfinite(p.frequency_hz) and p.frequency_hz > 0):
            raise ValueError(f"partial {i}: frequency {p.frequency_hz} Hz is not positive and finite")
        if p.frequency_hz >= nyquist:
            raise ValueError(f"partial {i}: {p.frequency_hz:.3f} Hz is at or above Nyquist ({nyquist:.1f} Hz)")
        if p.start_s < 0:
            raise ValueError(f"partial {i}: negative start time {p.start_s}")

    n_per = round(cfg.duration_s * sr)
    fade_n = round(cfg.fade_ms / 1000.0 * sr)
    starts = [round(p.start_s * sr) for p in partials]
    total = max(s + n_per for s in starts)

    env = _fade_envelope(n_per, fade_n)
    t = np.arange(n_per) / sr
    mix = np.zeros(total)
    for p, s0 in zip(partials, starts):
        mix[s0 : s0 + n_per] += p.amplitude * np.sin(2.0 * np.pi * p.frequency_hz * t) * env

    peak = float(np.max(np.abs(mix)))
    if peak > 0:
        mix *= cfg.peak_target / peak
    return AudioBuffer(mix, sr)


def _quantize_pcm16(samples: np.ndarray) -> np.ndarray:
    # round half away from zero, then clamp to the int16 range
    scaled = samples * PCM16_FULL_SCALE
    q = np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)
    return np.clip(q, -32768, 32767).astype("<i2")


def write_wav(buffer: AudioBuffer, path: str | Path) -> None:
    """Write a canonical 44-byte-header RIFF/WAVE file, mono PCM 16-bit LE."""
    if not str(path):
        raise ValueError("empty output path")
    data = _quantize_pcm16(buffer.samples).tobytes()
    sr = buffer.sample_rate
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,  # PCM fmt chunk size
        1,  # audio format: PCM
        1,  # channels
        sr,
        sr * 2,  # byte rate
        2,  # block align
        16,  # bits per sample
        b"data",
        len(data),
    )
    with Path(path).open("wb") as fh:
        fh.write(header)
        fh.write(data)


def read_wav_mono(path: str | Path) -> AudioBuffer:
    """Read a PCM WAV file as a mono float buffer; stereo is averaged down."""
    with wave.open(str(path), "rb") as wf:
        channels = wf.getnchannels()
        width = wf.getsampwidth()
        sr = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    if width == 2:
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    elif width == 1:
        samples = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif width == 4:
        samples = np.frombuffer(raw, dtype="<i4").astype(np.float64) / 2147483648.0
    else:
        raise ValueError(f"{path}: unsupported sample width {width * 8} bits")
    if channels > 1:
        samples = samples.reshape(-1, channels).mean(axis=1)
    return AudioBuffer(samples, sr)


def spectral_peaks(
    buffer: AudioBuffer, n: int, min_relative: float = 0.05
) -> list[tuple[float, float]]:
    """Strongest spectral peaks as (frequency_hz, relative_amplitude) pairs.

    A Hann-windowed transform of the buffer's central segment (size = the
    largest power of two that fits, capped at 2**18) is scanned for local
    maxima; peak bin positions and heights are refined by parabolic
    interpolation on log magnitude. Amplitudes are relative to the largest
    peak; peaks below ``min_relative`` of it are dropped. Fewer than ``n``
    peaks is not an error.
    """
    x = buffer.samples
    if len(x) < 4096:
        raise ValueError(f"buffer too short for spectrum analysis ({len(x)} samples)")
    size = min(2**18, 2 ** int(math.floor(math.log2(len(x)))))
    start = (len(x) - size) // 2
    segment = x[start : start + size]
    window = np.hanning(size)
    mag = np.abs(np.fft.rfft(segment * window))

    if float(mag.max()) < size * 1e-15:  # effectively silent
        return []
    inner = mag[1:-1]
    candidates = np.flatnonzero((inner > mag[:-2]) & (inner >= mag[2:])) + 1
    if candidates.size == 0:
        return []
    floor = float(mag.max()) * min_relative
    candidates = candidates[mag[candidates] >= floor]

    peaks: list[tuple[float, float]] = []
    log_mag = np.log(mag + 1e-300)
    bin_hz = buffer.sample_rate / size
    for k in candidates:
        a, b, c = log_mag[k - 1], log_mag[k], log_mag[k + 1]
        denom = a - 2 * b + c
        delta = 0.0 if denom == 0 else 0.5 * (a - c) / denom
        delta = float(np.clip(delta, -0.5, 0.5))
        height = math.exp(b - 0.25 * (a - c) * delta)
        peaks.append(((k + delta) * bin_hz, height))

    peaks.sort(key=lambda p: p[1], reverse=True)
    peaks = peaks[:n]
    top = peaks[0][1]
    return [(freq, height / top) for freq, height in peaks]
