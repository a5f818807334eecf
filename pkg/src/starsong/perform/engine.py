"""Block audio engine for the live service.

The engine pulls an immutable EngineSnapshot at each block boundary and
renders 512-frame blocks: a continuous-phase sine bank for the selected
star's partials plus any triggered samples routed through the resonant
filter bank. Per-partial amplitudes ramp linearly across one block, so a
gain change lands within a single block and never steps a sample by more
than the ramp bound. The master sum is soft-clipped at +-0.999 (identity
below the 0.95 knee, saturating above).

The control plane only publishes snapshots; the audio path takes no locks.
"""

from __future__ import annotations

import logging
import threading
import time
import wave
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from ..synth import read_wav_mono, _quantize_pcm16
from .filters import BandPassBank
from .state import EngineSnapshot, LoadedSample

log = logging.getLogger(__name__)

CLIP_LIMIT = 0.999
CLIP_KNEE = 0.95


@dataclass(frozen=True)
class EngineConfig:
    sample_rate: int = 44100
    block_frames: int = 512
    #: modeled device FIFO depth in blocks; block k underruns when it is not
    #: delivered by t0 + (k + buffer_blocks) * block_period. Without realtime
    #: scheduling a Python producer sees tens of ms of scheduler jitter, so
    #: the default sits in the "high latency" class (~93 ms at 512/44100);
    #: lower it on tuned hosts.
    buffer_blocks: int = 8

    def __post_init__(self) -> None:
        if self.block_frames < 1 or self.block_frames & (self.block_frames - 1):
            raise ValueError(f"block_frames must be a power of two, got {self.block_frames}")
        if self.buffer_blocks < 1:
            raise ValueError("buffer_blocks must be >= 1")


class AudioSink(Protocol):
    def write(self, block: np.ndarray) -> None: ...
    def close(self) -> None: ...


class NullSink:
    """Discards audio; used for tests and soak runs."""

    def write(self, block: np.ndarray) -> None:
        pass

    def close(self) -> None:
        pass


class WavSink:
    """Rolling mono 16-bit WAV writer; the header is finalized on close."""

    def __init__(self, path: str, sample_rate: int):
        self._wf = wave.open(path, "wb")
        self._wf.setnchannels(1)
        self._wf.setsampwidth(2)
        self._wf.setframerate(sample_rate)

    def write(self, block: np.ndarray) -> None:
        self._wf.writeframes(_quantize_pcm16(block).tobytes())

    def close(self) -> None:
        self._wf.close()


def open_sink(wav_path: str | None, sample_rate: int) -> AudioSink:
    """Prefer a sound device when one is usable, else fall back to WAV/null.

    The device path needs the optional sounddevice package and working audio
    hardware; on failure the fallback is logged, never fatal.
    """
    if wav_path is None:
        try:
            return _DeviceSink(sample_rate)
        except Exception as exc:
            log.warning("audio device unavailable (%s); discarding audio (use --wav-sink to keep it)", exc)
            return NullSink()
    return WavSink(wav_path, sample_rate)


class _DeviceSink:
    def __init__(self, sample_rate: int):
        import sounddevice  # optional dependency, probed at runtime

        self._stream = sounddevice.OutputStream(samplerate=sample_rate, channels=1, dtype="float32")
        self._stream.start()

    def write(self, block: np.ndarray) -> None:
        self._stream.write(block.astype(np.float32))

    def close(self) -> None:
        self._stream.stop()
        self._stream.close()


def soft_clip(block: np.ndarray, limit: float = CLIP_LIMIT, knee: float = CLIP_KNEE) -> np.ndarray:
    """Identity below the knee, tanh saturation up to the limit above it."""
    out = block.copy()
    over = np.abs(block) > knee
    if np.any(over):
        span = limit - knee
        out[over] = np.sign(block[over]) * (knee + span * np.tanh((np.abs(block[over]) - knee) / span))
    return out


def load_sample_file(path: str, engine_rate: int) -> np.ndarray:
    """Load a WAV slot sample: downmixed to mono, resampled to engine rate."""
    buf = read_wav_mono(path)
    data = buf.samples
    if buf.sample_rate != engine_rate:
        n_out = max(1, round(len(data) * engine_rate / buf.sample_rate))
        data = np.interp(
            np.arange(n_out) * (buf.sample_rate / engine_rate),
            np.arange(len(data)),
            data,
        )
    data = np.asarray(data, dtype=np.float64)
    data.setflags(write=False)
    return data


class _Player:
    __slots__ = ("generation", "data", "position")

    def __init__(self, generation: int, data: np.ndarray):
        self.generation = generation
        self.data = data
        self.position = 0

    def next_block(self, frames: int) -> np.ndarray:
        chunk = self.data[self.position : self.position + frames]
        self.position += frames
        if len(chunk) == frames:
            return chunk
        out = np.zeros(frames)
        out[: len(chunk)] = chunk
        return out


class AudioEngine:
    """Renders blocks from published snapshots; optionally self-paced."""

    def __init__(
        self,
        snapshot_fn: Callable[[], EngineSnapshot],
        sink: AudioSink,
        cfg: EngineConfig = EngineConfig(),
    ):
        self._snapshot_fn = snapshot_fn
        self._sink = sink
        self.cfg = cfg
        self._freqs: tuple[float, ...] = ()
        self._phases = np.zeros(0)
        self._amps = np.zeros(0)
        self._bank: BandPassBank | None = None
        self._players: dict[str, _Player] = {}
        self._thread: threading.Thread | None = None
        self._running = threading.Event()
        self.blocks_rendered = 0
        self.deadline_misses = 0

    # ---- block rendering (audio plane) ----

    def render_block(self, snap: EngineSnapshot, frames: int | None = None) -> np.ndarray:
        frames = frames or self.cfg.block_frames
        sr = self.cfg.sample_rate

        if snap.partial_freqs != self._freqs:
            self._freqs = snap.partial_freqs
            self._phases = np.zeros(len(self._freqs))
            self._amps = np.asarray(snap.partial_amps, dtype=np.float64).copy()
            self._bank = None
        if self._bank is None or self._bank.q != snap.filter_q:
            self._bank = (
                BandPassBank(self._freqs, snap.filter_q, sr) if self._freqs else None
            )

        out = np.zeros(frames)
        ramp_w = np.arange(1, frames + 1) / frames
        if self._freqs:
            targets = np.asarray(snap.partial_amps, dtype=np.float64)
            amps = self._amps[:, None] + (targets - self._amps)[:, None] * ramp_w[None, :]
            incs = 2.0 * np.pi * np.asarray(self._freqs) / sr
            phases = self._phases[:, None] + incs[:, None] * np.arange(1, frames + 1)[None, :]
            out += np.sum(amps * np.sin(phases), axis=0)
            self._phases = np.mod(self._phases + incs * frames, 2.0 * np.pi)
            self._amps = targets.copy()

            sample_mix = self._mix_samples(snap.samples, frames)
            if sample_mix is not None and self._bank is not None:
                out += self._bank.process(sample_mix, amps)
        else:
            # keep players advancing while no star is selected, silently:
            # the filter bank that would voice them has no bands
            self._mix_samples(snap.samples, frames)

        self.blocks_rendered += 1
        return soft_clip(out)

    def _mix_samples(self, samples: tuple[LoadedSample, ...], frames: int) -> np.ndarray | None:
        active_slots = set()
        for s in samples:
            if not s.playing:
                continue
            active_slots.add(s.slot)
            player = self._players.get(s.slot)
            if player is None or player.generation != s.generation:
                self._players[s.slot] = _Player(s.generation, s.data)
        for slot in list(self._players):
            if slot not in active_slots:
                del self._players[slot]

        if not self._players:
            return None
        mix = np.zeros(frames)
        for player in self._players.values():
            mix += player.next_block(frames)
        return mix

    # ---- real-time pacing (engine thread) ----

    def start(self) -> None:
        if self._thread is not None:
            return
        self._running.set()
        self._thread = threading.Thread(target=self._run, name="starsong-audio", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._running.clear()
        self._thread.join(timeout=5.0)
        self._thread = None
        self._sink.close()

    def _run(self) -> None:
        period = self.cfg.block_frames / self.cfg.sample_rate
        t0 = time.monotonic()
        k = 0
        while self._running.is_set():
            block = self.render_block(self._snapshot_fn())
            self._sink.write(block)
            now = time.monotonic()
            # underrun check against the modeled FIFO, production pace one
            # block per period
            if now > t0 + (k + self.cfg.buffer_blocks) * period:
                self.deadline_misses += 1
            k += 1
            next_start = t0 + k * period
            if next_start > now:
                time.sleep(next_start - now)
