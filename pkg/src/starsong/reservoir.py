"""Microtonal pitch reservoirs: quantization, text notation, MIDI export.

Frequencies quantize against an equal-tempered grid (12 or 24 steps per
octave) referenced to A4. Events keep the exact deviation in cents, so the
semitone grid is lossless: midi_note + cent_offset/100 reconstructs the
source pitch. The quarter-tone grid reports the deviation from the nearest
quarter tone instead (see quantize for the trade-off).

MIDI export writes a standard format-0 file at 480 ticks per quarter and
120 BPM, encoding each event's cent offset as a pitch-bend message (range
+-2 semitones) immediately before its note-on. All notes share one channel,
so simultaneous notes with different bends shade each other; acceptable for
reservoir auditioning, not for polymicrotonal playback.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from .audify import AudifyConfig, star_partials, derive_dimensionless
from .catalog import StarRecord

# spec'd playable window for midi notes 0..127 at standard tuning
MIDI_MIN_HZ = 8.18
MIDI_MAX_HZ = 12543.85

TICKS_PER_QUARTER = 480
TICKS_PER_SECOND = 960  # 120 BPM
NOTE_DURATION_TICKS = 2 * TICKS_PER_QUARTER
BEND_CENTER = 8192
BEND_RANGE_CENTS = 200.0  # +-2 semitones

PITCH_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


class Grid(Enum):
    SEMITONE_12 = "semitone_12"
    QUARTERTONE_24 = "quartertone_24"


@dataclass(frozen=True)
class TuningConfig:
    a4_hz: float = 440.0
    grid: Grid = Grid.SEMITONE_12

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a4_hz) and self.a4_hz > 0):
            raise ValueError(f"a4_hz must be > 0, got {self.a4_hz}")


@dataclass(frozen=True)
class PitchEvent:
    midi_note: int
    cent_offset: float
    frequency_hz: float
    velocity: int
    onset_s: float


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def quantize(frequency_hz: float, cfg: TuningConfig = TuningConfig()) -> PitchEvent:
    """Quantize one frequency to the grid (onset 0, velocity 127).

    midi_note is the nearest semitone (ties break upward). On the semitone
    grid cent_offset is the exact remainder in [-50, 50), so the pitch
    reconstructs losslessly. On the quarter-tone grid cent_offset is the
    remainder from the nearest quarter tone, in [-25, 25); the quarter-tone
    displacement itself is not representable in an integer midi_note, so
    that grid trades reconstruction for a bounded notation error.
    """
    if not MIDI_MIN_HZ <= frequency_hz <= MIDI_MAX_HZ:
        raise ValueError(
            f"{frequency_hz} Hz is outside the MIDI range [{MIDI_MIN_HZ}, {MIDI_MAX_HZ}] Hz"
        )
    midi_real = 69.0 + 12.0 * math.log2(frequency_hz / cfg.a4_hz)
    note = _round_half_up(midi_real)
    if not 0 <= note <= 127:
        raise ValueError(f"{frequency_hz} Hz maps to midi {note}, outside 0..127")
    if cfg.grid is Grid.QUARTERTONE_24:
        nearest_quarter = math.floor(2.0 * midi_real + 0.5) / 2.0
        cents = (midi_real - nearest_quarter) * 100.0
    else:
        cents = (midi_real - note) * 100.0
    return PitchEvent(midi_note=note, cent_offset=cents, frequency_hz=frequency_hz, velocity=127, onset_s=0.0)


def velocity_from_loudness(loudness: float) -> int:
    return _round_half_up(loudness * 126.0) + 1


def reservoir_from_star(
    star: StarRecord,
    acfg: AudifyConfig = AudifyConfig(),
    tcfg: TuningConfig = TuningConfig(),
) -> list[PitchEvent]:
    """Quantize a star's audified partials into pitch events.

    Velocities map loudness onto 1..127; onsets carry the partial start
    times. Events are sorted by onset, then frequency.
    """
    dims = derive_dimensionless(star)
    partials = star_partials(star, acfg)
    events = [
        replace(
            quantize(p.frequency_hz, tcfg),
            velocity=velocity_from_loudness(d.loudness),
            onset_s=p.start_s,
        )
        for p, d in zip(partials, dims)
    ]
    events.sort(key=lambda e: (e.onset_s, e.frequency_hz))
    return events


def pitch_name(midi_note: int) -> str:
    return f"{PITCH_NAMES[midi_note % 12]}{midi_note // 12 - 1}"


def export_text(events: list[PitchEvent]) -> str:
    """One line per event: ``<pitch><octave> <signed cents>c vel=<v> t=<onset>s``."""
    lines = [
        f"{pitch_name(e.midi_note)} {e.cent_offset:+.1f}c vel={e.velocity} t={e.onset_s:.3f}s"
        for e in events
    ]
    return "\n".join(lines) + "\n"


def _var_length(value: int) -> bytes:
    out = bytearray([value & 0x7F])
    value >>= 7
    while value:
        out.insert(0, (value & 0x7F) | 0x80)
        value >>= 7
    return bytes(out)


def bend_value(cent_offset: float) -> int:
    raw = BEND_CENTER + _round_half_up(cent_offset / BEND_RANGE_CENTS * BEND_CENTER)
    return max(0, min(16383, raw))


def export_midi(events: list[PitchEvent], path: str | Path) -> None:
    """Write events as a standard MIDI file, format 0."""
    if not events:
        raise ValueError("no events to export")

    # (tick, order, payload): note-offs first at a tick, then bends, then ons
    messages: list[tuple[int, int, bytes]] = []
    for e in events:
        on_tick = _round_half_up(e.onset_s * TICKS_PER_SECOND)
        bend = bend_value(e.cent_offset)
        messages.append((on_tick, 1, bytes([0xE0, bend & 0x7F, (bend >> 7) & 0x7F])))
        messages.append((on_tick, 2, bytes([0x90, e.midi_note, e.velocity])))
        messages.append((on_tick + NOTE_DURATION_TICKS, 0, bytes([0x80, e.midi_note, 0])))
    messages.sort(key=lambda m: (m[0], m[1]))

    track = bytearray()
    track += _var_length(0) + bytes([0xFF, 0x51, 0x03]) + (500000).to_bytes(3, "big")  # 120 BPM
    previous_tick = 0
    for tick, _, payload in messages:
        track += _var_length(tick - previous_tick) + payload
        previous_tick = tick
    track += _var_length(0) + bytes([0xFF, 0x2F, 0x00])  # end of track

    with Path(path).open("wb") as fh:
        fh.write(struct.pack(">4sIHHH", b"MThd", 6, 0, 1, TICKS_PER_QUARTER))
        fh.write(struct.pack(">4sI", b"MTrk", len(track)))
        fh.write(track)
