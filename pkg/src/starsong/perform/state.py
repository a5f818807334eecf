"""Session state and the control-message transition for the live service.

The control plane is a single logical writer: every message goes through
apply_control, a pure transition from (state, message) to (state, reply).
Replies always carry the selected star's current luminosity so clients can
track it without polling. The audio plane never sees SessionState directly;
it adopts immutable EngineSnapshot values published after each transition.

Out-of-range values are rejected with an error reply, never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..audify import AudifyConfig, star_partials, derive_dimensionless
from ..catalog import StarRecord

IDLE_LUMINOSITY = 0.1
GAIN_COUNT = 4

OPS = (
    "list_stars",
    "select_star",
    "set_gain",
    "load_sample",
    "trigger_sample",
    "stop_sample",
    "subscribe_luminosity",
    "set_filter_q",
)

FILTER_Q_MIN = 0.1
FILTER_Q_MAX = 1000.0
MAX_LUMINOSITY_RATE_HZ = 60.0

#: loads a sample file into mono samples at the engine rate
SampleLoader = Callable[[str], np.ndarray]


@dataclass(frozen=True)
class ControlledPartial:
    """One gain-controlled sine: audible frequency plus its loudness weight."""

    frequency_hz: float
    loudness: float


@dataclass(frozen=True, eq=False)
class LoadedSample:
    slot: str
    data: np.ndarray
    generation: int  # bumped per trigger so the engine restarts playback
    playing: bool


@dataclass(frozen=True)
class SessionState:
    stars: tuple[StarRecord, ...]
    selected_star: str | None = None
    partials: tuple[ControlledPartial, ...] = ()
    partial_gains: tuple[float, ...] = (1.0,) * GAIN_COUNT
    samples: tuple[LoadedSample, ...] = ()
    filter_q: float = 20.0
    trigger_count: int = 0


@dataclass(frozen=True, eq=False)
class EngineSnapshot:
    """What the audio plane needs from one state: read-only, lock-free."""

    partial_freqs: tuple[float, ...]
    partial_amps: tuple[float, ...]  # loudness * gain per partial
    filter_q: float
    samples: tuple[LoadedSample, ...]


def initial_state(stars: list[StarRecord] | tuple[StarRecord, ...]) -> SessionState:
    if not stars:
        raise ValueError("catalog must contain at least one star")
    return SessionState(stars=tuple(stars))


def controlled_partials(star: StarRecord, acfg: AudifyConfig) -> tuple[ControlledPartial, ...]:
    """The star's gain-controlled partials, frequency ascending.

    Stars with more than four modes expose the four loudest; fewer than four
    leaves the trailing gain controls inert.
    """
    dims = derive_dimensionless(star)
    partials = star_partials(star, acfg)
    pairs = [ControlledPartial(p.frequency_hz, d.loudness) for p, d in zip(partials, dims)]
    pairs.sort(key=lambda cp: (-cp.loudness, cp.frequency_hz))
    pairs = pairs[:GAIN_COUNT]
    pairs.sort(key=lambda cp: cp.frequency_hz)
    return tuple(pairs)


def selected_luminosity(state: SessionState) -> float | None:
    """Loudness-weighted mean gain over the selected star's partials."""
    if state.selected_star is None or not state.partials:
        return None
    weighted = sum(cp.loudness * g for cp, g in zip(state.partials, state.partial_gains))
    total = sum(cp.loudness for cp in state.partials)
    return weighted / total


def luminosities(state: SessionState) -> dict[str, float]:
    values = {star.id: IDLE_LUMINOSITY for star in state.stars}
    lum = selected_luminosity(state)
    if state.selected_star is not None and lum is not None:
        values[state.selected_star] = lum
    return values


def engine_snapshot(state: SessionState) -> EngineSnapshot:
    if state.selected_star is None:
        return EngineSnapshot((), (), state.filter_q, state.samples)
    return EngineSnapshot(
        partial_freqs=tuple(cp.frequency_hz for cp in state.partials),
        partial_amps=tuple(
            cp.loudness * g for cp, g in zip(state.partials, state.partial_gains)
        ),
        filter_q=state.filter_q,
        samples=state.samples,
    )


def _err(state: SessionState, message: str) -> tuple[SessionState, dict]:
    return state, {"ok": False, "error": message}


def _ok(state: SessionState, **fields) -> tuple[SessionState, dict]:
    reply = {"ok": True, **fields}
    reply.setdefault("luminosity", selected_luminosity(state))
    return state, reply


def _sample_by_slot(state: SessionState, slot: str) -> LoadedSample | None:
    for sample in state.samples:
        if sample.slot == slot:
            return sample
    return None


def _replace_sample(state: SessionState, sample: LoadedSample) -> SessionState:
    remaining = tuple(s for s in state.samples if s.slot != sample.slot)
    return replace(state, samples=remaining + (sample,))


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def apply_control(
    state: SessionState,
    msg: dict,
    acfg: AudifyConfig,
    load_sample: SampleLoader,
) -> tuple[SessionState, dict]:
    """Apply one decoded control message; returns (new state, reply dict).

    Invalid messages leave the state untouched and produce an error reply.
    """
    if not isinstance(msg, dict):
        return _err(state, "message must be a JSON object")
    op = msg.get("op")
    if op not in OPS:
        return _err(state, f"unknown op {op!r}")

    if op == "list_stars":
        stars = [
            {"id": star.id, "name": star.name, "modes": len(star.modes)}
            for star in state.stars
        ]
        return _ok(state, stars=stars)

    if op == "select_star":
        star_id = msg.get("id")
        star = next((s for s in state.stars if s.id == star_id), None)
        if star is None:
            return _err(state, f"unknown star id {star_id!r}")
        try:
            partials = controlled_partials(star, acfg)
        except ValueError as exc:
            return _err(state, f"star {star_id!r} cannot be audified: {exc}")
        new = replace(
            state,
            selected_star=star.id,
            partials=partials,
            partial_gains=(1.0,) * GAIN_COUNT,
        )
        return _ok(
            new,
            star=star.id,
            gains=list(new.partial_gains),
            partials=[{"frequency_hz": cp.frequency_hz, "loudness": cp.loudness} for cp in partials],
        )

    if op == "set_gain":
        index = msg.get("index")
        value = msg.get("value")
        if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < GAIN_COUNT:
            return _err(state, "index out of range")
        if not _is_number(value) or not 0.0 <= value <= 1.0:
            return _err(state, f"gain value must be in [0, 1], got {value!r}")
        if state.selected_star is None:
            return _err(state, "no star selected")
        gains = list(state.partial_gains)
        gains[index] = float(value)
        new = replace(state, partial_gains=tuple(gains))
        return _ok(new, index=index, value=float(value), gains=gains)

    if op == "load_sample":
        slot = msg.get("slot")
        path = msg.get("path")
        if not isinstance(slot, str) or not slot:
            return _err(state, "slot must be a non-empty string")
        if not isinstance(path, str) or not path:
            return _err(state, "path must be a non-empty string")
        try:
            data = load_sample(path)
        except Exception as exc:
            return _err(state, f"cannot load sample {path!r}: {exc}")
        sample = LoadedSample(slot=slot, data=data, generation=0, playing=False)
        new = _replace_sample(state, sample)
        return _ok(new, slot=slot, frames=int(len(data)))

    if op in ("trigger_sample", "stop_sample"):
        slot = msg.get("slot")
        if not isinstance(slot, str) or not slot:
            return _err(state, "slot must be a non-empty string")
        sample = _sample_by_slot(state, slot)
        if sample is None:
            return _err(state, f"slot {slot!r} has no sample loaded")
        if op == "trigger_sample":
            count = state.trigger_count + 1
            sample = replace(sample, generation=count, playing=True)
            new = replace(_replace_sample(state, sample), trigger_count=count)
            return _ok(new, slot=slot, playing=True)
        sample = replace(sample, playing=False)
        new = _replace_sample(state, sample)
        return _ok(new, slot=slot, playing=False)

    if op == "subscribe_luminosity":
        rate = msg.get("rate_hz")
        if not _is_number(rate) or not 0 < rate <= MAX_LUMINOSITY_RATE_HZ:
            return _err(state, f"rate_hz must be in (0, {MAX_LUMINOSITY_RATE_HZ:g}], got {rate!r}")
        return _ok(state, rate_hz=float(rate))

    if op == "set_filter_q":
        value = msg.get("value")
        if not _is_number(value) or not FILTER_Q_MIN <= value <= FILTER_Q_MAX:
            return _err(state, f"filter q must be in [{FILTER_Q_MIN}, {FILTER_Q_MAX}], got {value!r}")
        new = replace(state, filter_q=float(value))
        return _ok(new, q=float(value))

    return _err(state, f"unknown op {op!r}")  # unreachable, OPS is closed
