"""Live performance plane: session state, control protocol, audio engine."""

from .state import (
    ControlledPartial,
    EngineSnapshot,
    SessionState,
    apply_control,
    controlled_partials,
    engine_snapshot,
    initial_state,
    luminosities,
    selected_luminosity,
)
from .engine import AudioEngine, EngineConfig, NullSink, WavSink, load_sample_file
from .filters import BandPassBank, spectral_filter

__all__ = [
    "AudioEngine",
    "BandPassBank",
    "ControlledPartial",
    "EngineConfig",
    "EngineSnapshot",
    "NullSink",
    "SessionState",
    "WavSink",
    "apply_control",
    "controlled_partials",
    "engine_snapshot",
    "initial_state",
    "load_sample_file",
    "luminosities",
    "selected_luminosity",
    "spectral_filter",
]
