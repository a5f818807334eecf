"""starsong: turn pulsating-star oscillations into sound, pitch, and performance."""

from .audify import AudifyConfig, DimensionlessMode, PartialSpec, Rounding, derive_dimensionless, to_partials
from .catalog import (
    CatalogError,
    PulsationMode,
    StarRecord,
    builtin_v465_per,
    load_catalog,
    save_catalog,
    validate,
)
from .synth import AudioBuffer, RenderConfig, render_partials, spectral_peaks, write_wav

__version__ = "0.1.0"

__all__ = [
    "AudifyConfig",
    "AudioBuffer",
    "CatalogError",
    "DimensionlessMode",
    "PartialSpec",
    "PulsationMode",
    "RenderConfig",
    "Rounding",
    "StarRecord",
    "builtin_v465_per",
    "derive_dimensionless",
    "load_catalog",
    "render_partials",
    "save_catalog",
    "spectral_peaks",
    "to_partials",
    "validate",
    "write_wav",
]
