"""Dimensionless pulsation parameters and their mapping onto audible partials.

A star's mode group is reduced to three unitless quantities per mode:

* relative_frequency -- mode frequency divided by the group's minimum
* loudness           -- mode amplitude divided by the group's maximum
* start              -- mode phase minus the group's minimum phase

Scaling the relative frequency by a base pitch (default 261.630 Hz) turns
each mode into one audible sine partial whose normalized amplitude is the
loudness and whose start time in seconds is the start value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .catalog import StarRecord, validate


class Rounding(Enum):
    """Relative-frequency rounding applied before the base-pitch scaling.

    TABLE_COMPAT rounds to 3 decimals first, reproducing published mode
    tables that were computed from rounded ratios. FULL_PRECISION keeps the
    exact ratio, so the lowest mode lands on the base pitch exactly.
    """

    FULL_PRECISION = "full_precision"
    TABLE_COMPAT = "table_compat"


@dataclass(frozen=True)
class DimensionlessMode:
    relative_frequency: float
    loudness: float
    start: float


@dataclass(frozen=True)
class PartialSpec:
    """One audible sine: frequency in Hz, normalized amplitude, start in s."""

    frequency_hz: float
    amplitude: float
    start_s: float


@dataclass(frozen=True)
class AudifyConfig:
    base_hz: float = 261.630
    rounding: Rounding = Rounding.FULL_PRECISION
    audible_min_hz: float = 20.0
    audible_max_hz: float = 20000.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.base_hz) and self.base_hz > 0):
            raise ValueError(f"base_hz must be > 0, got {self.base_hz}")
        if not self.audible_min_hz < self.audible_max_hz:
            raise ValueError("audible_min_hz must be below audible_max_hz")


def derive_dimensionless(star: StarRecord) -> list[DimensionlessMode]:
    """Reduce a star's modes to their dimensionless triples, order preserved.

    The mode at the group's minimum frequency gets relative_frequency 1, the
    strongest mode gets loudness 1, and the earliest phase gets start 0.
    """
    problems = validate(star)
    if problems:
        raise ValueError("; ".join(problems))
    f_min = min(m.frequency_cpd for m in star.modes)
    a_max = max(m.amplitude_mmag for m in star.modes)
    phase_min = min(m.phase for m in star.modes)
    return [
        DimensionlessMode(
            relative_frequency=m.frequency_cpd / f_min,
            loudness=m.amplitude_mmag / a_max,
            start=m.phase - phase_min,
        )
        for m in star.modes
    ]


def to_partials(dims: list[DimensionlessMode], cfg: AudifyConfig = AudifyConfig()) -> list[PartialSpec]:
    """Scale dimensionless modes into audible partials.

    Raises ValueError when a resulting frequency falls outside the audible
    window, or when a mode carries a negative start or an out-of-range
    loudness (both indicate malformed input rather than a real mode group).
    """
    if not dims:
        raise ValueError("no modes to audify")
    partials: list[PartialSpec] = []
    for i, dim in enumerate(dims):
        rel = dim.relative_frequency
        if cfg.rounding is Rounding.TABLE_COMPAT:
            rel = round(rel, 3)
        if dim.start < 0:
            raise ValueError(f"mode {i}: negative start {dim.start}")
        if not 0 < dim.loudness <= 1:
            raise ValueError(f"mode {i}: loudness {dim.loudness} outside (0, 1]")
        hz = rel * cfg.base_hz
        if not cfg.audible_min_hz <= hz <= cfg.audible_max_hz:
            raise ValueError(
                f"mode {i}: {hz:.3f} Hz is outside the audible window "
                f"[{cfg.audible_min_hz}, {cfg.audible_max_hz}] Hz"
            )
        partials.append(PartialSpec(frequency_hz=hz, amplitude=dim.loudness, start_s=dim.start))
    return partials


def star_partials(star: StarRecord, cfg: AudifyConfig = AudifyConfig()) -> list[PartialSpec]:
    """Convenience composition of derive_dimensionless and to_partials."""
    return to_partials(derive_dimensionless(star), cfg)
