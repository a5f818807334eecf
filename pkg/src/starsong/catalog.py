"""Star catalogs: pulsation modes, the bundled reference star, CSV ingest.

The catalog CSV format is UTF-8, comma separated, with the exact header
``star_id,name,freq_cpd,amp_mmag,phase`` and one mode per row. Rows sharing a
``star_id`` form one star, modes in file order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

CSV_HEADER = ("star_id", "name", "freq_cpd", "amp_mmag", "phase")


class CatalogError(ValueError):
    """A catalog file could not be parsed or fails validation."""


@dataclass(frozen=True)
class PulsationMode:
    """One observed oscillation: frequency in cycles/day, amplitude in
    milli-magnitudes, and a dimensionless phase value.

    The phase is stored exactly as given; only the analysis module assigns
    it a radian interpretation.
    """

    frequency_cpd: float
    amplitude_mmag: float
    phase: float


@dataclass(frozen=True)
class StarRecord:
    """A star with its ordered, non-empty group of pulsation modes."""

    id: str
    name: str
    modes: tuple[PulsationMode, ...]
    source: str = ""


def validate(star: StarRecord) -> list[str]:
    """Return a description of every invariant violation (empty when valid)."""
    problems: list[str] = []
    if not star.modes:
        problems.append(f"star {star.id!r} has no modes")
    for i, mode in enumerate(star.modes):
        if not (math.isfinite(mode.frequency_cpd) and mode.frequency_cpd > 0):
            problems.append(f"star {star.id!r} mode {i}: frequency_cpd must be finite and > 0")
        if not (math.isfinite(mode.amplitude_mmag) and mode.amplitude_mmag > 0):
            problems.append(f"star {star.id!r} mode {i}: amplitude_mmag must be finite and > 0")
        if not math.isfinite(mode.phase):
            problems.append(f"star {star.id!r} mode {i}: phase must be finite")
    seen: dict[float, int] = {}
    for i, mode in enumerate(star.modes):
        if mode.frequency_cpd in seen:
            problems.append(
                f"star {star.id!r}: duplicate frequency {mode.frequency_cpd} "
                f"(modes {seen[mode.frequency_cpd]} and {i})"
            )
        else:
            seen[mode.frequency_cpd] = i
    return problems


#: (frequency c/d, amplitude mmag, phase) rows of the bundled reference star.
V465_PER_MODES = (
    (14.040, 3.5, -0.14),
    (17.208, 2.3, 2.05),
    (33.259, 1.7, 1.93),
    (13.721, 1.1, 3.55),
)


def builtin_v465_per() -> StarRecord:
    """The four-mode delta Scuti star V465 Per shipped as a fixture."""
    modes = tuple(PulsationMode(f, a, ph) for f, a, ph in V465_PER_MODES)
    return StarRecord(
        id="v465_per",
        name="V465 Per",
        modes=modes,
        source="bundled delta Scuti reference dataset",
    )


def load_catalog(path: str | Path) -> list[StarRecord]:
    """Read a catalog CSV into one validated StarRecord per distinct star id.

    Raises CatalogError for a missing/wrong header, a malformed row (the row
    number is reported), or a record that fails validation (the star id is
    reported). File system errors propagate as OSError.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise CatalogError(f"{path}: expected header {','.join(CSV_HEADER)}")

    names: dict[str, str] = {}
    grouped: dict[str, list[PulsationMode]] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise CatalogError(f"{path}:{lineno}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        star_id, name, freq_s, amp_s, phase_s = (cell.strip() for cell in row)
        if not star_id:
            raise CatalogError(f"{path}:{lineno}: empty star_id")
        try:
            mode = PulsationMode(float(freq_s), float(amp_s), float(phase_s))
        except ValueError as exc:
            raise CatalogError(f"{path}:{lineno}: {exc}") from exc
        if star_id in names and names[star_id] != name:
            raise CatalogError(
                f"{path}:{lineno}: star {star_id!r} renamed from {names[star_id]!r} to {name!r}"
            )
        names.setdefault(star_id, name)
        grouped.setdefault(star_id, []).append(mode)

    records = [
        StarRecord(id=star_id, name=names[star_id], modes=tuple(modes))
        for star_id, modes in grouped.items()
    ]
    for record in records:
        problems = validate(record)
        if problems:
            raise CatalogError(f"{path}: invalid star {record.id!r}: " + "; ".join(problems))
    return records


def save_catalog(stars: Iterable[StarRecord], path: str | Path) -> None:
    """Write records in the catalog CSV format; floats keep full precision."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for star in stars:
            for mode in star.modes:
                writer.writerow(
                    [star.id, star.name, repr(mode.frequency_cpd), repr(mode.amplitude_mmag), repr(mode.phase)]
                )


def find_star(stars: Iterable[StarRecord], star_id: str) -> StarRecord:
    """Look up a star by id; raises CatalogError when absent."""
    for star in stars:
        if star.id == star_id:
            return star
    known = ", ".join(s.id for s in stars)
    raise CatalogError(f"unknown star id {star_id!r} (known: {known})")
