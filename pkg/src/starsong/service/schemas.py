"""Request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class StarSummary(BaseModel):
    id: str
    name: str
    modes: int


class StarListResponse(BaseModel):
    stars: list[StarSummary]


class TableRow(BaseModel):
    """One mode's observed and derived parameters, in mode order."""

    freq_cpd: float
    amp_mmag: float
    phase: float
    relative_frequency: float
    loudness: float
    start: float
    frequency_hz: float


class AudifyRequest(BaseModel):
    star_id: str
    catalog_csv: str | None = None  # inline catalog; server catalog when absent
    base_hz: float = 261.630
    rounding: str = "full_precision"
    duration_s: float = Field(default=10.0, gt=0)
    sample_rate: int = Field(default=44100, ge=8000)
    render: bool = False


class AudifyResponse(BaseModel):
    star_id: str
    rows: list[TableRow]
    wav_base64: str | None = None


class ModeRow(BaseModel):
    frequency_cpd: float
    amplitude_mmag: float
    phase: float


class AnalyzeRequest(BaseModel):
    lightcurve_csv: str
    star_id: str = "recovered"
    n_modes: int = Field(default=8, ge=1)
    oversample: float = Field(default=10.0, ge=1)
    snr_stop: float = 4.0


class AnalyzeResponse(BaseModel):
    modes: list[ModeRow]
    catalog_csv: str


class SimulateRequest(BaseModel):
    star_id: str
    catalog_csv: str | None = None
    days: float = Field(default=10.0, gt=0)
    samples: int = Field(default=2000, ge=2)


class SimulateResponse(BaseModel):
    lightcurve_csv: str


class PitchEventModel(BaseModel):
    midi_note: int
    cent_offset: float
    frequency_hz: float
    velocity: int
    onset_s: float


class ReservoirRequest(BaseModel):
    star_id: str
    catalog_csv: str | None = None
    grid: str = "semitone_12"
    a4_hz: float = Field(default=440.0, gt=0)
    base_hz: float = 261.630
    rounding: str = "full_precision"


class ReservoirResponse(BaseModel):
    events: list[PitchEventModel]
    text: str
    midi_base64: str
