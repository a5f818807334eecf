"""FastAPI service: batch endpoints plus the live WebSocket control plane.

One SessionState is shared by every control connection; transitions are
serialized through SessionManager. Batch endpoints are stateless and accept
an inline catalog, so remote clients do not depend on the server's own
catalog file.
"""

from __future__ import annotations

import asyncio
import base64
import io
import json
import tempfile
import threading
from contextlib import asynccontextmanager
from pathlib import Path

import anyio
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect

from .. import analysis, reservoir, synth
from ..audify import AudifyConfig, Rounding, derive_dimensionless, star_partials
from ..catalog import CatalogError, StarRecord, builtin_v465_per, find_star, load_catalog
from ..perform import engine as engine_mod
from ..perform import state as state_mod
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    AudifyRequest,
    AudifyResponse,
    ModeRow,
    PitchEventModel,
    ReservoirRequest,
    ReservoirResponse,
    SimulateRequest,
    SimulateResponse,
    StarListResponse,
    StarSummary,
    TableRow,
)


class SessionManager:
    """Single-writer control plane over one SessionState.

    handle() is the only mutation path; it publishes a fresh EngineSnapshot
    after every transition. The audio plane reads the snapshot attribute
    without locks (attribute loads are atomic).
    """

    def __init__(self, stars: list[StarRecord], engine_cfg: engine_mod.EngineConfig):
        self._lock = threading.Lock()
        self._acfg = AudifyConfig()
        self._engine_cfg = engine_cfg
        self.state = state_mod.initial_state(stars)
        self.snapshot = state_mod.engine_snapshot(self.state)

    def _load_sample(self, path: str):
        return engine_mod.load_sample_file(path, self._engine_cfg.sample_rate)

    def handle(self, msg: dict) -> dict:
        with self._lock:
            self.state, reply = state_mod.apply_control(self.state, msg, self._acfg, self._load_sample)
            self.snapshot = state_mod.engine_snapshot(self.state)
        return reply

    def luminosities(self) -> dict[str, float]:
        return state_mod.luminosities(self.state)


def _parse_rounding(name: str) -> Rounding:
    try:
        return Rounding(name)
    except ValueError:
        raise HTTPException(status_code=422, detail=f"unknown rounding {name!r}")


def _parse_grid(name: str) -> reservoir.Grid:
    try:
        return reservoir.Grid(name)
    except ValueError:
        raise HTTPException(status_code=422, detail=f"unknown grid {name!r}")


def _resolve_star(catalog_csv: str | None, star_id: str, server_stars: list[StarRecord]) -> StarRecord:
    stars = server_stars
    if catalog_csv is not None:
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False, encoding="utf-8") as fh:
            fh.write(catalog_csv)
            tmp = fh.name
        try:
            stars = load_catalog(tmp)
        finally:
            Path(tmp).unlink(missing_ok=True)
    return find_star(stars, star_id)


def parameter_table(star: StarRecord, acfg: AudifyConfig) -> list[TableRow]:
    dims = derive_dimensionless(star)
    partials = star_partials(star, acfg)
    return [
        TableRow(
            freq_cpd=m.frequency_cpd,
            amp_mmag=m.amplitude_mmag,
            phase=m.phase,
            relative_frequency=d.relative_frequency,
            loudness=d.loudness,
            start=d.start,
            frequency_hz=p.frequency_hz,
        )
        for m, d, p in zip(star.modes, dims, partials)
    ]


def create_app(
    stars: list[StarRecord] | None = None,
    *,
    audio: bool = False,
    wav_sink_path: str | None = None,
    engine_cfg: engine_mod.EngineConfig = engine_mod.EngineConfig(),
) -> FastAPI:
    """Build the service around a catalog (defaults to the bundled star).

    audio=True starts the self-paced engine thread for the session's
    lifetime, writing to a sound device when available, else to
    wav_sink_path, else discarding.
    """
    catalog = list(stars) if stars else [builtin_v465_per()]
    manager = SessionManager(catalog, engine_cfg)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        engine = None
        if audio:
            sink = engine_mod.open_sink(wav_sink_path, engine_cfg.sample_rate)
            engine = engine_mod.AudioEngine(lambda: manager.snapshot, sink, engine_cfg)
            engine.start()
            app.state.engine = engine
        yield
        if engine is not None:
            engine.stop()

    app = FastAPI(title="starsong", lifespan=lifespan)
    app.state.manager = manager

    @app.get("/v1/stars", response_model=StarListResponse)
    def list_stars() -> StarListResponse:
        return StarListResponse(
            stars=[StarSummary(id=s.id, name=s.name, modes=len(s.modes)) for s in catalog]
        )

    @app.post("/v1/audify", response_model=AudifyResponse)
    def audify_star(req: AudifyRequest) -> AudifyResponse:
        acfg = AudifyConfig(base_hz=req.base_hz, rounding=_parse_rounding(req.rounding))
        try:
            star = _resolve_star(req.catalog_csv, req.star_id, catalog)
            rows = parameter_table(star, acfg)
            wav_b64 = None
            if req.render:
                buf = synth.render_partials(
                    star_partials(star, acfg),
                    synth.RenderConfig(sample_rate=req.sample_rate, duration_s=req.duration_s),
                )
                raw = io.BytesIO()
                with tempfile.NamedTemporaryFile(suffix=".wav", delete=False) as fh:
                    tmp = fh.name
                try:
                    synth.write_wav(buf, tmp)
                    raw.write(Path(tmp).read_bytes())
                finally:
                    Path(tmp).unlink(missing_ok=True)
                wav_b64 = base64.b64encode(raw.getvalue()).decode("ascii")
        except (CatalogError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return AudifyResponse(star_id=star.id, rows=rows, wav_base64=wav_b64)

    @app.post("/v1/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest) -> SimulateResponse:
        try:
            star = _resolve_star(req.catalog_csv, req.star_id, catalog)
        except (CatalogError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        import numpy as np

        times = np.linspace(0.0, req.days, req.samples, endpoint=False)
        lc = analysis.simulate_light_curve(star, times)
        out = io.StringIO()
        out.write("time_d,mag_mmag\n")
        for t, m in zip(lc.times_d, lc.magnitudes_mmag):
            out.write(f"{float(t)!r},{float(m)!r}\n")
        return SimulateResponse(lightcurve_csv=out.getvalue())

    @app.post("/v1/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False, encoding="utf-8") as fh:
            fh.write(req.lightcurve_csv)
            tmp = fh.name
        try:
            lc = analysis.read_lightcurve_csv(tmp)
            cfg = analysis.ExtractionConfig(
                n_modes=req.n_modes, oversample=req.oversample, snr_stop=req.snr_stop
            )
            modes = analysis.extract_modes(lc, cfg)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        finally:
            Path(tmp).unlink(missing_ok=True)
        rows = [
            ModeRow(frequency_cpd=m.frequency_cpd, amplitude_mmag=m.amplitude_mmag, phase=m.phase)
            for m in modes
        ]
        out = io.StringIO()
        out.write("star_id,name,freq_cpd,amp_mmag,phase\n")
        for m in modes:
            out.write(
                f"{req.star_id},{req.star_id},{m.frequency_cpd!r},{m.amplitude_mmag!r},{m.phase!r}\n"
            )
        return AnalyzeResponse(modes=rows, catalog_csv=out.getvalue())

    @app.post("/v1/reservoir", response_model=ReservoirResponse)
    def reservoir_endpoint(req: ReservoirRequest) -> ReservoirResponse:
        acfg = AudifyConfig(base_hz=req.base_hz, rounding=_parse_rounding(req.rounding))
        tcfg = reservoir.TuningConfig(a4_hz=req.a4_hz, grid=_parse_grid(req.grid))
        try:
            star = _resolve_star(req.catalog_csv, req.star_id, catalog)
            events = reservoir.reservoir_from_star(star, acfg, tcfg)
        except (CatalogError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        text = reservoir.export_text(events)
        with tempfile.NamedTemporaryFile(suffix=".mid", delete=False) as fh:
            tmp = fh.name
        try:
            reservoir.export_midi(events, tmp)
            midi_b64 = base64.b64encode(Path(tmp).read_bytes()).decode("ascii")
        finally:
            Path(tmp).unlink(missing_ok=True)
        return ReservoirResponse(
            events=[PitchEventModel(**e.__dict__) for e in events],
            text=text,
            midi_base64=midi_b64,
        )

    @app.websocket("/ws")
    async def control_socket(ws: WebSocket) -> None:
        await ws.accept()
        send_lock = asyncio.Lock()
        telemetry_task: asyncio.Task | None = None

        async def telemetry(rate_hz: float) -> None:
            period = 1.0 / rate_hz
            try:
                while True:
                    frame = {"event": "luminosity", "values": manager.luminosities()}
                    async with send_lock:
                        await ws.send_text(json.dumps(frame))
                    await asyncio.sleep(period)
            except (WebSocketDisconnect, RuntimeError, anyio.ClosedResourceError):
                pass

        try:
            while True:
                raw = await ws.receive_text()
                msg = None
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    reply = {"ok": False, "error": "malformed JSON"}
                else:
                    reply = manager.handle(msg)
                async with send_lock:
                    await ws.send_text(json.dumps(reply))
                if reply.get("ok") and isinstance(msg, dict) and msg.get("op") == "subscribe_luminosity":
                    if telemetry_task is not None:
                        telemetry_task.cancel()
                    telemetry_task = asyncio.create_task(telemetry(float(msg["rate_hz"])))
        except WebSocketDisconnect:
            pass
        finally:
            if telemetry_task is not None:
                telemetry_task.cancel()

    return app
