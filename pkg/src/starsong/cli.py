"""Command-line client for the starsong service.

Every batch command talks to the HTTP API: against a remote server when
--server is given, otherwise against an in-process application, so the same
code path serves both offline use and operational checks against a running
deployment. ``serve`` hosts the service itself.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import asyncio
import base64
import sys
from pathlib import Path

import click
import httpx

from .catalog import builtin_v465_per, load_catalog

TABLE_HEADER = "f(c/d) A(mmag) phi f' L p f'xC4(Hz)"


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


async def _request(server: str | None, catalog: str | None, method: str, path: str, payload: dict) -> dict:
    if catalog is not None:
        try:
            payload = {**payload, "catalog_csv": Path(catalog).read_text(encoding="utf-8")}
        except OSError as exc:
            _fail(str(exc))
    if server is not None:
        client = httpx.AsyncClient(base_url=server, timeout=120.0)
    else:
        from .service import create_app

        transport = httpx.ASGITransport(app=create_app())
        client = httpx.AsyncClient(transport=transport, base_url="http://starsong.local", timeout=120.0)
    try:
        response = await client.request(method, path, json=payload)
    except httpx.HTTPError as exc:
        _fail(f"request failed: {exc}")
    finally:
        await client.aclose()
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        _fail(str(detail))
    return response.json()


def _call(server: str | None, catalog: str | None, method: str, path: str, payload: dict) -> dict:
    return asyncio.run(_request(server, catalog, method, path, payload))


def format_table_row(row: dict) -> str:
    return (
        f"{row['freq_cpd']:.3f} {row['amp_mmag']:.1f} {row['phase']:.2f} "
        f"{row['relative_frequency']:.3f} {row['loudness']:.3f} {row['start']:.2f} "
        f"{row['frequency_hz']:.3f}"
    )


server_option = click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
catalog_option = click.option(
    "--catalog", default=None, type=click.Path(), help="Catalog CSV; defaults to the bundled star."
)


@click.group()
def main() -> None:
    """Starlight audification toolkit."""


@main.command()
@click.argument("star_id")
@click.argument("out_wav", required=False, type=click.Path())
@catalog_option
@server_option
@click.option("--base-hz", default=261.630, show_default=True)
@click.option(
    "--rounding",
    default="full_precision",
    type=click.Choice(["full_precision", "table_compat"]),
    show_default=True,
)
@click.option("--duration", default=10.0, show_default=True, help="Seconds each partial sounds.")
@click.option("--sample-rate", default=44100, show_default=True)
def audify(star_id, out_wav, catalog, server, base_hz, rounding, duration, sample_rate) -> None:
    """Print a star's derived parameter table; optionally render OUT_WAV."""
    data = _call(
        server,
        catalog,
        "POST",
        "/v1/audify",
        {
            "star_id": star_id,
            "base_hz": base_hz,
            "rounding": rounding,
            "duration_s": duration,
            "sample_rate": sample_rate,
            "render": out_wav is not None,
        },
    )
    click.echo(TABLE_HEADER)
    for row in data["rows"]:
        click.echo(format_table_row(row))
    if out_wav is not None:
        Path(out_wav).write_bytes(base64.b64decode(data["wav_base64"]))
        click.echo(f"wrote {out_wav}")


@main.command()
@click.argument("lightcurve_csv", type=click.Path())
@server_option
@click.option("--n-modes", default=8, show_default=True)
@click.option("--oversample", default=10.0, show_default=True)
@click.option("--snr-stop", default=4.0, show_default=True)
@click.option("--star-id", default="recovered", show_default=True, help="Star id used in the output rows.")
def analyze(lightcurve_csv, server, n_modes, oversample, snr_stop, star_id) -> None:
    """Recover modes from a light-curve CSV; prints catalog CSV rows."""
    try:
        content = Path(lightcurve_csv).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc))
    data = _call(
        server,
        None,
        "POST",
        "/v1/analyze",
        {
            "lightcurve_csv": content,
            "n_modes": n_modes,
            "oversample": oversample,
            "snr_stop": snr_stop,
            "star_id": star_id,
        },
    )
    click.echo(data["catalog_csv"], nl=False)


@main.command()
@click.argument("star_id")
@catalog_option
@server_option
@click.option("--grid", default="semitone_12", type=click.Choice(["semitone_12", "quartertone_24"]), show_default=True)
@click.option("--a4", default=440.0, show_default=True)
@click.option("--base-hz", default=261.630, show_default=True)
@click.option(
    "--rounding",
    default="full_precision",
    type=click.Choice(["full_precision", "table_compat"]),
    show_default=True,
)
@click.option("--midi-out", default=None, type=click.Path())
@click.option("--text-out", default=None, type=click.Path())
def reservoir(star_id, catalog, server, grid, a4, base_hz, rounding, midi_out, text_out) -> None:
    """Quantize a star's partials into a pitch reservoir."""
    data = _call(
        server,
        catalog,
        "POST",
        "/v1/reservoir",
        {"star_id": star_id, "grid": grid, "a4_hz": a4, "base_hz": base_hz, "rounding": rounding},
    )
    if text_out is not None:
        Path(text_out).write_text(data["text"], encoding="utf-8")
    else:
        click.echo(data["text"], nl=False)
    if midi_out is not None:
        Path(midi_out).write_bytes(base64.b64decode(data["midi_base64"]))
        click.echo(f"wrote {midi_out}")


@main.command()
@click.argument("star_id")
@catalog_option
@server_option
@click.option("--days", default=10.0, show_default=True)
@click.option("--samples", default=2000, show_default=True)
@click.option("--out", default=None, type=click.Path(), help="Output CSV path; default prints to stdout.")
def simulate(star_id, catalog, server, days, samples, out) -> None:
    """Simulate a star's light curve as a time_d,mag_mmag CSV."""
    data = _call(
        server,
        catalog,
        "POST",
        "/v1/simulate",
        {"star_id": star_id, "days": days, "samples": samples},
    )
    if out is not None:
        Path(out).write_text(data["lightcurve_csv"], encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(data["lightcurve_csv"], nl=False)


@main.command()
@catalog_option
@click.option("--bind", default="127.0.0.1:8765", show_default=True, help="host:port to listen on.")
@click.option("--wav-sink", default=None, type=click.Path(), help="Record the live mix to this WAV file.")
def serve(catalog, bind, wav_sink) -> None:
    """Run the live performance service (REST + WebSocket control plane)."""
    import uvicorn

    from .service import create_app

    # faster GIL handoff keeps the audio thread's wake-up latency low
    sys.setswitchinterval(0.001)

    try:
        stars = load_catalog(catalog) if catalog else [builtin_v465_per()]
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    host, _, port_s = bind.partition(":")
    try:
        port = int(port_s) if port_s else 8765
    except ValueError:
        _fail(f"invalid port in --bind {bind!r}")
    app = create_app(stars, audio=True, wav_sink_path=wav_sink)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="info")


if __name__ == "__main__":
    main()
