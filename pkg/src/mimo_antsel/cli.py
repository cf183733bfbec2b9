"""Command-line interface for massive-mimo-antsel."""

from pathlib import Path
from typing import Annotated

import typer

from . import __version__
from .channel import power_spread_db
from .config import Settings, get_settings, load_scenario
from .ctf import load_channel, save_channel
from .exceptions import AntselError, ChannelFormatError
from .logging import setup_logging
from .models import SweepResult

app = typer.Typer(
    name="antsel",
    help="Antenna selection for multi-user massive MIMO-OFDM downlink",
    add_completion=False,
)

EXIT_CHANNEL_FORMAT = ChannelFormatError.exit_code


def _settings() -> Settings:
    try:
        return get_settings()
    except AntselError as e:
        typer.echo(f"❌ Configuration error: {e}", err=True)
        typer.echo("💡 Check the ANTSEL_* variables in your environment or .env file.", err=True)
        raise typer.Exit(e.exit_code) from e


def _fail(e: AntselError) -> typer.Exit:
    """Report a library error and return the matching typer.Exit."""
    icon = {2: "⚙️ ", 3: "📦", 4: "🧮"}.get(e.exit_code, "❌")
    typer.echo(f"{icon} {type(e).__name__}: {e}", err=True)
    return typer.Exit(e.exit_code)


def _print_summary(result: SweepResult) -> None:
    for strategy, n in result.n90_dpc.items():
        zf = result.n90_zf.get(strategy)
        zf_text = f", ZF n90 = {zf}" if zf is not None else ""
        typer.echo(f"   {strategy.value:<10} DPC n90 = {n}{zf_text}")
    for strategy, points in result.report_points.items():
        for n, (dpc_gain, zf_gain) in points.items():
            zf_text = f", ZF {zf_gain:+.2f}%" if zf_gain is not None else ""
            typer.echo(f"   {strategy.value:<10} N={n}: DPC {dpc_gain:+.2f}%{zf_text} vs random")
    if result.sanity_violations:
        typer.echo(f"⚠️  {len(result.sanity_violations)} sanity check(s) failed:", err=True)
        for message in result.sanity_violations:
            typer.echo(f"   - {message}", err=True)


@app.command()
def run(
    config: Annotated[Path, typer.Option("--config", "-c", help="Scenario JSON file")],
    out_dir: Annotated[Path, typer.Option("--out-dir", "-o", help="Output directory")],
    seed: Annotated[
        int | None, typer.Option("--seed", min=0, help="Override the scenario seed")
    ] = None,
    threads: Annotated[
        int | None, typer.Option("--threads", min=1, help="Worker threads for sweep cells")
    ] = None,
    timings: Annotated[
        bool, typer.Option("--timings", help="Record wall-clock times in the CSV")
    ] = False,
    verbose: Annotated[bool, typer.Option("--verbose", help="Enable verbose logging")] = False,
) -> None:
    """Run the N sweep of a scenario and write CSV, selection trace and summary.

    Writes <name>.csv, <name>_trace.csv and <name>_summary.json into the output
    directory.

    Examples:
        antsel run --config scenarios/iid.json --out-dir results
        antsel run -c scenarios/los.json -o results --seed 7 --threads 4
    """
    from .experiment import run_scenario
    from .report import emit_csv, emit_selection_trace, emit_summary

    settings = _settings()
    setup_logging(verbose, settings.log_dir)

    try:
        scenario = load_scenario(config)
        if seed is not None:
            scenario = scenario.model_copy(update={"seed": seed})
        typer.echo(
            f"📡 Scenario '{scenario.name}': K={scenario.K}, M={scenario.M}, "
            f"L={scenario.L}, rho={scenario.rho_db:g} dB"
        )
        result = run_scenario(
            scenario, settings, threads=threads, record_timings=timings or None
        )
    except AntselError as e:
        raise _fail(e) from e
    except OSError as e:
        typer.echo(f"📦 Cannot read channel: {e}", err=True)
        raise typer.Exit(EXIT_CHANNEL_FORMAT) from e

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"{scenario.name}.csv"
        emit_csv(result, csv_path)
        emit_selection_trace(result.rows, out_dir / f"{scenario.name}_trace.csv")
        emit_summary(result, out_dir / f"{scenario.name}_summary.json")
    except AntselError as e:
        raise _fail(e) from e
    except OSError as e:
        typer.echo(f"❌ Cannot create {out_dir}: {e}", err=True)
        raise typer.Exit(1) from e

    typer.echo(f"   ✓ {len(result.rows)} rows written to {csv_path}")
    _print_summary(result)
    typer.echo("✅ Sweep complete!")


@app.command("gen-channel")
def gen_channel(
    config: Annotated[Path, typer.Option("--config", "-c", help="Scenario JSON file")],
    out: Annotated[Path, typer.Option("--out", "-o", help="Output .ctf1 file")],
    seed: Annotated[
        int | None, typer.Option("--seed", min=0, help="Override the scenario seed")
    ] = None,
    verbose: Annotated[bool, typer.Option("--verbose", help="Enable verbose logging")] = False,
) -> None:
    """Generate a scenario's channel (before normalization) and save it as CTF1.

    Examples:
        antsel gen-channel --config scenarios/los.json --out los.ctf1
    """
    from .sources import ChannelSourceFactory

    settings = _settings()
    setup_logging(verbose, settings.log_dir)

    try:
        scenario = load_scenario(config)
        if seed is not None:
            scenario = scenario.model_copy(update={"seed": seed})
        tensor = ChannelSourceFactory.get_source(scenario.channel_source).load(scenario)
        save_channel(tensor, out)
    except AntselError as e:
        raise _fail(e) from e
    except OSError as e:
        typer.echo(f"📦 Cannot read channel: {e}", err=True)
        raise typer.Exit(EXIT_CHANNEL_FORMAT) from e

    typer.echo(f"✅ Saved {tensor.meta} (K={tensor.K}, M={tensor.M}, L={tensor.L}) to {out}")


@app.command()
def inspect(
    channel: Annotated[Path, typer.Option("--channel", help="CTF1 channel file")],
) -> None:
    """Print the dimensions and per-antenna power spread of a channel file.

    Examples:
        antsel inspect --channel los.ctf1
    """
    try:
        tensor = load_channel(channel)
    except AntselError as e:
        raise _fail(e) from e
    except OSError as e:
        typer.echo(f"📦 Cannot read channel: {e}", err=True)
        raise typer.Exit(EXIT_CHANNEL_FORMAT) from e

    typer.echo(f"📡 {channel}")
    typer.echo(f"   K={tensor.K} users, M={tensor.M} antennas, L={tensor.L} subcarriers")
    typer.echo(f"   per-antenna power spread: {power_spread_db(tensor):.2f} dB")


@app.command()
def version() -> None:
    """Show the installed version."""
    typer.echo(f"antsel {__version__}")
