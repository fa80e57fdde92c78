"""
rmchannel CLI - qubit channels induced by random-matrix environments

Computes the Bloch radius alpha(t) of the channel a GUE or Poisson
environment induces on a qubit, the fluctuations of its matrix elements,
and the non-Markovianity measures M1, M2, M3.
"""

import sys
from typing import Optional

import typer
from typing_extensions import Annotated

from .config import COMMAND_DEFAULTS, MODELS, ExperimentConfig, load_config_file, settings
from .core import (
    ConfigError,
    console,
    print_banner,
    print_error,
    print_info,
    set_no_color,
    setup_logging,
)
from .commands import alpha_cmd, measures_cmd, fluctuations_cmd

# Create main app
app = typer.Typer(
    name="rmchannel",
    help="Qubit channels from random-matrix environments: alpha(t), fluctuations, measures",
    add_completion=True,
    rich_markup_mode="rich",
    no_args_is_help=True,
)


@app.callback()
def main_callback(
    verbose: Annotated[
        bool,
        typer.Option("--verbose", "-v", help="Log numerical diagnostics")
    ] = False,
    no_color: Annotated[
        bool,
        typer.Option("--no-color", help="Disable colored output")
    ] = False,
):
    """Global options applied before any subcommand."""
    if verbose:
        settings.verbose = True
    if no_color:
        set_no_color(True)
    setup_logging(settings.verbose)


# Register subcommands
app.command(name="alpha", help="Write the Bloch radius alpha(t) of a model")(alpha_cmd)
app.command(name="measures", help="Compute non-Markovianity measures M1, M2, M3")(measures_cmd)
app.command(name="fluctuations", help="Write variances of the channel matrix elements")(
    fluctuations_cmd
)


@app.command()
def version():
    """Show version information."""
    from importlib.metadata import version as pkg_version, PackageNotFoundError

    import numpy
    import scipy

    try:
        ver = pkg_version("rmchannel")
    except PackageNotFoundError:
        ver = "0.1.0 (dev)"

    console.print(f"[bold cyan]rmchannel[/] version [green]{ver}[/]")
    console.print(f"Python: {sys.version.split()[0]}")
    console.print(f"numpy:  {numpy.__version__}")
    console.print(f"scipy:  {scipy.__version__}")


@app.command(name="config")
def config_cmd(
    file: Annotated[
        Optional[str],
        typer.Option("--config", "-c", help="Also show values read from this config file")
    ] = None,
):
    """Show the effective default configuration."""
    print_banner()
    console.print("\n[bold cyan]Current Configuration:[/]\n")
    console.print(f"  Seed:     {settings.seed}  [dim](RMCHANNEL_SEED)[/]")
    console.print(f"  Workers:  {settings.workers}  [dim](RMCHANNEL_WORKERS)[/]")
    console.print(f"  Format:   {settings.format}  [dim](RMCHANNEL_FORMAT)[/]")
    console.print(f"  Horizon:  {settings.horizon:g}  [dim](RMCHANNEL_HORIZON)[/]")
    console.print(f"  Verbose:  {settings.verbose}  [dim](RMCHANNEL_VERBOSE)[/]")

    console.print("\n[bold cyan]Time grids:[/]\n")
    for command, grid in COMMAND_DEFAULTS.items():
        t_end = grid.get("t_end", settings.horizon)
        console.print(f"  {command:<13} t-end {t_end:g}, t-step {grid['t_step']:g}")

    if file:
        try:
            values = load_config_file(file)
        except ConfigError as exc:
            print_error(str(exc), title="ConfigError")
            raise typer.Exit(exc.exit_code)
        console.print(f"\n[bold cyan]From {file}:[/]\n")
        for key, value in values.items():
            console.print(f"  {key:<10} {value}")

    defaults = ExperimentConfig(command="alpha")
    print_info(f"Models: {', '.join(MODELS)} (default {defaults.model})")


def main():
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
