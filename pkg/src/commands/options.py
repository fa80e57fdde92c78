"""Flags shared by the alpha, measures and fluctuations commands.

Every flag defaults to None so that unset flags fall through to the config
file and the built-in defaults.
"""

import logging
from contextlib import contextmanager
from typing import Any, Optional

import typer
from typing_extensions import Annotated

from ..config import ExperimentConfig, resolve_config, settings
from ..core import RMChannelError, console, print_error
from ..core.records import CurveRecord, build_id

logger = logging.getLogger(__name__)

ModelOpt = Annotated[
    Optional[str],
    typer.Option(
        "--model", "-m", help="gue-exact, gue-infinite, poisson, poisson-infinite, monte-carlo"
    ),
]
DimOpt = Annotated[
    Optional[str],
    typer.Option("--dim", "-N", help="Total dimension N (qubit x environment) or 'inf'"),
]
TStartOpt = Annotated[Optional[float], typer.Option("--t-start", help="First time point")]
TEndOpt = Annotated[Optional[float], typer.Option("--t-end", help="Last time point")]
TStepOpt = Annotated[Optional[float], typer.Option("--t-step", help="Time step")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", "-s", help="Random seed")]
SamplesOpt = Annotated[
    Optional[int], typer.Option("--samples", "-n", help="Haar eigenvector draws (0 = one instance)")
]
EnvOpt = Annotated[
    Optional[str], typer.Option("--env", "-e", help="Environment state: projector, mixed, rank:<r>")
]
OutOpt = Annotated[Optional[str], typer.Option("--out", "-o", help="Output file ('-' for stdout)")]
FormatOpt = Annotated[
    Optional[str], typer.Option("--format", "-f", help="Output format: csv or json")
]
ConfigOpt = Annotated[
    Optional[str], typer.Option("--config", "-c", help="Config file with KEY=value lines")
]
WorkersOpt = Annotated[Optional[int], typer.Option("--workers", "-w", help="Parallel workers")]


def collect_flags(**flags: Any) -> dict[str, Any]:
    """Drop unset flags so they don't override lower layers."""
    return {key: value for key, value in flags.items() if value is not None}


def load(command: str, config_path: Optional[str], **flags: Any) -> ExperimentConfig:
    config = resolve_config(command, collect_flags(**flags), config_path)
    logger.debug("effective config: %s", config.echo())
    return config


def new_record(config: ExperimentConfig, columns: list[str]) -> CurveRecord:
    """Empty record whose metadata regenerates ``config``."""
    metadata = {
        "config": config.echo(),
        "build": build_id(),
        "workers": config.workers,
    }
    return CurveRecord(columns=columns, metadata=metadata)


@contextmanager
def guarded():
    """Map rmchannel errors to their exit codes (2 config, 3 numeric, 1 otherwise)."""
    try:
        yield
    except typer.Exit:
        raise
    except RMChannelError as exc:
        print_error(str(exc), title=type(exc).__name__)
        raise typer.Exit(exc.exit_code)
    except Exception as exc:
        if settings.verbose:
            console.print_exception()
        print_error(f"Unexpected error: {exc}")
        raise typer.Exit(1)
