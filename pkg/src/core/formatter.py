"""Rich terminal formatting utilities.

Messages go to stderr so that result data written to stdout (``--out -``)
stays machine-readable.
"""

import logging
from typing import Optional

from rich.console import Console
from rich.live import Live
from rich.logging import RichHandler
from rich.panel import Panel
from rich.spinner import Spinner
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

RMCHANNEL_THEME = Theme({
    "info": "cyan",
    "warning": "yellow",
    "error": "bold red",
    "success": "bold green",
    "value": "bold magenta",
    "highlight": "bold yellow",
})

console = Console(theme=RMCHANNEL_THEME, stderr=True)


def set_no_color(disabled: bool = True):
    console.no_color = disabled


def setup_logging(verbose: bool = False):
    """Route library logging through rich; DEBUG when verbose, else WARNING."""
    level = logging.DEBUG if verbose else logging.WARNING
    handler = RichHandler(console=console, show_path=verbose, rich_tracebacks=verbose)
    logging.basicConfig(level=level, format="%(message)s", handlers=[handler], force=True)


def print_banner():
    """Print the rmchannel banner."""
    console.print(Panel(
        Text.assemble(
            ("rmchannel", "bold cyan"),
            "  qubit channels from random-matrix environments\n",
            ("alpha", "value"), " | ", ("measures", "value"), " | ", ("fluctuations", "value"),
        ),
        border_style="cyan",
        padding=(0, 2),
    ))


def print_error(message: str, title: str = "Error"):
    """Print an error message."""
    console.print()
    console.print(Panel(
        Text(message, style="bold red"),
        title=f"[bold red]{title}[/]",
        border_style="red",
        padding=(1, 2),
    ))


def print_warning(message: str):
    """Print a warning message."""
    console.print(f"[warning]! {message}[/]")


def print_success(message: str):
    """Print a success message."""
    console.print(f"[success]✓ {message}[/]")


def print_info(message: str):
    """Print an info message."""
    console.print(f"[info]i {message}[/]")


def format_measure(value: float) -> str:
    if value == float("inf"):
        return "∞"
    return f"{value:.4g}"


def print_measure_table(reports, title: str = "Non-Markovianity measures"):
    """Show measure reports as a rich table."""
    table = Table(title=title, show_lines=False, padding=(0, 1))
    table.add_column("model", style="yellow")
    table.add_column("N", justify="right")
    table.add_column("M1", justify="right", style="value")
    table.add_column("M2", justify="right", style="value")
    table.add_column("M3", justify="right", style="value")
    table.add_column("horizon", justify="right", style="dim")
    table.add_column("tail", justify="right", style="dim")

    for report in reports:
        if report.N is None:
            n = "-"
        else:
            n = "∞" if report.N == float("inf") else str(int(report.N))
        table.add_row(
            report.model,
            n,
            format_measure(report.m1),
            format_measure(report.m2),
            format_measure(report.m3),
            f"{report.horizon:g}",
            f"{report.tail_bound:.2g}",
        )
    console.print()
    console.print(table)


class LoadingSpinner:
    """Context manager for showing a loading spinner."""

    def __init__(self, message: str = "Computing..."):
        self.message = message
        self.live: Optional[Live] = None

    def __enter__(self):
        spinner = Spinner("dots", text=f"[cyan]{self.message}[/]")
        self.live = Live(spinner, console=console, refresh_per_second=10, transient=True)
        self.live.__enter__()
        return self

    def __exit__(self, *args):
        if self.live:
            self.live.__exit__(*args)
