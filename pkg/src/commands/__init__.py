"""Command modules for rmchannel."""

from .alpha import alpha_cmd
from .measures import measures_cmd
from .fluctuations import fluctuations_cmd

__all__ = ["alpha_cmd", "measures_cmd", "fluctuations_cmd"]
