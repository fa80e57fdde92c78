"""rmchannel - qubit channels induced by random-matrix environments."""

__version__ = "0.1.0"
__author__ = "rmchannel Contributors"
