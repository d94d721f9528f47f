"""Post-processing figure scripts for simulator CSV/JSON outputs."""

__version__ = "0.1.0"
